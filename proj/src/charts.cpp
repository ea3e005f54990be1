#include "drawres/charts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "drawres/text.hpp"

namespace drawres {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void settle() {
    if (!(lo <= hi)) {
      lo = 0;
      hi = 1;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

struct Frame {
  Range xr, yr;
  double px(double x) const { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kHeight - kTop - kBottom);
  }
};

std::string num(double v) { return text::format_fixed(v, 2); }

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  return text::format_fixed(v, std::abs(v) >= 100 ? 0 : 2);
}

void open_svg(std::ostream &out, const ChartText &t, const Frame &f) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(t.title) << "</text>\n";
  const double x0 = f.px(f.xr.lo), x1 = f.px(f.xr.hi), y0 = f.py(f.yr.lo), y1 = f.py(f.yr.hi);
  out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
      << "\" height=\"" << num(y0 - y1) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.xr.lo + (f.xr.hi - f.xr.lo) * k / 4.0;
    const double yv = f.yr.lo + (f.yr.hi - f.yr.lo) * k / 4.0;
    out << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(y0 + 16)
        << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
    out << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(f.py(yv) + 4)
        << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
  }
  out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">" << escape(t.x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << num((y0 + y1) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(t.y_label) << "</text>\n";
}

void polyline(std::ostream &out, const Frame &f, const ChartSeries &s) {
  out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
  const std::size_t n = std::min(s.x.size(), s.y.size());
  for (std::size_t i = 0; i < n; ++i)
    if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
      out << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i])) << (i + 1 < n ? " " : "");
  out << "\"/>\n";
}

void legend(std::ostream &out, const std::vector<ChartSeries> &series) {
  double y = kTop + 14;
  for (const auto &s : series) {
    if (s.label.empty())
      continue;
    out << "<line x1=\"" << num(kWidth - 190) << "\" y1=\"" << num(y - 4) << "\" x2=\""
        << num(kWidth - 170) << "\" y2=\"" << num(y - 4) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(kWidth - 164) << "\" y=\"" << num(y) << "\">" << escape(s.label)
        << "</text>\n";
    y += 16;
  }
}

} // namespace

void write_line_chart(std::ostream &out, const ChartText &text,
                      const std::vector<ChartSeries> &series) {
  Frame f;
  for (const auto &s : series) {
    for (double v : s.x)
      f.xr.add(v);
    for (double v : s.y)
      f.yr.add(v);
  }
  f.xr.settle();
  f.yr.settle();
  open_svg(out, text, f);
  for (const auto &s : series)
    polyline(out, f, s);
  legend(out, series);
  out << "</svg>\n";
}

void write_bar_chart(std::ostream &out, const ChartText &text, const std::vector<double> &x,
                     const std::vector<double> &heights,
                     const std::vector<ChartSeries> &overlay) {
  Frame f;
  f.yr.add(0.0);
  for (std::size_t i = 0; i < x.size() && i < heights.size(); ++i) {
    f.xr.add(x[i] - 0.5);
    f.xr.add(x[i] + 0.5);
    f.yr.add(heights[i]);
  }
  for (const auto &s : overlay)
    for (double v : s.y)
      f.yr.add(v);
  f.xr.settle();
  f.yr.settle();
  open_svg(out, text, f);
  for (std::size_t i = 0; i < x.size() && i < heights.size(); ++i) {
    if (heights[i] <= 0.0)
      continue;
    const double l = f.px(x[i] - 0.45), r = f.px(x[i] + 0.45);
    const double top = f.py(heights[i]), base = f.py(0.0);
    out << "<rect x=\"" << num(l) << "\" y=\"" << num(top) << "\" width=\"" << num(r - l)
        << "\" height=\"" << num(base - top) << "\" fill=\"#9ecae1\" stroke=\"#3182bd\"/>\n";
  }
  for (const auto &s : overlay)
    polyline(out, f, s);
  legend(out, overlay);
  out << "</svg>\n";
}

} // namespace drawres
