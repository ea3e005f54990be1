#ifndef DRAWRES_CHARTS_HPP
#define DRAWRES_CHARTS_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace drawres {

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

struct ChartText {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// Polylines on shared axes, with a legend.
void write_line_chart(std::ostream &out, const ChartText &text,
                      const std::vector<ChartSeries> &series);

/// Bars centred on `x` with unit width, plus optional overlay lines.
void write_bar_chart(std::ostream &out, const ChartText &text, const std::vector<double> &x,
                     const std::vector<double> &heights,
                     const std::vector<ChartSeries> &overlay = {});

} // namespace drawres

#endif // DRAWRES_CHARTS_HPP
