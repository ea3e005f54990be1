#include "drawres/core.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace drawres {

namespace {

bool read_int(const std::string &s, std::size_t &pos, std::size_t width, int &out) {
  if (pos + width > s.size())
    return false;
  const char *first = s.data() + pos;
  const char *last = first + width;
  for (const char *p = first; p != last; ++p)
    if (!std::isdigit(static_cast<unsigned char>(*p)))
      return false;
  std::from_chars(first, last, out);
  pos += width;
  return true;
}

bool expect(const std::string &s, std::size_t &pos, char c) {
  if (pos >= s.size() || s[pos] != c)
    return false;
  ++pos;
  return true;
}

} // namespace

Instant parse_instant(const std::string &raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b])))
    ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1])))
    --e;
  const std::string s = raw.substr(b, e - b);
  auto fail = [&]() -> Instant { throw ParseError(0, "malformed timestamp '" + raw + "'"); };

  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, ms = 0;
  if (!read_int(s, pos, 4, y) || pos >= s.size())
    return fail();
  const char date_sep = s[pos];
  if (date_sep != '/' && date_sep != '-')
    return fail();
  ++pos;
  if (!read_int(s, pos, 2, mo) || !expect(s, pos, date_sep) || !read_int(s, pos, 2, d))
    return fail();
  if (pos >= s.size() || (s[pos] != ' ' && s[pos] != 'T'))
    return fail();
  if (date_sep == '/' && s[pos] == 'T')
    return fail();
  ++pos;
  if (!read_int(s, pos, 2, h) || !expect(s, pos, ':') || !read_int(s, pos, 2, mi) ||
      !expect(s, pos, ':') || !read_int(s, pos, 2, sec))
    return fail();
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    int frac = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      if (digits < 3)
        frac = frac * 10 + (s[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0)
      return fail();
    for (std::size_t k = digits; k < 3; ++k)
      frac *= 10;
    ms = frac;
  }
  if (pos < s.size() && s[pos] == 'Z' && date_sep == '-')
    ++pos;
  if (pos != s.size())
    return fail();

  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59)
    return fail();
  return Instant{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{ms};
}

std::string format_instant(Instant t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss<milliseconds> hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d/%02u/%02u %02d:%02d:%02d.%03d", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(hms.hours().count()),
                int(hms.minutes().count()), int(hms.seconds().count()),
                int(hms.subseconds().count()));
  return buf;
}

int hour_of_day(Instant t) {
  using namespace std::chrono;
  return static_cast<int>(floor<hours>(t - floor<days>(t)).count());
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

} // namespace drawres
