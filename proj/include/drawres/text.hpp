#ifndef DRAWRES_TEXT_HPP
#define DRAWRES_TEXT_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the CSV readers and writers.
namespace drawres::text {

std::vector<std::string> split(std::string_view line, char sep = ',');

std::string_view trim(std::string_view s);

/// Strict parse of a whole field; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);

/// Shortest representation that round-trips exactly.
std::string format_double(double v);

/// Fixed-point with `digits` decimals, for human-facing reports.
std::string format_fixed(double v, int digits);

} // namespace drawres::text

#endif // DRAWRES_TEXT_HPP
