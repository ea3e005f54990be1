#ifndef DRAWRES_CORE_HPP
#define DRAWRES_CORE_HPP

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace drawres {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::Ref;
using ConstRefMat = const Ref<const MatrixXd>;
using ConstRefVec = const Ref<const VectorXd>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// UTC instant at millisecond resolution.
using Instant = std::chrono::sys_time<std::chrono::milliseconds>;
using Millis = std::chrono::milliseconds;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string &what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class OrderingError : public Error {
public:
  using Error::Error;
};

/// A numeric precondition or domain rule was violated.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Training produced a non-finite value.
class DivergenceError : public Error {
public:
  using Error::Error;
};

/// Parse "YYYY/MM/DD HH:MM:SS[.mmm]" or ISO-8601 "YYYY-MM-DD[T ]HH:MM:SS[.mmm][Z]".
/// Throws ParseError (line 0) on malformed text.
Instant parse_instant(const std::string &text);

/// Format as "YYYY/MM/DD HH:MM:SS.mmm".
std::string format_instant(Instant t);

/// Hour of day (0-23) of the wall-clock time.
int hour_of_day(Instant t);

/// splitmix64 step; used to derive independent sub-stream seeds from one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

} // namespace drawres

#endif // DRAWRES_CORE_HPP
