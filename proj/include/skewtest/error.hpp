#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skewtest {

enum class ErrorKind {
  invalid_argument,
  budget_exceeded,
  invalid_integrand,
  optimization_failed,
  out_of_domain,
  degenerate_data,
  curvature_error,
  evaluation_failed,
  fitting_failed,
  schema_error,
  parse_error,
  insufficient_data,
  degenerate_spread,
};

std::string_view to_string(ErrorKind kind) noexcept;

// True for failures caused by the input data rather than the numerics.
constexpr bool is_data_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::degenerate_data:
    case ErrorKind::schema_error:
    case ErrorKind::parse_error:
    case ErrorKind::insufficient_data:
    case ErrorKind::degenerate_spread:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when adaptive quadrature runs out of subdivisions; carries the best
// estimate reached so far.
class QuadratureError : public Error {
 public:
  QuadratureError(ErrorKind kind, const std::string& what, double estimate, double error)
      : Error(kind, what), estimate_(estimate), error_(error) {}

  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

}  // namespace skewtest
