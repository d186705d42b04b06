#include "skewtest/error.hpp"

namespace skewtest {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::invalid_integrand: return "invalid-integrand";
    case ErrorKind::optimization_failed: return "optimization-failed";
    case ErrorKind::out_of_domain: return "out-of-domain";
    case ErrorKind::degenerate_data: return "degenerate-data";
    case ErrorKind::curvature_error: return "curvature-error";
    case ErrorKind::evaluation_failed: return "evaluation-failed";
    case ErrorKind::fitting_failed: return "fitting-failed";
    case ErrorKind::schema_error: return "schema-error";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::degenerate_spread: return "degenerate-spread";
  }
  return "unknown";
}

}  // namespace skewtest
