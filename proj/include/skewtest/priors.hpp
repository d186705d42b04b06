#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "skewtest/discrepancy.hpp"

namespace skewtest {

enum class MoominMethod { envelope, curve_derivative };

/// Exact MOOMIN prior backed by a tabulated discrepancy curve. Pseudo-true
/// values between nodes are interpolated and then refined on the
/// stationarity equations before the envelope integral is taken.
class MoominExactContext {
 public:
  MoominExactContext(Family family, const SymmetricBaseline& baseline, std::vector<double> grid);
  MoominExactContext(Family family, const SymmetricBaseline& baseline, DiscrepancyCurve curve);

  Family family() const noexcept { return family_; }
  const SymmetricBaseline& baseline() const noexcept { return *baseline_; }
  const DiscrepancyCurve& curve() const noexcept { return curve_; }
  double span_lo() const noexcept { return curve_.lambdas.front(); }
  double span_hi() const noexcept { return curve_.lambdas.back(); }

  /// d/dlambda of the signed minimum discrepancy at lambda (unnormalised
  /// prior). Throws out-of-domain outside the curve span.
  double unnormalized(double lambda, MoominMethod method = MoominMethod::envelope) const;

  /// Pseudo-true parameters at lambda: interpolated from the curve, then
  /// refined by Newton steps.
  PseudoTrue pseudo_true(double lambda) const;

  // c in the c / lambda^2 tail law, matched at the lower and upper endpoints.
  double tail_coefficient_lo() const noexcept { return tail_lo_; }
  double tail_coefficient_hi() const noexcept { return tail_hi_; }

  /// Total unnormalised mass: M(hi) - M(lo) over the span plus both tails.
  double total_mass() const;

 private:
  void init();

  Family family_;
  const SymmetricBaseline* baseline_;
  DiscrepancyCurve curve_;
  DiscrepancyOptions precise_;
  double tail_lo_ = 0.0;
  double tail_hi_ = 0.0;
};

struct MoominExact {
  std::shared_ptr<const MoominExactContext> context;
  double norm_const = 0.0;
};

struct MoominApprox {
  double k = 4.0;
  double m = 3.0;
  double a = 0.28;
  double norm_const = 0.0;
};

struct Dimom {
  double sigma_m = 1.69;
};

struct JeffreysT {
  double df = 0.5;
  double scale = 1.5707963267948966;  // pi / 2
};

/// Narrow normal prior centred at 0; a local prior used to validate that the
/// alternative marginal collapses onto the null one.
struct LocalNormal {
  double sd = 1e-3;
};

using PriorSpec = std::variant<MoominExact, MoominApprox, Dimom, JeffreysT, LocalNormal>;

std::string_view kind_name(const PriorSpec& spec);

/// Builds a prior from a command-line style name: jeffreys, dimom, moomin
/// (approximate), moomin-exact (skew-symmetric curve of `baseline` on the default grid).
PriorSpec prior_from_name(std::string_view name, double jeffreys_scale = 1.5707963267948966,
                          const SymmetricBaseline& baseline = normal_baseline());

/// Validates parameters and fills the normalising constant. MOOMIN-approx
/// uses the Beta-function closed form; MOOMIN-exact integrates the envelope
/// over the curve span and adds c / lambda^2 tails matched at the endpoints.
PriorSpec normalize(PriorSpec spec);

double prior_density(const PriorSpec& spec, double lambda);

/// log prior density; -inf at exact zeros of non-local priors.
double log_prior_density(const PriorSpec& spec, double lambda);

/// Prior mass of (a, +inf) for a >= 0.
double prior_upper_tail(const PriorSpec& spec, double a);

bool is_non_local(const PriorSpec& spec);

/// CSV with header lambda,density over the given grid.
void write_prior_csv(std::ostream& out, const PriorSpec& spec, std::span<const double> grid);

nlohmann::json to_json(const PriorSpec& spec);
PriorSpec prior_from_json(const nlohmann::json& doc);

struct RateFit {
  double slope = 0.0;      // least-squares slope of log density on log |lambda|
  double intercept = 0.0;
  int nearest_even = 0;    // even integer closest to the slope
  int best_even_power = 0; // even p minimising the residual of c |lambda|^p on the natural scale
  std::size_t nodes = 0;
};

struct RateFitOptions {
  double spacing = 0.5 / 12.0;
  double exclude_below = 0.02;
};

/// Fits the vanishing rate of a density at 0 over the nodes k * spacing with
/// |k * spacing| <= halfwidth, skipping |lambda| < exclude_below. Fewer than 5
/// usable nodes is an invalid-argument error.
RateFit fit_vanishing_rate(const std::function<double(double)>& density, double halfwidth,
                           const RateFitOptions& options = {});

RateFit fit_vanishing_rate(const MoominExactContext& context, double halfwidth, const RateFitOptions& options = {});

}  // namespace skewtest
