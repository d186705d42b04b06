#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skewtest/kernels.hpp"
#include "skewtest/numerics.hpp"

namespace skewtest {

/// Shape families whose departure from symmetry is measured. For the
/// skew-symmetric family theta is lambda; for the two-piece family it is
/// epsilon.
enum class Family { skew_symmetric, two_piece };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// Density of the skewed member at standard location and scale, s(x | 0, 1, theta).
double skewed_density(Family family, const SymmetricBaseline& baseline, double theta, double x);

/// d/dtheta s(x | 0, 1, theta).
double skewed_density_dtheta(Family family, const SymmetricBaseline& baseline, double theta, double x);

/// d(f1 || f2) = int f1^2 / (f1 + f2) over the real line.
double discrepancy(const ScalarFn& f1, const ScalarFn& f2, const QuadratureConfig& cfg = {});

/// Same, over a finite window that carries all but negligible mass of both densities.
double discrepancy(const ScalarFn& f1, const ScalarFn& f2, double lo, double hi, const QuadratureConfig& cfg = {});

struct PseudoTrue {
  double mu = 0.0;
  double sigma = 1.0;
};

struct MinDiscrepancy {
  double value = 0.5;
  double mu_star = 0.0;
  double sigma_star = 1.0;
};

struct DiscrepancyOptions {
  QuadratureConfig quadrature{.rel_tol = 1e-8, .abs_tol = 1e-13};
  double simplex_tol = 1e-9;
  // Newton refinement of the minimiser on the stationarity equations.
  double gradient_tol = 1e-11;
  int newton_steps = 8;
};

/// Objective minimised by d_min: the discrepancy between the baseline
/// location-scale member (mu, sigma) and s(. | 0, 1, theta).
double discrepancy_objective(Family family, const SymmetricBaseline& baseline, double theta, double mu, double sigma,
                             const QuadratureConfig& cfg);

/// Minimum discrepancy over (mu, sigma), optimised in (mu, log sigma).
MinDiscrepancy d_min(Family family, const SymmetricBaseline& baseline, double theta,
                     std::optional<PseudoTrue> warm_start = std::nullopt, const DiscrepancyOptions& options = {});

/// Newton iterations on the stationarity equations starting from `start`.
/// Returns the refined minimiser; used to recover exact pseudo-true values
/// between curve nodes.
PseudoTrue polish_pseudo_true(Family family, const SymmetricBaseline& baseline, double theta, PseudoTrue start,
                              const DiscrepancyOptions& options = {});

/// Envelope-theorem derivative of D_min at theta, evaluated at the given
/// pseudo-true parameters (absolute value of the integral).
double envelope_derivative(Family family, const SymmetricBaseline& baseline, double theta, PseudoTrue at,
                           const QuadratureConfig& cfg);

/// Limit of D_min as lambda -> +inf for the skew-symmetric family, where the
/// skewed density becomes the folded baseline 2 f(x) 1{x > 0}.
MinDiscrepancy d_min_limit(const SymmetricBaseline& baseline, const DiscrepancyOptions& options = {});

struct DiscrepancyCurve {
  Family family = Family::skew_symmetric;
  std::string baseline;
  std::vector<double> lambdas;
  std::vector<double> d_min;
  std::vector<double> signed_values;
  std::vector<PseudoTrue> pseudo_true;

  std::size_t size() const noexcept { return lambdas.size(); }
  // D_min at the largest |lambda| node minus 1/2.
  double range_constant() const;
  // Pseudo-true values at theta by cubic interpolation between nodes.
  PseudoTrue interpolate_pseudo_true(double theta) const;
};

/// Evaluates the curve on `grid` (sorted, containing 0) by continuation
/// outward from 0; each node is warm-started from its inner neighbour.
DiscrepancyCurve build_curve(Family family, const SymmetricBaseline& baseline, std::span<const double> grid,
                             const DiscrepancyOptions& options = {});

std::vector<double> uniform_grid(double lo, double hi, std::size_t nodes);

/// Default grids: 241 nodes on [-30, 30] (skew-symmetric), 121 on [-3, 3] (two-piece).
std::vector<double> default_grid(Family family);

/// CSV with header lambda,d_min,signed,mu_star,sigma_star.
void write_curve_csv(std::ostream& out, const DiscrepancyCurve& curve);

}  // namespace skewtest
