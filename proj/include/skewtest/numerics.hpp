#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace skewtest {

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-13;
  int max_subdivisions = 4000;
  // Tail mass below which an infinite domain may be cut off.
  double truncation_mass = 1e-14;

  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<double(std::span<const double>)>;

/// Adaptive 21-point Gauss-Kronrod quadrature on [lo, hi]. The panel with the
/// largest error estimate is bisected until the global estimate drops below
/// max(abs_tol, rel_tol |value|).
QuadResult integrate(const ScalarFn& fn, double lo, double hi, const QuadratureConfig& cfg = {});

/// Same, with the interval pre-split at the given sorted breakpoints.
QuadResult integrate(const ScalarFn& fn, std::span<const double> breakpoints, const QuadratureConfig& cfg = {});

/// Integral over the whole real line, through the substitution x = t / (1 - t^2).
QuadResult integrate_line(const ScalarFn& fn, const QuadratureConfig& cfg = {});

/// Integral over [a, +inf), through x = a + t / (1 - t).
QuadResult integrate_upper(const ScalarFn& fn, double a, const QuadratureConfig& cfg = {});

struct OptimResult {
  std::vector<double> argmin;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
};

struct SimplexOptions {
  int max_iterations = 20000;
  // Initial edge length, scaled by max(1, |x_i|) per coordinate.
  double initial_step = 0.1;
};

/// Nelder-Mead minimisation. Terminates when both the simplex diameter and
/// the spread of vertex values fall below tol. A non-finite objective value
/// triggers one restart from a perturbed initial point; a second one throws
/// optimization-failed.
OptimResult minimize(const VectorFn& objective, std::vector<double> init, double tol,
                     const SimplexOptions& options = {});

double derivative_central(const ScalarFn& fn, double x, double h);
double derivative_central(const ScalarFn& fn, double x);

/// Dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Central-difference Hessian, symmetrised as (H + H^T) / 2. A non-positive h
/// selects eps^{1/4} max(1, |x_i|) per coordinate.
Matrix hessian_fd(const VectorFn& fn, std::span<const double> x, double h = 0.0);

bool is_positive_definite(const Matrix& m);

/// log det of a symmetric positive-definite matrix via Cholesky; throws
/// curvature-error otherwise.
double log_det_spd(const Matrix& m);

/// log(sum(exp(v))) with -inf entries allowed.
double log_sum_exp(std::span<const double> values);

}  // namespace skewtest
