#include "skewtest/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "skewtest/error.hpp"

namespace skewtest {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool at_roundoff = false;  // error estimate is the rounding floor; splitting cannot help
  bool operator<(const Panel& other) const { return error < other.error; }
};

double checked(const ScalarFn& fn, double x) {
  const double y = fn(x);
  if (std::isnan(y)) throw QuadratureError(ErrorKind::invalid_integrand, "integrand returned NaN at x=" + std::to_string(x), 0.0, 0.0);
  return y;
}

Panel gauss_kronrod21(const ScalarFn& fn, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = checked(fn, centre);
  double resk = kWgk[10] * fc;
  double resg = 0.0;
  double resabs = std::fabs(resk);
  std::array<double, 10> f1{}, f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = checked(fn, centre - dx);
    f2[j] = checked(fn, centre + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[10] * std::fabs(fc - mean);
  for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));

  const double result = resk * half;
  resabs *= std::fabs(half);
  resasc *= std::fabs(half);
  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  bool floor = false;
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps) && err <= 50.0 * kEps * resabs) {
    err = 50.0 * kEps * resabs;
    floor = true;
  }
  return {lo, hi, result, err, floor};
}

QuadResult adaptive(const ScalarFn& fn, std::span<const double> points, const QuadratureConfig& cfg) {
  cfg.validate();
  std::priority_queue<Panel> queue;
  double total = 0.0;
  double total_err = 0.0;
  double settled = 0.0;  // panels too narrow to split further
  double settled_err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] <= points[i]) continue;
    auto p = gauss_kronrod21(fn, points[i], points[i + 1]);
    total += p.value;
    total_err += p.error;
    queue.push(p);
  }
  int splits = 0;
  while (!queue.empty()) {
    if (total_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total))) break;
    if (splits >= cfg.max_subdivisions) {
      throw QuadratureError(ErrorKind::budget_exceeded,
                            "subdivision budget exhausted (estimate " + std::to_string(total) + ")", total,
                            total_err);
    }
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (worst.at_roundoff || !(mid > worst.lo && mid < worst.hi) || worst.hi - worst.lo < 1e3 * kEps * std::max(1.0, std::fabs(mid))) {
      settled += worst.value;
      settled_err += worst.error;
      continue;
    }
    const Panel left = gauss_kronrod21(fn, worst.lo, mid);
    const Panel right = gauss_kronrod21(fn, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++splits;
  }
  // Re-sum from the panels to shed accumulated cancellation in `total`.
  double value = settled;
  double error = settled_err;
  while (!queue.empty()) {
    value += queue.top().value;
    error += queue.top().error;
    queue.pop();
  }
  return {value, error, splits};
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw Error(ErrorKind::invalid_argument, "quadrature tolerances must be positive");
  if (max_subdivisions < 1) throw Error(ErrorKind::invalid_argument, "max_subdivisions must be at least 1");
  if (!(truncation_mass > 0.0 && truncation_mass < 1e-8))
    throw Error(ErrorKind::invalid_argument, "truncation_mass must lie in (0, 1e-8)");
}

QuadResult integrate(const ScalarFn& fn, double lo, double hi, const QuadratureConfig& cfg) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(ErrorKind::invalid_argument, "integration limits must be finite");
  if (lo == hi) return {};
  if (lo > hi) {
    auto r = integrate(fn, hi, lo, cfg);
    r.value = -r.value;
    return r;
  }
  const std::array<double, 2> pts = {lo, hi};
  return adaptive(fn, pts, cfg);
}

QuadResult integrate(const ScalarFn& fn, std::span<const double> breakpoints, const QuadratureConfig& cfg) {
  if (breakpoints.size() < 2) throw Error(ErrorKind::invalid_argument, "need at least two breakpoints");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
    throw Error(ErrorKind::invalid_argument, "breakpoints must be sorted");
  for (double b : breakpoints)
    if (!std::isfinite(b)) throw Error(ErrorKind::invalid_argument, "breakpoints must be finite");
  return adaptive(fn, breakpoints, cfg);
}

QuadResult integrate_line(const ScalarFn& fn, const QuadratureConfig& cfg) {
  const ScalarFn mapped = [&fn](double t) {
    const double d = 1.0 - t * t;
    const double x = t / d;
    if (!std::isfinite(x)) return 0.0;
    const double y = fn(x);
    return y == 0.0 ? 0.0 : y * (1.0 + t * t) / (d * d);
  };
  const std::array<double, 3> pts = {-1.0, 0.0, 1.0};
  return adaptive(mapped, pts, cfg);
}

QuadResult integrate_upper(const ScalarFn& fn, double a, const QuadratureConfig& cfg) {
  if (!std::isfinite(a)) throw Error(ErrorKind::invalid_argument, "lower limit must be finite");
  const ScalarFn mapped = [&fn, a](double t) {
    const double d = 1.0 - t;
    const double x = a + t / d;
    if (!std::isfinite(x)) return 0.0;
    const double y = fn(x);
    return y == 0.0 ? 0.0 : y / (d * d);
  };
  const std::array<double, 2> pts = {0.0, 1.0};
  return adaptive(mapped, pts, cfg);
}

namespace {

struct NonFinite {};

OptimResult nelder_mead(const VectorFn& objective, const std::vector<double>& init, double tol,
                        const SimplexOptions& options) {
  const std::size_t n = init.size();
  int evaluations = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    const double v = objective(x);
    if (!std::isfinite(v)) throw NonFinite{};
    return v;
  };

  std::vector<std::vector<double>> simplex(n + 1, init);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step * std::max(1.0, std::fabs(init[i]));
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto point_along = [&](double coef, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coef * (worst[j] - centroid[j]);
  };

  OptimResult result;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) diameter = std::max(diameter, std::fabs(simplex[i][j] - simplex[best][j]));
    if (diameter < tol && values[worst] - values[best] < tol) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
    }

    point_along(-1.0, trial, simplex[worst]);
    const double fr = eval(trial);
    if (fr < values[best]) {
      point_along(-2.0, trial2, simplex[worst]);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    point_along(outside ? -0.5 : 0.5, trial2, simplex[worst]);
    const double fc = eval(trial2);
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      values[i] = eval(simplex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.argmin = simplex[best];
  result.value = values[best];
  result.iterations = it;
  result.evaluations = evaluations;
  return result;
}

}  // namespace

OptimResult minimize(const VectorFn& objective, std::vector<double> init, double tol, const SimplexOptions& options) {
  if (init.empty()) throw Error(ErrorKind::invalid_argument, "minimize needs at least one coordinate");
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tolerance must be positive");
  try {
    return nelder_mead(objective, init, tol, options);
  } catch (const NonFinite&) {
  }
  auto perturbed = init;
  for (std::size_t i = 0; i < perturbed.size(); ++i)
    perturbed[i] += (i % 2 == 0 ? 0.05 : -0.05) * std::max(1.0, std::fabs(perturbed[i]));
  try {
    return nelder_mead(objective, perturbed, tol, options);
  } catch (const NonFinite&) {
    throw Error(ErrorKind::optimization_failed, "objective became non-finite after restart");
  }
}

double derivative_central(const ScalarFn& fn, double x, double h) {
  return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

double derivative_central(const ScalarFn& fn, double x) {
  return derivative_central(fn, x, std::cbrt(kEps) * std::max(1.0, std::fabs(x)));
}

Matrix hessian_fd(const VectorFn& fn, std::span<const double> x, double h) {
  const std::size_t n = x.size();
  std::vector<double> step(n);
  for (std::size_t i = 0; i < n; ++i) step[i] = h > 0.0 ? h : std::pow(kEps, 0.25) * std::max(1.0, std::fabs(x[i]));

  std::vector<double> p(x.begin(), x.end());
  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    p.assign(x.begin(), x.end());
    p[i] += di;
    p[j] += dj;
    const double v = fn(p);
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "non-finite value on the Hessian stencil");
    return v;
  };
  p.assign(x.begin(), x.end());
  const double f0 = fn(p);
  if (!std::isfinite(f0)) throw Error(ErrorKind::invalid_argument, "non-finite value on the Hessian stencil");

  Matrix hess(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = step[i];
    hess(i, i) = (at(i, hi, i, 0.0) - 2.0 * f0 + at(i, -hi, i, 0.0)) / (hi * hi);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double hj = step[j];
      const double v = (at(i, hi, j, hj) - at(i, hi, j, -hj) - at(i, -hi, j, hj) + at(i, -hi, j, -hj)) / (4.0 * hi * hj);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

bool is_positive_definite(const Matrix& m) {
  try {
    (void)log_det_spd(m);
    return true;
  } catch (const Error&) {
    return false;
  }
}

double log_det_spd(const Matrix& m) {
  const std::size_t n = m.size();
  Matrix l(n);
  double log_det = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) throw Error(ErrorKind::curvature_error, "matrix is not positive definite");
    l(j, j) = std::sqrt(d);
    log_det += 2.0 * std::log(l(j, j));
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return log_det;
}

double log_sum_exp(std::span<const double> values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

}  // namespace skewtest
