#include "skewtest/discrepancy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <ostream>
#include <string>

#include "skewtest/error.hpp"

namespace skewtest {

std::string_view to_string(Family family) {
  return family == Family::skew_symmetric ? "skew" : "two-piece";
}

Family family_from_string(std::string_view name) {
  if (name == "skew" || name == "skew-symmetric") return Family::skew_symmetric;
  if (name == "two-piece" || name == "twopiece") return Family::two_piece;
  throw Error(ErrorKind::invalid_argument, "unknown family '" + std::string(name) + "'");
}

double skewed_density(Family family, const SymmetricBaseline& b, double theta, double x) {
  if (family == Family::skew_symmetric) return 2.0 * b.pdf(x) * b.skew_cdf(theta * b.omega(x));
  const double t = std::tanh(theta);
  const double scale = x < 0.0 ? 1.0 + t : 1.0 - t;
  return b.pdf(x / scale);  // 2 / (sigma1 + sigma2) = 1 at unit sigma
}

double skewed_density_dtheta(Family family, const SymmetricBaseline& b, double theta, double x) {
  if (family == Family::skew_symmetric) {
    const double w = b.omega(x);
    return 2.0 * b.pdf(x) * b.skew_pdf(theta * w) * w;
  }
  const double t = std::tanh(theta);
  const double sech2 = 1.0 - t * t;
  const bool left = x < 0.0;
  const double scale = left ? 1.0 + t : 1.0 - t;
  const double z = x / scale;
  const double dscale = left ? sech2 : -sech2;
  return b.pdf(z) * b.dlog_pdf(z) * (-z / scale) * dscale;
}

double discrepancy(const ScalarFn& f1, const ScalarFn& f2, const QuadratureConfig& cfg) {
  return integrate_line(
             [&](double x) {
               const double a = f1(x);
               const double s = a + f2(x);
               return s > 0.0 ? a * a / s : 0.0;
             },
             cfg)
      .value;
}

double discrepancy(const ScalarFn& f1, const ScalarFn& f2, double lo, double hi, const QuadratureConfig& cfg) {
  return integrate(
             [&](double x) {
               const double a = f1(x);
               const double s = a + f2(x);
               return s > 0.0 ? a * a / s : 0.0;
             },
             lo, hi, cfg)
      .value;
}

namespace {

struct Window {
  std::array<double, 8> points{};
  std::size_t count = 0;
  std::span<const double> span() const { return {points.data(), count}; }
};

// Integration window covering both the location-scale member and the skewed
// density up to the configured tail mass, split at 0 and mu. For large
// skewness the skewed density has a sharp shoulder of width 1/|theta| at 0,
// which gets its own panels so the first Kronrod pass cannot step over it.
Window window_for(Family family, const SymmetricBaseline& b, double theta, double mu, double sigma,
                  const QuadratureConfig& cfg) {
  const double q = b.quantile(1.0 - 0.25 * cfg.truncation_mass);
  double left = q;
  double right = q;
  if (family == Family::two_piece) {
    const double t = std::tanh(theta);
    left = q * (1.0 + t);
    right = q * (1.0 - t);
  }
  const double lo = std::min(mu - sigma * q, -left);
  const double hi = std::max(mu + sigma * q, right);
  std::array<double, 8> pts = {lo, 0.0, mu, hi, 0.0, 0.0, 0.0, 0.0};
  if (family == Family::skew_symmetric && std::fabs(theta) > 1.0) {
    const double w = 1.0 / std::fabs(theta);
    pts[4] = -4.0 * w;
    pts[5] = -w;
    pts[6] = w;
    pts[7] = 4.0 * w;
  }
  std::sort(pts.begin(), pts.end());
  Window w;
  for (double p : pts) {
    if (p < lo || p > hi) continue;
    if (w.count > 0 && p <= w.points[w.count - 1]) continue;
    w.points[w.count++] = p;
  }
  return w;
}

struct Gradient {
  double mu = 0.0;
  double eta = 0.0;
};

Gradient objective_gradient(Family family, const SymmetricBaseline& b, double theta, double mu, double sigma,
                            const QuadratureConfig& cfg) {
  const auto win = window_for(family, b, theta, mu, sigma, cfg);
  // d/dpar int a^2/(a+s) = int da a (a + 2s) / (a + s)^2
  auto weight = [&](double x, double& a, double& z) {
    z = (x - mu) / sigma;
    a = b.pdf(z) / sigma;
    const double s = skewed_density(family, b, theta, x);
    const double tot = a + s;
    return tot > 0.0 ? a * (a + 2.0 * s) / (tot * tot) : 0.0;
  };
  const double gmu = integrate(
                         [&](double x) {
                           double a, z;
                           const double w = weight(x, a, z);
                           return w * (-a * b.dlog_pdf(z) / sigma);
                         },
                         win.span(), cfg)
                         .value;
  const double geta = integrate(
                          [&](double x) {
                            double a, z;
                            const double w = weight(x, a, z);
                            return w * (-a * (1.0 + z * b.dlog_pdf(z)));
                          },
                          win.span(), cfg)
                          .value;
  return {gmu, geta};
}

PseudoTrue moment_start(Family family, const SymmetricBaseline& b, double theta, const QuadratureConfig& cfg) {
  const auto win = window_for(family, b, theta, 0.0, 1.0, cfg);
  const double m1 = integrate([&](double x) { return x * skewed_density(family, b, theta, x); }, win.span(), cfg).value;
  const double m2 =
      integrate([&](double x) { return x * x * skewed_density(family, b, theta, x); }, win.span(), cfg).value;
  // Rescale the standard deviation by the baseline's own spread.
  const double base_var = integrate([&](double x) { return x * x * b.pdf(x); }, win.span(), cfg).value;
  const double var = std::max(m2 - m1 * m1, 1e-12);
  return {m1, std::sqrt(var / base_var)};
}

}  // namespace

double discrepancy_objective(Family family, const SymmetricBaseline& b, double theta, double mu, double sigma,
                             const QuadratureConfig& cfg) {
  const auto win = window_for(family, b, theta, mu, sigma, cfg);
  return integrate(
             [&](double x) {
               const double a = b.pdf((x - mu) / sigma) / sigma;
               const double s = a + skewed_density(family, b, theta, x);
               return s > 0.0 ? a * a / s : 0.0;
             },
             win.span(), cfg)
      .value;
}

PseudoTrue polish_pseudo_true(Family family, const SymmetricBaseline& b, double theta, PseudoTrue start,
                              const DiscrepancyOptions& options) {
  const auto& cfg = options.quadrature;
  double mu = start.mu;
  double eta = std::log(start.sigma);
  auto grad = [&](double m, double e) { return objective_gradient(family, b, theta, m, std::exp(e), cfg); };
  Gradient g = grad(mu, eta);
  constexpr double h = 1e-5;
  for (int step = 0; step < options.newton_steps; ++step) {
    if (std::hypot(g.mu, g.eta) < options.gradient_tol) break;
    const Gradient gmp = grad(mu + h, eta), gmm = grad(mu - h, eta);
    const Gradient gep = grad(mu, eta + h), gem = grad(mu, eta - h);
    const double h11 = (gmp.mu - gmm.mu) / (2 * h);
    const double h22 = (gep.eta - gem.eta) / (2 * h);
    const double h12 = 0.5 * ((gmp.eta - gmm.eta) + (gep.mu - gem.mu)) / (2 * h);
    const double det = h11 * h22 - h12 * h12;
    if (!(det > 0.0) || !(h11 > 0.0)) break;
    const double dmu = -(h22 * g.mu - h12 * g.eta) / det;
    const double deta = -(-h12 * g.mu + h11 * g.eta) / det;
    const double before = std::hypot(g.mu, g.eta);
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 6; ++halving, t *= 0.5) {
      const Gradient trial = grad(mu + t * dmu, eta + t * deta);
      if (std::hypot(trial.mu, trial.eta) < before) {
        mu += t * dmu;
        eta += t * deta;
        g = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted || std::hypot(dmu, deta) * t < 1e-14) break;
  }
  return {mu, std::exp(eta)};
}

double envelope_derivative(Family family, const SymmetricBaseline& b, double theta, PseudoTrue at,
                           const QuadratureConfig& cfg) {
  const auto win = window_for(family, b, theta, at.mu, at.sigma, cfg);
  const double v = integrate(
                       [&](double x) {
                         const double a = b.pdf((x - at.mu) / at.sigma) / at.sigma;
                         const double tot = a + skewed_density(family, b, theta, x);
                         if (!(tot > 0.0)) return 0.0;
                         return a * a * skewed_density_dtheta(family, b, theta, x) / (tot * tot);
                       },
                       win.span(), cfg)
                       .value;
  return std::fabs(v);
}

MinDiscrepancy d_min(Family family, const SymmetricBaseline& b, double theta, std::optional<PseudoTrue> warm_start,
                     const DiscrepancyOptions& options) {
  if (!std::isfinite(theta)) throw Error(ErrorKind::invalid_argument, "shape parameter must be finite");
  const auto& cfg = options.quadrature;
  const PseudoTrue start = warm_start ? *warm_start : moment_start(family, b, theta, cfg);
  auto objective = [&](std::span<const double> p) {
    return discrepancy_objective(family, b, theta, p[0], std::exp(p[1]), cfg);
  };
  OptimResult opt;
  try {
    opt = minimize(objective, {start.mu, std::log(start.sigma)}, options.simplex_tol, {.initial_step = 0.05});
  } catch (const Error& e) {
    throw Error(ErrorKind::optimization_failed, "d_min at theta=" + std::to_string(theta) + ": " + e.what());
  }
  if (!opt.converged)
    throw Error(ErrorKind::optimization_failed, "d_min did not converge at theta=" + std::to_string(theta));
  PseudoTrue simplex{opt.argmin[0], std::exp(opt.argmin[1])};
  PseudoTrue polished = polish_pseudo_true(family, b, theta, simplex, options);
  if (std::hypot(polished.mu - simplex.mu, std::log(polished.sigma / simplex.sigma)) > 1e-3) {
    // A long Newton move means the simplex collapsed early; restart it once
    // from the better of the two points.
    const double vs = opt.value;
    const double vp = discrepancy_objective(family, b, theta, polished.mu, polished.sigma, cfg);
    const PseudoTrue from = vp < vs ? polished : simplex;
    try {
      opt = minimize(objective, {from.mu, std::log(from.sigma)}, options.simplex_tol, {.initial_step = 0.05});
    } catch (const Error& e) {
      throw Error(ErrorKind::optimization_failed, "d_min at theta=" + std::to_string(theta) + ": " + e.what());
    }
    simplex = {opt.argmin[0], std::exp(opt.argmin[1])};
    polished = polish_pseudo_true(family, b, theta, simplex, options);
  }
  const double v_simplex = discrepancy_objective(family, b, theta, simplex.mu, simplex.sigma, cfg);
  const double v_polished = discrepancy_objective(family, b, theta, polished.mu, polished.sigma, cfg);
  const PseudoTrue best = v_polished <= v_simplex ? polished : simplex;
  return {std::min(v_polished, v_simplex), best.mu, best.sigma};
}

MinDiscrepancy d_min_limit(const SymmetricBaseline& b, const DiscrepancyOptions& options) {
  // As lambda -> +inf, G(lambda x) tends to the unit step and the skewed
  // density to the folded baseline 2 f(x) on x > 0.
  const auto& cfg = options.quadrature;
  const double q = b.quantile(1.0 - 0.25 * cfg.truncation_mass);
  auto objective = [&](std::span<const double> p) {
    const double mu = p[0], sigma = std::exp(p[1]);
    const double lo = std::min(mu - sigma * q, 0.0);
    const double hi = std::max(mu + sigma * q, q);
    std::array<double, 4> pts = {lo, std::min(0.0, mu), std::max(0.0, mu), hi};
    auto last = std::unique(pts.begin(), pts.end());
    return integrate(
               [&](double x) {
                 const double a = b.pdf((x - mu) / sigma) / sigma;
                 const double s = a + (x > 0.0 ? 2.0 * b.pdf(x) : 0.0);
                 return s > 0.0 ? a * a / s : 0.0;
               },
               std::span<const double>(pts.data(), static_cast<std::size_t>(last - pts.begin())), cfg)
        .value;
  };
  const double m1 = 2.0 * integrate([&](double x) { return x * b.pdf(x); }, 0.0, q, cfg).value;
  const double m2 = integrate([&](double x) { return x * x * b.pdf(x); }, -q, q, cfg).value;
  const double sd = std::sqrt(std::max(m2 - m1 * m1, 1e-12) / m2);
  const auto opt = minimize(objective, {m1, std::log(sd)}, options.simplex_tol, {.initial_step = 0.05});
  if (!opt.converged) throw Error(ErrorKind::optimization_failed, "limiting d_min did not converge");
  return {opt.value, opt.argmin[0], std::exp(opt.argmin[1])};
}

double DiscrepancyCurve::range_constant() const {
  if (lambdas.empty()) throw Error(ErrorKind::invalid_argument, "empty curve");
  return std::max(d_min.front(), d_min.back()) - 0.5;
}

PseudoTrue DiscrepancyCurve::interpolate_pseudo_true(double theta) const {
  const std::size_t n = lambdas.size();
  if (n == 0 || theta < lambdas.front() || theta > lambdas.back())
    throw Error(ErrorKind::out_of_domain, "theta=" + std::to_string(theta) + " outside the curve span");
  if (n == 1) return pseudo_true.front();
  std::size_t i = static_cast<std::size_t>(std::upper_bound(lambdas.begin(), lambdas.end(), theta) - lambdas.begin());
  i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
  const double x0 = lambdas[i], x1 = lambdas[i + 1];
  const double h = x1 - x0;
  const double t = (theta - x0) / h;
  // Cubic Hermite with finite-difference slopes.
  auto slope = [&](std::size_t k, auto get) {
    if (k == 0) return (get(1) - get(0)) / (lambdas[1] - lambdas[0]);
    if (k == n - 1) return (get(n - 1) - get(n - 2)) / (lambdas[n - 1] - lambdas[n - 2]);
    return (get(k + 1) - get(k - 1)) / (lambdas[k + 1] - lambdas[k - 1]);
  };
  auto hermite = [&](auto get) {
    const double y0 = get(i), y1 = get(i + 1);
    const double m0 = slope(i, get) * h, m1 = slope(i + 1, get) * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
  };
  const double mu = hermite([&](std::size_t k) { return pseudo_true[k].mu; });
  const double log_sigma = hermite([&](std::size_t k) { return std::log(pseudo_true[k].sigma); });
  return {mu, std::exp(log_sigma)};
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t nodes) {
  if (nodes < 2 || !(hi > lo)) throw Error(ErrorKind::invalid_argument, "grid needs hi > lo and at least two nodes");
  std::vector<double> g(nodes);
  for (std::size_t i = 0; i < nodes; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(nodes - 1);
  // Snap the node nearest zero so symmetric grids contain 0 exactly.
  for (double& v : g)
    if (std::fabs(v) < 1e-12 * (hi - lo)) v = 0.0;
  return g;
}

std::vector<double> default_grid(Family family) {
  return family == Family::skew_symmetric ? uniform_grid(-30.0, 30.0, 241) : uniform_grid(-3.0, 3.0, 121);
}

DiscrepancyCurve build_curve(Family family, const SymmetricBaseline& b, std::span<const double> grid,
                             const DiscrepancyOptions& options) {
  if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()))
    throw Error(ErrorKind::invalid_argument, "curve grid must be sorted and non-empty");
  const auto zero = std::find(grid.begin(), grid.end(), 0.0);
  if (zero == grid.end()) throw Error(ErrorKind::invalid_argument, "curve grid must contain 0");
  const std::size_t origin = static_cast<std::size_t>(zero - grid.begin());
  const std::size_t n = grid.size();

  DiscrepancyCurve curve;
  curve.family = family;
  curve.baseline = std::string(b.name);
  curve.lambdas.assign(grid.begin(), grid.end());
  curve.d_min.resize(n);
  curve.signed_values.resize(n);
  curve.pseudo_true.resize(n);

  auto store = [&](std::size_t i, const MinDiscrepancy& m) {
    curve.d_min[i] = m.value;
    curve.pseudo_true[i] = {m.mu_star, m.sigma_star};
    const double theta = grid[i];
    curve.signed_values[i] = theta > 0.0 ? m.value - 0.5 : (theta < 0.0 ? 0.5 - m.value : 0.0);
  };
  auto node = [&](std::size_t i, PseudoTrue warm) {
    try {
      return d_min(family, b, grid[i], warm, options);
    } catch (const Error& e) {
      throw Error(e.kind(), "curve node lambda=" + std::to_string(grid[i]) + ": " + e.what());
    }
  };

  store(origin, node(origin, PseudoTrue{0.0, 1.0}));
  const PseudoTrue seed = curve.pseudo_true[origin];
  auto march_up = [&] {
    PseudoTrue warm = seed;
    for (std::size_t i = origin + 1; i < n; ++i) {
      const auto m = node(i, warm);
      store(i, m);
      warm = {m.mu_star, m.sigma_star};
    }
  };
  auto march_down = [&] {
    PseudoTrue warm = seed;
    for (std::size_t i = origin; i-- > 0;) {
      const auto m = node(i, warm);
      store(i, m);
      warm = {m.mu_star, m.sigma_star};
    }
  };
  // The two directions touch disjoint nodes.
  auto lower = std::async(std::launch::async, march_down);
  march_up();
  lower.get();
  return curve;
}

void write_curve_csv(std::ostream& out, const DiscrepancyCurve& curve) {
  out << "lambda,d_min,signed,mu_star,sigma_star\n";
  out.precision(17);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << curve.lambdas[i] << ',' << curve.d_min[i] << ',' << curve.signed_values[i] << ','
        << curve.pseudo_true[i].mu << ',' << curve.pseudo_true[i].sigma << '\n';
  }
}

}  // namespace skewtest
