#include "skewtest/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "skewtest/error.hpp"

namespace skewtest {

namespace {

constexpr double kLog2 = std::numbers::ln2;
constexpr double kLog2Pi = 1.8378770664093453;

// Log-likelihood in (mu, eta = log sigma) at fixed lambda, with its gradient
// and the negated Hessian.
struct InnerEval {
  double ll = 0.0;
  double g_mu = 0.0, g_eta = 0.0;
  double h_mm = 0.0, h_me = 0.0, h_ee = 0.0;
};

InnerEval inner_eval(std::span<const double> x, const SymmetricBaseline& b, double lambda, double mu, double eta) {
  const double sigma = std::exp(eta);
  const double inv = 1.0 / sigma;
  double ll = 0.0, su = 0.0, suz = 0.0, sdu = 0.0, sduz = 0.0, sduz2 = 0.0;
  for (double xi : x) {
    const double z = (xi - mu) * inv;
    const double w = b.omega(z);
    const double t = lambda * w;
    ll += b.log_pdf(z) + b.log_skew_cdf(t);
    double u = b.dlog_pdf(z);
    double du = b.d2log_pdf(z);
    if (lambda != 0.0) {
      const double r = b.dlog_skew_cdf(t);
      const double dw = b.domega(z);
      u += lambda * dw * r;
      du += lambda * b.d2omega(z) * r + lambda * lambda * dw * dw * b.d2log_skew_cdf(t);
    }
    su += u;
    suz += u * z;
    sdu += du;
    sduz += du * z;
    sduz2 += du * z * z;
  }
  const double n = static_cast<double>(x.size());
  InnerEval e;
  e.ll = ll + n * (kLog2 - eta);
  e.g_mu = -su * inv;
  e.g_eta = -n - suz;
  e.h_mm = -sdu * inv * inv;
  e.h_me = -(sduz + su) * inv;
  e.h_ee = -(sduz2 + suz);
  return e;
}

struct HermiteRule {
  std::vector<double> t, w;
};

double inner_loglik(std::span<const double> x, const SymmetricBaseline& b, double lambda, double mu, double eta) {
  const double inv = std::exp(-eta);
  double ll = 0.0;
  for (double xi : x) {
    const double z = (xi - mu) * inv;
    ll += b.log_pdf(z) + b.log_skew_cdf(lambda * b.omega(z));
  }
  return ll + static_cast<double>(x.size()) * (kLog2 - eta);
}

// Gauss-Hermite rule for int exp(-t^2) f(t) dt: Newton iteration on the
// orthonormal three-term recurrence, roots seeded by the usual asymptotics.
HermiteRule hermite_rule(int k) {
  HermiteRule rule;
  rule.t.assign(k, 0.0);
  rule.w.assign(k, 0.0);
  const double pim4 = 0.7511255444649425;  // pi^(-1/4)
  double z = 0.0;
  for (int i = 0; i < (k + 1) / 2; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * k + 1.0) - 1.85575 * std::pow(2.0 * k + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z -= 1.14 * std::pow(k, 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * rule.t[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * rule.t[1];
    else
      z = 2.0 * z - rule.t[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= k; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * k) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
    }
    rule.t[i] = z;
    rule.t[k - 1 - i] = -z;
    rule.w[i] = rule.w[k - 1 - i] = 2.0 / (pp * pp);
  }
  return rule;
}

int auto_points(int requested, std::size_t n) {
  if (requested > 0) return requested;
  return n <= 60 ? 7 : 3;
}

const HermiteRule& cached_rule(int k) {
  static const std::vector<HermiteRule> rules = [] {
    std::vector<HermiteRule> r;
    for (int j = 1; j <= 32; ++j) r.push_back(hermite_rule(j));
    return r;
  }();
  if (k < 1 || k > 32) throw Error(ErrorKind::invalid_argument, "inner_points must lie in [1, 32]");
  return rules[k - 1];
}

LambdaProfile::Node solve_inner(std::span<const double> x, const SymmetricBaseline& b, double lambda, double mu,
                                double eta, const HermiteRule& rule) {
  LambdaProfile::Node node;
  node.lambda = lambda;
  InnerEval e = inner_eval(x, b, lambda, mu, eta);
  if (!std::isfinite(e.ll)) return node;
  for (int iter = 0; iter < 200; ++iter) {
    // Damped Newton: shift the curvature until it is positive definite.
    double tau = 0.0;
    double dmu = 0.0, deta = 0.0;
    for (int k = 0; k < 60; ++k) {
      const double a = e.h_mm + tau, c = e.h_ee + tau, bb = e.h_me;
      const double det = a * c - bb * bb;
      if (a > 0.0 && det > 0.0) {
        dmu = (c * e.g_mu - bb * e.g_eta) / det;
        deta = (a * e.g_eta - bb * e.g_mu) / det;
        break;
      }
      tau = tau == 0.0 ? 1e-6 * (std::fabs(e.h_mm) + std::fabs(e.h_ee) + 1.0) : tau * 10.0;
    }
    const double decrement = dmu * e.g_mu + deta * e.g_eta;
    if (!(decrement >= 0.0)) return node;
    if (decrement < 1e-13 && tau == 0.0) break;
    double step = 1.0;
    bool moved = false;
    for (int half = 0; half < 50; ++half, step *= 0.5) {
      const InnerEval trial = inner_eval(x, b, lambda, mu + step * dmu, eta + step * deta);
      if (std::isfinite(trial.ll) && trial.ll >= e.ll - 1e-12 * std::fabs(e.ll)) {
        mu += step * dmu;
        eta += step * deta;
        e = trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    if (iter == 199) return node;
  }
  const double det = e.h_mm * e.h_ee - e.h_me * e.h_me;
  if (!(e.h_mm > 0.0 && det > 0.0)) return node;
  node.mu = mu;
  node.eta = eta;
  node.loglik = e.ll;
  node.log_integral = e.ll + kLog2Pi - 0.5 * std::log(det);
  if (rule.t.size() > 1) {
    // Product rule on the Gaussian fitted at the mode: theta = mode + sqrt(2) L t
    // with L L^T the inverse curvature.
    const double s11 = e.h_ee / det, s21 = -e.h_me / det, s22 = e.h_mm / det;
    const double l11 = std::sqrt(s11), l21 = s21 / l11, l22 = std::sqrt(s22 - l21 * l21);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.t.size(); ++i)
      for (std::size_t j = 0; j < rule.t.size(); ++j) {
        const double ti = rule.t[i], tj = rule.t[j];
        const double dm = std::numbers::sqrt2 * l11 * ti;
        const double de = std::numbers::sqrt2 * (l21 * ti + l22 * tj);
        const double d = inner_loglik(x, b, lambda, mu + dm, eta + de) - e.ll;
        if (std::isfinite(d)) sum += rule.w[i] * rule.w[j] * std::exp(ti * ti + tj * tj + d);
      }
    if (sum > 0.0 && std::isfinite(sum) && l22 > 0.0)
      node.log_integral = e.ll + std::log(2.0 * l11 * l22 * sum);
  }
  node.ok = std::isfinite(node.log_integral);
  return node;
}

double sample_mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double centered_ss(std::span<const double> x) {
  const double m = sample_mean(x);
  double a = 0.0;
  for (double v : x) a += (v - m) * (v - m);
  return a;
}

// Start of the inner problem at lambda = 0.
std::pair<double, double> null_start(std::span<const double> x) {
  const double a = centered_ss(x);
  return {sample_mean(x), 0.5 * std::log(std::max(a / static_cast<double>(x.size()), 1e-300))};
}

double safe_log_prior(const PriorSpec* prior, double lambda) {
  return prior ? log_prior_density(*prior, lambda) : 0.0;
}

}  // namespace

std::string_view to_string(Engine engine) {
  return engine == Engine::laplace ? "laplace" : "ila";
}

Engine engine_from_string(std::string_view name) {
  if (name == "laplace") return Engine::laplace;
  if (name == "ila") return Engine::ila;
  throw Error(ErrorKind::invalid_argument, "unknown engine '" + std::string(name) + "'");
}

std::string_view to_string(NullPriorScale scale) {
  return scale == NullPriorScale::sigma_scale ? "sigma" : "variance";
}

NullPriorScale null_prior_scale_from_string(std::string_view name) {
  if (name == "sigma") return NullPriorScale::sigma_scale;
  if (name == "variance") return NullPriorScale::variance_scale;
  throw Error(ErrorKind::invalid_argument, "unknown null prior scale '" + std::string(name) + "'");
}

void Dataset::validate() const {
  if (values.size() < 3)
    throw Error(ErrorKind::insufficient_data,
                "dataset '" + label + "' has " + std::to_string(values.size()) + " values; at least 3 are needed");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw Error(ErrorKind::degenerate_data, "non-finite value at position " + std::to_string(i));
}

double posterior_probability(double log_bf, double log_prior_odds) {
  const double t = log_bf + log_prior_odds;
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double loglik_skew(const Dataset& data, const SymmetricBaseline& b, double mu, double sigma, double lambda) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorKind::invalid_argument, "sigma must be positive");
  return inner_loglik(data.values, b, lambda, mu, std::log(sigma));
}

double log_marginal_null_closed(const Dataset& data) {
  const std::size_t n = data.size();
  if (n < 2) throw Error(ErrorKind::insufficient_data, "closed-form null marginal needs n >= 2");
  const double a = centered_ss(data.values);
  if (!(a > 0.0)) throw Error(ErrorKind::degenerate_data, "zero sample variance");
  const double nm1 = static_cast<double>(n) - 1.0;
  return -0.5 * nm1 * std::log(std::numbers::pi) - 0.5 * std::log(static_cast<double>(n)) - kLog2 +
         std::lgamma(0.5 * nm1) - 0.5 * nm1 * std::log(a);
}

double laplace_log_marginal(const ModelFit& fit) {
  const std::size_t d = fit.hessian.size();
  if (d == 0) return fit.log_target_at_mode;
  return fit.log_target_at_mode + 0.5 * static_cast<double>(d) * kLog2Pi - 0.5 * log_det_spd(fit.hessian);
}

LambdaProfile::LambdaProfile(const Dataset& data, const SymmetricBaseline& baseline, const IlaOptions& options)
    : data_(&data), baseline_(&baseline), options_(options) {
  data.validate();
  const double bound = options.lambda_bound;
  const int per_side = std::max(options.coarse_per_side, 4);
  constexpr double alpha = 4.0;

  std::vector<Node> coarse(2 * per_side + 1);
  const auto [mu0, eta0] = null_start(data.values);
  const HermiteRule& rule = cached_rule(auto_points(options.inner_points, data.size()));
  coarse[per_side] = solve_inner(data.values, baseline, 0.0, mu0, eta0, rule);
  for (int dir : {1, -1}) {
    double mu = coarse[per_side].ok ? coarse[per_side].mu : mu0;
    double eta = coarse[per_side].ok ? coarse[per_side].eta : eta0;
    for (int j = 1; j <= per_side; ++j) {
      const double lam = dir * bound * std::sinh(alpha * j / per_side) / std::sinh(alpha);
      Node& node = coarse[per_side + dir * j];
      node = solve_inner(data.values, baseline, lam, mu, eta, rule);
      if (node.ok) {
        mu = node.mu;
        eta = node.eta;
      }
    }
  }

  double lmax = -std::numeric_limits<double>::infinity();
  for (const auto& c : coarse)
    if (c.ok) lmax = std::max(lmax, c.log_integral);
  if (!std::isfinite(lmax)) throw Error(ErrorKind::evaluation_failed, "every profile node failed");
  int first = -1, last = -1;
  for (int i = 0; i < static_cast<int>(coarse.size()); ++i) {
    if (coarse[i].ok && coarse[i].log_integral >= lmax - options.central_drop) {
      if (first < 0) first = i;
      last = i;
    }
  }
  const double lo = coarse[std::max(first - 1, 0)].lambda;
  const double hi = coarse[std::min(last + 1, static_cast<int>(coarse.size()) - 1)].lambda;

  std::vector<double> fine;
  const int central =
      std::max(options.min_central_nodes, static_cast<int>(std::ceil((hi - lo) / options.max_spacing)) + 1);
  for (int i = 0; i < central; ++i) fine.push_back(lo + (hi - lo) * i / (central - 1.0));
  // Geometric spacing from the central region out to the box edge.
  constexpr double ratio = 1.3;
  const double denom = std::pow(ratio, options.tail_nodes) - 1.0;
  for (int k = 1; k <= options.tail_nodes; ++k) {
    const double frac = (std::pow(ratio, k) - 1.0) / denom;
    if (lo > -bound) fine.push_back(lo - (lo + bound) * frac);
    if (hi < bound) fine.push_back(hi + (bound - hi) * frac);
  }

  nodes_ = coarse;
  for (double lam : fine) {
    const Node* warm = nullptr;
    for (const auto& c : coarse)
      if (c.ok && (!warm || std::fabs(c.lambda - lam) < std::fabs(warm->lambda - lam))) warm = &c;
    nodes_.push_back(solve_inner(data.values, baseline, lam, warm->mu, warm->eta, rule));
  }
  std::sort(nodes_.begin(), nodes_.end(), [](const Node& a, const Node& b) { return a.lambda < b.lambda; });
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end(),
                           [](const Node& a, const Node& b) { return std::fabs(a.lambda - b.lambda) < 1e-12; }),
               nodes_.end());
}

LambdaProfile::Node LambdaProfile::evaluate(double lambda) const {
  const Node* warm = nullptr;
  for (const auto& c : nodes_)
    if (c.ok && (!warm || std::fabs(c.lambda - lambda) < std::fabs(warm->lambda - lambda))) warm = &c;
  if (!warm) throw Error(ErrorKind::evaluation_failed, "profile has no valid nodes");
  return solve_inner(data_->values, *baseline_, lambda, warm->mu, warm->eta, cached_rule(auto_points(options_.inner_points, data_->size())));
}

ModelFit LambdaProfile::fit(const PriorSpec* prior) const {
  const double bound = options_.lambda_bound;
  auto target = [&](const Node& n) { return n.ok ? n.loglik + safe_log_prior(prior, n.lambda) : -INFINITY; };

  std::vector<std::size_t> seeds;
  auto best_index = [&](auto score) {
    std::size_t best = nodes_.size();
    double value = -INFINITY;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double s = score(nodes_[i]);
      if (s > value) {
        value = s;
        best = i;
      }
    }
    return best;
  };
  const std::size_t top = best_index(target);
  if (top == nodes_.size()) throw Error(ErrorKind::fitting_failed, "no finite value of the log target");
  seeds.push_back(top);
  if (prior && is_non_local(*prior)) {
    // The zero of the prior at lambda = 0 splits the posterior in two; seed
    // from the MLE and from both sides.
    seeds.push_back(best_index([](const Node& n) { return n.ok ? n.loglik : -INFINITY; }));
    for (double s : {-1.0, 1.0})
      seeds.push_back(best_index([&](const Node& n) { return n.ok ? -std::fabs(n.lambda - s) : -INFINITY; }));
  }

  double best_lambda = nodes_[top].lambda;
  double best_value = target(nodes_[top]);
  Node best_node = nodes_[top];
  for (std::size_t s : seeds) {
    const double a = nodes_[s > 0 ? s - 1 : s].lambda;
    const double c = nodes_[std::min(s + 1, nodes_.size() - 1)].lambda;
    if (!(c > a)) continue;
    auto objective = [&](double lam) {
      const Node n = evaluate(lam);
      const double v = target(n);
      return std::isfinite(v) ? -v : 1e300;
    };
    std::uintmax_t iters = 200;
    const auto [lam, neg] = boost::math::tools::brent_find_minima(objective, a, c, 40, iters);
    if (-neg > best_value) {
      const Node n = evaluate(lam);
      if (n.ok) {
        best_value = -neg;
        best_lambda = lam;
        best_node = n;
      }
    }
  }

  ModelFit fit;
  fit.mode_kind = prior ? ModeKind::map : ModeKind::mle;
  fit.params = {best_node.mu, std::exp(best_node.eta), best_lambda};
  fit.loglik_at_mode = best_node.loglik;
  fit.log_target_at_mode = best_node.loglik + safe_log_prior(prior, best_lambda);
  fit.lambda_at_bound = std::fabs(best_lambda) >= bound - 1e-6;
  const auto& x = data_->values;
  const auto& b = *baseline_;
  VectorFn neg_target = [&](std::span<const double> p) {
    return -(inner_loglik(x, b, p[2], p[0], p[1]) + safe_log_prior(prior, p[2]));
  };
  const std::vector<double> at = {best_node.mu, best_node.eta, best_lambda};
  try {
    fit.hessian = hessian_fd(neg_target, at);
  } catch (const Error&) {
    fit.hessian = Matrix();
  }
  return fit;
}

double LambdaProfile::log_marginal(const PriorSpec& prior) const {
  // A prior much narrower than the node spacing gets its own grid.
  if (const auto* local = std::get_if<LocalNormal>(&prior); local && 12.0 * local->sd < options_.max_spacing * 40.0) {
    const int count = options_.min_central_nodes;
    const double half = 12.0 * local->sd;
    std::vector<double> terms;
    for (int i = 0; i < count; ++i) {
      const double l = -half + 2.0 * half * i / (count - 1);
      const Node n = evaluate(l);
      if (!n.ok) continue;
      const double w = (i == 0 || i == count - 1 ? 0.5 : 1.0) * 2.0 * half / (count - 1);
      terms.push_back(n.log_integral + log_prior_density(prior, l) + std::log(w));
    }
    const double v = log_sum_exp(terms);
    if (!std::isfinite(v)) throw Error(ErrorKind::evaluation_failed, "integrated Laplace sum is not finite");
    return v;
  }
  std::vector<const Node*> ok;
  for (const auto& n : nodes_)
    if (n.ok) ok.push_back(&n);
  if (ok.size() < 2) throw Error(ErrorKind::evaluation_failed, "fewer than two profile nodes succeeded");
  std::vector<double> terms;
  terms.reserve(ok.size() + 2);
  for (std::size_t i = 0; i < ok.size(); ++i) {
    const double left = i > 0 ? ok[i - 1]->lambda : ok[i]->lambda;
    const double right = i + 1 < ok.size() ? ok[i + 1]->lambda : ok[i]->lambda;
    const double w = 0.5 * (right - left);
    terms.push_back(ok[i]->log_integral + log_prior_density(prior, ok[i]->lambda) + std::log(w));
  }
  // Mass beyond the box, carried at the boundary value of the profile.
  const double bound = options_.lambda_bound;
  if (ok.front()->lambda <= -bound + 1e-9) terms.push_back(ok.front()->log_integral + std::log(prior_upper_tail(prior, bound)));
  if (ok.back()->lambda >= bound - 1e-9) terms.push_back(ok.back()->log_integral + std::log(prior_upper_tail(prior, bound)));
  const double v = log_sum_exp(terms);
  if (!std::isfinite(v)) throw Error(ErrorKind::evaluation_failed, "integrated Laplace sum is not finite");
  return v;
}

ModelFit fit_null(const Dataset& data, const SymmetricBaseline& baseline) {
  data.validate();
  const auto [mu0, eta0] = null_start(data.values);
  if (!std::isfinite(eta0) || centered_ss(data.values) <= 0.0)
    throw Error(ErrorKind::degenerate_data, "zero sample variance");
  const auto node = solve_inner(data.values, baseline, 0.0, mu0, eta0, cached_rule(1));
  if (!node.ok) throw Error(ErrorKind::fitting_failed, "null model fit failed");
  const InnerEval e = inner_eval(data.values, baseline, 0.0, node.mu, node.eta);
  ModelFit fit;
  fit.mode_kind = ModeKind::mle;
  fit.params = {node.mu, std::exp(node.eta)};
  fit.loglik_at_mode = node.loglik;
  fit.log_target_at_mode = node.loglik;
  fit.hessian = Matrix(2);
  fit.hessian(0, 0) = e.h_mm;
  fit.hessian(0, 1) = fit.hessian(1, 0) = e.h_me;
  fit.hessian(1, 1) = e.h_ee;
  return fit;
}

ModelFit map_estimate(const Dataset& data, const SymmetricBaseline& baseline, const PriorSpec* prior) {
  if (!prior) {
    ModelFit fit = fit_null(data, baseline);
    fit.mode_kind = ModeKind::map;
    return fit;
  }
  return LambdaProfile(data, baseline).fit(prior);
}

ModelFit mle_skew(const Dataset& data, const SymmetricBaseline& baseline) {
  return LambdaProfile(data, baseline).fit(nullptr);
}

double ila_log_marginal(const Dataset& data, const SymmetricBaseline& baseline, const PriorSpec& prior,
                        const IlaOptions& options) {
  return LambdaProfile(data, baseline, options).log_marginal(prior);
}

double log_marginal_null(const Dataset& data, const SymmetricBaseline& baseline, NullPriorScale scale) {
  const double shift = scale == NullPriorScale::variance_scale ? kLog2 : 0.0;
  if (baseline.name == normal_baseline().name) return log_marginal_null_closed(data) + shift;
  return laplace_log_marginal(fit_null(data, baseline)) + shift;
}

TestResult bayes_test(const LambdaProfile& profile, const PriorSpec& prior, const BayesTestOptions& options) {
  const Dataset& data = profile.data();
  const SymmetricBaseline& b = profile.baseline();
  const double logn = std::log(static_cast<double>(data.size()));
  TestResult r;
  r.prior = std::string(kind_name(prior));
  r.engine = options.engine;
  r.null_scale = options.null_scale;
  r.fit_null = map_estimate(data, b, nullptr);
  r.mle_alt = profile.fit(nullptr);
  r.fit_alt = profile.fit(&prior);
  r.bic_null = 2.0 * logn - 2.0 * r.fit_null.loglik_at_mode;
  r.bic_alt = 3.0 * logn - 2.0 * r.mle_alt.loglik_at_mode;
  r.log_marg_null = log_marginal_null(data, b, options.null_scale);
  if (options.engine == Engine::laplace) {
    try {
      r.log_marg_alt = laplace_log_marginal(r.fit_alt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::curvature_error) throw;
      r.engine = Engine::ila;  // indefinite curvature at the mode
      r.log_marg_alt = profile.log_marginal(prior);
    }
  } else {
    r.log_marg_alt = profile.log_marginal(prior);
  }
  r.log_bf_10 = r.log_marg_alt - r.log_marg_null;
  r.post_prob_alt = posterior_probability(r.log_bf_10);
  return r;
}

TestResult bayes_test(const Dataset& data, const SymmetricBaseline& baseline, const PriorSpec& prior,
                      const BayesTestOptions& options) {
  const LambdaProfile profile(data, baseline, options.ila);
  return bayes_test(profile, prior, options);
}

nlohmann::json to_json(const ModelFit& fit) {
  nlohmann::json j;
  j["mu"] = fit.params.at(0);
  j["sigma"] = fit.params.at(1);
  if (fit.params.size() > 2) {
    j["lambda"] = fit.params[2];
    j["lambda_at_bound"] = fit.lambda_at_bound;
  }
  j["mode"] = fit.mode_kind == ModeKind::map ? "map" : "mle";
  j["loglik"] = fit.loglik_at_mode;
  j["log_target"] = fit.log_target_at_mode;
  return j;
}

nlohmann::json to_json(const TestResult& r) {
  nlohmann::json j;
  j["log_marg_null"] = r.log_marg_null;
  j["log_marg_alt"] = r.log_marg_alt;
  j["log_bf_10"] = r.log_bf_10;
  j["post_prob_alt"] = r.post_prob_alt;
  j["bic_null"] = r.bic_null;
  j["bic_alt"] = r.bic_alt;
  j["prior"] = r.prior;
  j["engine"] = to_string(r.engine);
  j["null_prior_scale"] = to_string(r.null_scale);
  j["params_null"] = to_json(r.fit_null);
  j["params_alt"] = to_json(r.fit_alt);
  j["params_alt_mle"] = to_json(r.mle_alt);
  return j;
}

}  // namespace skewtest
