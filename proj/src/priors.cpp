#include "skewtest/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "skewtest/error.hpp"

namespace skewtest {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

DiscrepancyOptions precise_options() {
  DiscrepancyOptions o;
  o.quadrature.rel_tol = 1e-12;
  o.quadrature.abs_tol = 1e-16;
  o.quadrature.max_subdivisions = 20000;
  o.gradient_tol = 1e-13;
  o.newton_steps = 10;
  return o;
}

QuadratureConfig envelope_quadrature() {
  QuadratureConfig q;
  q.rel_tol = 1e-10;
  q.abs_tol = 1e-18;
  q.max_subdivisions = 20000;
  return q;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::invalid_argument, std::string(what) + " must be positive");
}

double log_moomin_approx_norm(const MoominApprox& p) {
  const double alpha = 0.5 * (p.k + 1.0);
  const double beta = p.m - alpha;
  return -alpha * std::log(p.a) + std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
}

double log_student_t(double df, double scale, double x) {
  const double z = x / scale;
  return std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) - 0.5 * std::log(df * std::numbers::pi) -
         std::log(scale) - 0.5 * (df + 1.0) * std::log1p(z * z / df);
}

}  // namespace

MoominExactContext::MoominExactContext(Family family, const SymmetricBaseline& baseline, std::vector<double> grid)
    : family_(family), baseline_(&baseline), precise_(precise_options()) {
  curve_ = build_curve(family, baseline, grid);
  init();
}

MoominExactContext::MoominExactContext(Family family, const SymmetricBaseline& baseline, DiscrepancyCurve curve)
    : family_(family), baseline_(&baseline), curve_(std::move(curve)), precise_(precise_options()) {
  if (curve_.size() < 2) throw Error(ErrorKind::invalid_argument, "exact MOOMIN needs a curve with at least two nodes");
  init();
}

void MoominExactContext::init() {
  if (!(span_lo() < 0.0 && span_hi() > 0.0))
    throw Error(ErrorKind::invalid_argument, "exact MOOMIN curve must straddle 0");
  tail_lo_ = unnormalized(span_lo()) * span_lo() * span_lo();
  tail_hi_ = unnormalized(span_hi()) * span_hi() * span_hi();
}

PseudoTrue MoominExactContext::pseudo_true(double lambda) const {
  return polish_pseudo_true(family_, *baseline_, lambda, curve_.interpolate_pseudo_true(lambda), precise_);
}

double MoominExactContext::unnormalized(double lambda, MoominMethod method) const {
  if (!(lambda >= span_lo() && lambda <= span_hi()))
    throw Error(ErrorKind::out_of_domain, "lambda=" + std::to_string(lambda) + " outside the MOOMIN curve span");
  // The symmetric member is its own projection, so the derivative vanishes.
  if (lambda == 0.0) return 0.0;
  if (method == MoominMethod::envelope)
    return envelope_derivative(family_, *baseline_, lambda, pseudo_true(lambda), envelope_quadrature());

  auto signed_curve = [&](double t) {
    const auto m = d_min(family_, *baseline_, t, curve_.interpolate_pseudo_true(t), precise_);
    return t > 0.0 ? m.value - 0.5 : (t < 0.0 ? 0.5 - m.value : 0.0);
  };
  double h = 0.01 * std::max(std::fabs(lambda), 0.5);
  h = std::min(h, 0.5 * std::min(lambda - span_lo(), span_hi() - lambda));
  if (!(h > 1e-6)) throw Error(ErrorKind::out_of_domain, "lambda too close to the curve end for differencing");
  // Richardson extrapolation of two central differences.
  const double d1 = derivative_central(signed_curve, lambda, h);
  const double d2 = derivative_central(signed_curve, lambda, 2.0 * h);
  return std::fabs((4.0 * d1 - d2) / 3.0);
}

double MoominExactContext::total_mass() const {
  const std::size_t n = curve_.size();
  const double inner = curve_.signed_values[n - 1] - curve_.signed_values[0];
  return inner + tail_hi_ / span_hi() + tail_lo_ / (-span_lo());
}

std::string_view kind_name(const PriorSpec& spec) {
  return std::visit(overloaded{
                        [](const MoominExact&) { return std::string_view("moomin_exact"); },
                        [](const MoominApprox&) { return std::string_view("moomin_approx"); },
                        [](const Dimom&) { return std::string_view("dimom"); },
                        [](const JeffreysT&) { return std::string_view("jeffreys_t"); },
                        [](const LocalNormal&) { return std::string_view("local_normal"); },
                    },
                    spec);
}

PriorSpec prior_from_name(std::string_view name, double jeffreys_scale, const SymmetricBaseline& baseline) {
  if (name == "jeffreys" || name == "jeffreys_t") return normalize(JeffreysT{.scale = jeffreys_scale});
  if (name == "dimom") return normalize(Dimom{});
  if (name == "moomin" || name == "moomin_approx") return normalize(MoominApprox{});
  if (name == "moomin-exact" || name == "moomin_exact") {
    auto ctx = std::make_shared<const MoominExactContext>(Family::skew_symmetric, baseline,
                                                          default_grid(Family::skew_symmetric));
    return normalize(MoominExact{std::move(ctx), 0.0});
  }
  throw Error(ErrorKind::invalid_argument, "unknown prior '" + std::string(name) + "'");
}

PriorSpec normalize(PriorSpec spec) {
  std::visit(overloaded{
                 [](MoominExact& p) {
                   if (!p.context) throw Error(ErrorKind::invalid_argument, "exact MOOMIN prior without a curve");
                   p.norm_const = p.context->total_mass();
                   require_positive(p.norm_const, "exact MOOMIN mass");
                 },
                 [](MoominApprox& p) {
                   require_positive(p.k, "k");
                   require_positive(p.m, "m");
                   require_positive(p.a, "a");
                   if (!(p.m > 0.5 * (p.k + 1.0)))
                     throw Error(ErrorKind::invalid_argument, "approximate MOOMIN needs m > (k + 1) / 2");
                   p.norm_const = std::exp(log_moomin_approx_norm(p));
                 },
                 [](Dimom& p) { require_positive(p.sigma_m, "sigma_M"); },
                 [](JeffreysT& p) {
                   require_positive(p.df, "df");
                   require_positive(p.scale, "scale");
                 },
                 [](LocalNormal& p) { require_positive(p.sd, "sd"); },
             },
             spec);
  return spec;
}

double log_prior_density(const PriorSpec& spec, double lambda) {
  if (!std::isfinite(lambda)) return kNegInf;
  return std::visit(
      overloaded{
          [&](const MoominExact& p) {
            const auto& c = *p.context;
            double v;
            if (lambda > c.span_hi())
              v = c.tail_coefficient_hi() / (lambda * lambda);
            else if (lambda < c.span_lo())
              v = c.tail_coefficient_lo() / (lambda * lambda);
            else
              v = c.unnormalized(lambda);
            return v > 0.0 ? std::log(v) - std::log(p.norm_const) : kNegInf;
          },
          [&](const MoominApprox& p) {
            if (lambda == 0.0) return kNegInf;
            return p.k * std::log(std::fabs(lambda)) - p.m * std::log1p(p.a * lambda * lambda) -
                   log_moomin_approx_norm(p);
          },
          [&](const Dimom& p) {
            if (lambda == 0.0) return kNegInf;
            const double s = p.sigma_m;
            return 2.0 * std::log(std::fabs(lambda)) - 0.5 * std::log(2.0 * std::numbers::pi) - 3.0 * std::log(s) -
                   0.5 * lambda * lambda / (s * s);
          },
          [&](const JeffreysT& p) { return log_student_t(p.df, p.scale, lambda); },
          [&](const LocalNormal& p) {
            const double z = lambda / p.sd;
            return -0.5 * z * z - std::log(p.sd) - 0.5 * std::log(2.0 * std::numbers::pi);
          },
      },
      spec);
}

double prior_density(const PriorSpec& spec, double lambda) {
  return std::exp(log_prior_density(spec, lambda));
}

double prior_upper_tail(const PriorSpec& spec, double a) {
  if (!(a >= 0.0)) throw Error(ErrorKind::invalid_argument, "tail bound must be non-negative");
  return std::visit(
      overloaded{
          [&](const MoominExact& p) {
            const auto& c = *p.context;
            if (a >= c.span_hi()) return c.tail_coefficient_hi() / a / p.norm_const;
            const std::size_t n = c.curve().size();
            // Mass of [a, hi] is M(hi) - M(a); M(a) from a fresh minimisation.
            const auto m = d_min(c.family(), c.baseline(), a, c.curve().interpolate_pseudo_true(a));
            const double inner = c.curve().signed_values[n - 1] - (a > 0.0 ? m.value - 0.5 : 0.0);
            return (inner + c.tail_coefficient_hi() / c.span_hi()) / p.norm_const;
          },
          [&](const MoominApprox& p) {
            const double alpha = 0.5 * (p.k + 1.0);
            const double beta = p.m - alpha;
            const double u = p.a * a * a;
            return 0.5 * boost::math::ibetac(alpha, beta, u / (1.0 + u));
          },
          [&](const Dimom& p) {
            const double z = a / p.sigma_m;
            const auto [pdf, cdf] = normal_pdf_cdf(-z);
            return z * pdf + cdf;  // int_z^inf u^2 phi(u) du
          },
          [&](const JeffreysT& p) {
            const double z = a / p.scale;
            return 0.5 * boost::math::ibeta(0.5 * p.df, 0.5, p.df / (p.df + z * z));
          },
          [&](const LocalNormal& p) { return normal_pdf_cdf(-a / p.sd).second; },
      },
      spec);
}

bool is_non_local(const PriorSpec& spec) {
  return std::holds_alternative<MoominExact>(spec) || std::holds_alternative<MoominApprox>(spec) ||
         std::holds_alternative<Dimom>(spec);
}

void write_prior_csv(std::ostream& out, const PriorSpec& spec, std::span<const double> grid) {
  out << "lambda,density\n";
  out.precision(17);
  for (double l : grid) out << l << ',' << prior_density(spec, l) << '\n';
}

nlohmann::json to_json(const PriorSpec& spec) {
  nlohmann::json j;
  j["kind"] = kind_name(spec);
  std::visit(overloaded{
                 [&](const MoominExact& p) {
                   const auto& c = *p.context;
                   j["family"] = to_string(c.family());
                   j["baseline"] = c.baseline().name;
                   j["grid_min"] = c.span_lo();
                   j["grid_max"] = c.span_hi();
                   j["nodes"] = c.curve().size();
                   j["norm_const"] = p.norm_const;
                 },
                 [&](const MoominApprox& p) {
                   j["k"] = p.k;
                   j["m"] = p.m;
                   j["a"] = p.a;
                   j["norm_const"] = p.norm_const;
                 },
                 [&](const Dimom& p) { j["sigma_M"] = p.sigma_m; },
                 [&](const JeffreysT& p) {
                   j["df"] = p.df;
                   j["scale"] = p.scale;
                 },
                 [&](const LocalNormal& p) { j["sd"] = p.sd; },
             },
             spec);
  return j;
}

PriorSpec prior_from_json(const nlohmann::json& doc) {
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "moomin_approx")
      return normalize(MoominApprox{doc.value("k", 4.0), doc.value("m", 3.0), doc.value("a", 0.28), 0.0});
    if (kind == "dimom") return normalize(Dimom{doc.value("sigma_M", 1.69)});
    if (kind == "jeffreys_t") return normalize(JeffreysT{doc.value("df", 0.5), doc.value("scale", std::numbers::pi / 2)});
    if (kind == "local_normal") return normalize(LocalNormal{doc.value("sd", 1e-3)});
    if (kind == "moomin_exact") {
      const Family family = family_from_string(doc.value("family", std::string("skew")));
      const auto& base = baseline_by_name(doc.value("baseline", std::string("normal")));
      const auto fallback = default_grid(family);
      const auto grid = uniform_grid(doc.value("grid_min", fallback.front()), doc.value("grid_max", fallback.back()),
                                     doc.value("nodes", fallback.size()));
      return normalize(MoominExact{std::make_shared<const MoominExactContext>(family, base, grid), 0.0});
    }
    throw Error(ErrorKind::schema_error, "unknown prior kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::schema_error, std::string("prior document: ") + e.what());
  }
}

RateFit fit_vanishing_rate(const std::function<double(double)>& density, double halfwidth,
                           const RateFitOptions& options) {
  if (!(halfwidth > 0.0) || !(options.spacing > 0.0))
    throw Error(ErrorKind::invalid_argument, "rate fit needs a positive halfwidth and spacing");
  std::vector<double> xs, ys, lam, val;
  const auto kmax = static_cast<long>(std::floor(halfwidth / options.spacing + 1e-9));
  for (long k = -kmax; k <= kmax; ++k) {
    const double l = static_cast<double>(k) * options.spacing;
    if (k == 0 || std::fabs(l) < options.exclude_below) continue;
    const double v = density(l);
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::evaluation_failed, "density not positive at lambda=" + std::to_string(l));
    lam.push_back(std::fabs(l));
    val.push_back(v);
    xs.push_back(std::log(std::fabs(l)));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 5)
    throw Error(ErrorKind::invalid_argument,
                "neighbourhood holds " + std::to_string(xs.size()) + " usable nodes; at least 5 are needed");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::invalid_argument, "rate fit needs distinct |lambda| values");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.nodes = xs.size();
  fit.nearest_even = 2 * static_cast<int>(std::lround(fit.slope / 2.0));

  double best = std::numeric_limits<double>::infinity();
  for (int p = 2; p <= 12; p += 2) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
      const double b = std::pow(lam[i], p);
      num += val[i] * b;
      den += b * b;
    }
    const double c = num / den;
    double rss = 0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
      const double r = val[i] - c * std::pow(lam[i], p);
      rss += r * r;
    }
    if (rss < best) {
      best = rss;
      fit.best_even_power = p;
    }
  }
  return fit;
}

RateFit fit_vanishing_rate(const MoominExactContext& context, double halfwidth, const RateFitOptions& options) {
  return fit_vanishing_rate([&](double l) { return context.unnormalized(l); }, halfwidth, options);
}

}  // namespace skewtest
