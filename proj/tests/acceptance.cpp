// Acceptance run: one PASS/FAIL line per criterion. Optional arguments pick
// criteria by number, e.g. `acceptance 1 7`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <boost/math/distributions/skew_normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "oracles.hpp"
#include "skewtest/dataio.hpp"
#include "skewtest/discrepancy.hpp"
#include "skewtest/evidence.hpp"
#include "skewtest/kernels.hpp"
#include "skewtest/priors.hpp"
#include "skewtest/simulation.hpp"

using namespace skewtest;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const MoominExactContext& exact_context() {
  static const MoominExactContext ctx(Family::skew_symmetric, normal_baseline(), default_grid(Family::skew_symmetric));
  return ctx;
}

PriorSpec exact_prior() {
  return normalize(MoominExact{std::shared_ptr<const MoominExactContext>(&exact_context(), [](const MoominExactContext*) {}), 0.0});
}

Outcome discrepancy_endpoints() {
  const double d0 = d_min(Family::skew_symmetric, normal_baseline(), 0.0).value;
  const double dp = d_min(Family::skew_symmetric, normal_baseline(), 30.0).value;
  const double dm = d_min(Family::skew_symmetric, normal_baseline(), -30.0).value;
  const bool ok = std::fabs(d0 - 0.5) <= 1e-6 && std::fabs(dp - 0.5417) <= 1e-3 && std::fabs(dm - 0.5417) <= 1e-3;
  std::ostringstream s;
  s.precision(7);
  s << "D(0) = " << d0 << ", D(30) = " << dp << ", D(-30) = " << dm << ", limit " << d_min_limit(normal_baseline()).value;
  return {ok, s.str()};
}

Outcome moomin_structure() {
  const auto& c = exact_context();
  bool ok = c.unnormalized(0.0) == 0.0;
  double worst_sym = 0.0, worst_env = 0.0;
  for (double l : uniform_grid(-10.0, 10.0, 41)) {
    if (l == 0.0) continue;
    const double env = c.unnormalized(l, MoominMethod::envelope);
    worst_sym = std::max(worst_sym, std::fabs(env - c.unnormalized(-l)) / env);
    const double fd = c.unnormalized(l, MoominMethod::curve_derivative);
    worst_env = std::max(worst_env, std::fabs(env - fd) / env);
  }
  const double ratio = 900.0 * c.unnormalized(30.0) / (400.0 * c.unnormalized(20.0));
  ok = ok && worst_sym <= 1e-6 && worst_env <= 1e-4 && ratio >= 0.8 && ratio <= 1.25;
  std::ostringstream s;
  s << "pi(0) = " << c.unnormalized(0.0) << ", symmetry " << worst_sym << ", ratio " << ratio << ", envelope vs derivative "
    << worst_env;
  return {ok, s.str()};
}

Outcome rate_fit() {
  const auto r = fit_vanishing_rate(exact_context(), 0.5);
  return {r.nearest_even == 4, "slope " + fmt("%.4f", r.slope) + ", nearest even " + std::to_string(r.nearest_even)};
}

Outcome dimom_mass() {
  const PriorSpec p = normalize(Dimom{1.69});
  const double m = oracle::gk([&](double l) { return prior_density(p, l); }, -1.0, 1.0, 1e-12);
  return {std::fabs(m - 0.05) <= 0.01, "mass on |lambda| <= 1: " + fmt("%.5f", m)};
}

Outcome null_oracle() {
  std::mt19937_64 rng(515);
  std::normal_distribution<double> z;
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const std::size_t n = k % 2 ? 20 : 5;
    Dataset d;
    for (std::size_t i = 0; i < n; ++i) d.values.push_back(3.0 + 2.0 * z(rng));
    worst = std::max(worst, std::fabs(log_marginal_null_closed(d) - oracle::null_log_marginal_2d(d.values)));
  }
  return {worst <= 1e-6, "max |closed - quadrature| = " + fmt("%.2e", worst)};
}

Outcome ila_oracle() {
  const std::vector<PriorSpec> priors = {normalize(JeffreysT{}), normalize(MoominApprox{}), normalize(Dimom{}), exact_prior()};
  struct Case {
    std::size_t n;
    double lambda;
    std::uint64_t seed;
  };
  double worst = 0.0;
  std::ostringstream s;
  for (const Case c : {Case{20, 0.0, 1}, Case{20, 2.5, 2}, Case{30, 1.0, 3}, Case{30, 2.5, 4}}) {
    const Dataset d{sample_skew({&normal_baseline(), 0.0, 1.0, c.lambda}, c.n, c.seed), "oracle"};
    const auto brute = oracle::alt_log_marginal_3d(d, priors);
    const LambdaProfile profile(d, normal_baseline());
    double case_worst = 0.0;
    for (std::size_t i = 0; i < priors.size(); ++i)
      case_worst = std::max(case_worst, std::fabs(profile.log_marginal(priors[i]) - brute.log_marginals[i]));
    s << "n=" << c.n << ",lambda=" << c.lambda << ": " << fmt("%.4f", case_worst) << "; ";
    worst = std::max(worst, case_worst);
  }
  s << "max " << fmt("%.4f", worst);
  return {worst <= 0.1, s.str()};
}

Outcome real_data() {
  const Dataset full = load_column(std::string(SKEWTEST_DATA_DIR) + "/ais_female_bmi.csv", ColumnRef{"bmi"});
  const auto outliers = mad_outliers(full);
  const Dataset trimmed = remove_indices(full, outliers.indices);
  bool ok = full.size() == 100 && outliers.indices.size() == 1 && outliers.flagged_values[0] > 30.0;
  std::ostringstream s;
  s.precision(4);
  auto check = [&](const Dataset& d, double bic_alt, double bic_null, const std::vector<double>& pp) {
    const LambdaProfile profile(d, normal_baseline());
    const char* names[] = {"jeffreys", "dimom", "moomin"};
    s << "n=" << d.size() << ":";
    for (int i = 0; i < 3; ++i) {
      const auto r = bayes_test(profile, prior_from_name(names[i]));
      ok = ok && std::fabs(r.post_prob_alt - pp[i]) <= 0.03;
      if (i == 0) {
        ok = ok && std::fabs(r.bic_alt - bic_alt) <= 0.1 && std::fabs(r.bic_null - bic_null) <= 0.1;
        s << " BIC " << std::fixed << std::setprecision(2) << r.bic_alt << "/" << r.bic_null << " P";
      }
      s << " " << std::setprecision(3) << r.post_prob_alt;
    }
    s << "; ";
  };
  check(full, 484.82, 486.15, {0.52, 0.73, 0.52});
  check(trimmed, 469.62, 466.89, {0.23, 0.25, 0.11});
  return {ok, s.str()};
}

double cell_median(const SimResult& r, double lambda, const std::string& prior) {
  for (const auto& c : r.summary)
    if (c.true_lambda == lambda && c.prior == prior) return c.median;
  return NAN;
}

Outcome simulation_ordering() {
  SimConfig cfg;
  cfg.sample_sizes = {100};
  cfg.lambdas = {0.0, 2.5};
  cfg.replications = 200;
  const auto r = run_experiment(cfg);
  const double j0 = cell_median(r, 0.0, "jeffreys"), d0 = cell_median(r, 0.0, "dimom"), m0 = cell_median(r, 0.0, "moomin");
  const double j1 = cell_median(r, 2.5, "jeffreys"), d1 = cell_median(r, 2.5, "dimom"), m1 = cell_median(r, 2.5, "moomin");
  const bool null_ok = m0 <= d0 && d0 <= j0;
  const bool alt_ok = j1 > 0.5 && d1 > 0.5 && m1 > 0.5;
  std::ostringstream s;
  s.precision(4);
  s << "lambda=0 medians moomin " << m0 << " dimom " << d0 << " jeffreys " << j0 << (null_ok ? " (ordered)" : " (NOT ordered)")
    << "; lambda=2.5 medians jeffreys " << j1 << " dimom " << d1 << " moomin " << m1
    << (alt_ok ? " (all > 0.5)" : " (NOT all > 0.5)") << "; failures " << r.failures;
  return {null_ok && alt_ok, s.str()};
}

Outcome rate_ordering() {
  SimConfig cfg;
  cfg.sample_sizes = {50, 100, 200, 500};
  cfg.replications = 500;
  const auto study = rate_study(cfg);
  double jeff = NAN, dimom = NAN, moomin = NAN;
  for (const auto& s : study.slopes) {
    if (s.prior == "jeffreys") jeff = s.slope;
    if (s.prior == "dimom") dimom = s.slope;
    if (s.prior == "moomin") moomin = s.slope;
  }
  const bool ok = moomin < dimom && dimom < jeff && jeff < 0.0;
  std::ostringstream s;
  s.precision(4);
  s << "slopes moomin " << moomin << " < dimom " << dimom << " < jeffreys " << jeff << " < 0";
  return {ok, s.str()};
}

// Kolmogorov-Smirnov distance of a sample against a density, the cdf
// accumulated piecewise between consecutive sorted draws.
double ks_against(std::vector<double> x, const std::function<double(double)>& pdf, double lower) {
  std::sort(x.begin(), x.end());
  std::vector<double> cdf(x.size());
  double acc = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(pdf, lower, x[0], 10, 1e-12);
  cdf[0] = acc;
  for (std::size_t i = 1; i < x.size(); ++i) {
    acc += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(pdf, x[i - 1], x[i], 0, 0);
    cdf[i] = acc;
  }
  return oracle::ks_distance(cdf);
}

Outcome kernel_suite() {
  const SymmetricBaseline* baselines[] = {&normal_baseline(), &logistic_baseline(), &sech_baseline()};
  const double inf = std::numeric_limits<double>::infinity();
  double worst_norm = 0.0;
  for (const auto* b : baselines) {
    for (double l : {-10.0, -2.0, 0.0, 0.5, 3.0, 30.0}) {
      const SkewSymmetricModel m{b, 0.4, 1.3, l};
      auto f = [&](double x) { return skew_pdf(m, x); };
      const double total = oracle::gk(f, -inf, 0.4, 1e-12) + oracle::gk(f, 0.4, inf, 1e-12);
      worst_norm = std::max(worst_norm, std::fabs(total - 1.0));
    }
    for (double e : {-1.5, 0.0, 0.7}) {
      const TwoPieceModel m{b, -0.2, 0.8, e};
      auto f = [&](double x) { return two_piece_pdf(m, x); };
      const double total = oracle::gk(f, -inf, -0.2, 1e-12) + oracle::gk(f, -0.2, inf, 1e-12);
      worst_norm = std::max(worst_norm, std::fabs(total - 1.0));
    }
  }

  // Dyadic points keep mu + d and mu - d exact, so equality must be exact.
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> grid(-6144, 6144);
  std::uniform_real_distribution<double> ul(-20.0, 20.0), us(0.1, 5.0);
  std::size_t reflection_failures = 0;
  for (const auto* b : baselines)
    for (int i = 0; i < 2000; ++i) {
      const double mu = grid(rng) / 1024.0, d = grid(rng) / 1024.0, sigma = us(rng), l = ul(rng);
      if (skew_pdf({b, mu, sigma, -l}, mu + d) != skew_pdf({b, mu, sigma, l}, mu - d)) ++reflection_failures;
    }

  double worst_ks = 0.0;
  {
    const auto x = sample_skew({&normal_baseline(), 0.0, 1.0, 2.5}, 100000, 77);
    const boost::math::skew_normal_distribution<double> sn(0.0, 1.0, 2.5);
    auto sorted = x;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cdf;
    for (double v : sorted) cdf.push_back(boost::math::cdf(sn, v));
    worst_ks = oracle::ks_distance(cdf);
  }
  for (const auto* b : {&logistic_baseline(), &sech_baseline()}) {
    const SkewSymmetricModel m{b, 0.0, 1.0, -1.5};
    worst_ks = std::max(worst_ks, ks_against(sample_skew(m, 100000, 78), [&](double t) { return skew_pdf(m, t); }, -200.0));
  }

  const auto a = sample_skew({&logistic_baseline(), 1.0, 2.0, 3.0}, 1000, 5);
  const auto b = sample_skew({&logistic_baseline(), 1.0, 2.0, 3.0}, 1000, 5);
  const bool deterministic = std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;

  const bool ok = worst_norm <= 1e-6 && reflection_failures == 0 && worst_ks < 0.01 && deterministic;
  std::ostringstream s;
  s << "normalisation " << fmt("%.1e", worst_norm) << ", reflection mismatches " << reflection_failures << ", KS "
    << fmt("%.4f", worst_ks) << ", deterministic " << (deterministic ? "yes" : "no");
  return {ok, s.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"discrepancy endpoints", discrepancy_endpoints},
      {"MOOMIN structural properties", moomin_structure},
      {"vanishing-rate fit", rate_fit},
      {"DIMOM calibration", dimom_mass},
      {"null marginal vs 2D quadrature", null_oracle},
      {"ILA vs 3D quadrature", ila_oracle},
      {"AIS female BMI reproduction", real_data},
      {"simulation ordering", simulation_ordering},
      {"rate ordering", rate_ordering},
      {"kernel suite", kernel_suite},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %2d  %-32s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", number, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
