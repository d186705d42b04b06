#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace skewtest {

/// A symmetric baseline density f together with the skewing pair (G, g) and
/// the odd transform omega that define a skew-symmetric family
///   s(x) = 2/sigma f(z) G(lambda omega(z)),  z = (x - mu)/sigma.
///
/// The log-derivative members feed the analytic score and curvature of the
/// log-likelihood; `draw` maps two uniforms to a draw from f.
struct SymmetricBaseline {
  std::string_view name;

  double (*pdf)(double);
  double (*cdf)(double);
  double (*quantile)(double);
  double (*log_pdf)(double);
  double (*dlog_pdf)(double);
  double (*d2log_pdf)(double);

  double (*skew_cdf)(double);        // G
  double (*skew_pdf)(double);        // g
  double (*log_skew_cdf)(double);    // log G
  double (*dlog_skew_cdf)(double);   // g / G
  double (*d2log_skew_cdf)(double);  // (log G)''

  double (*omega)(double);
  double (*domega)(double);
  double (*d2omega)(double);

  double (*draw)(double u1, double u2);
};

const SymmetricBaseline& normal_baseline();
const SymmetricBaseline& logistic_baseline();
const SymmetricBaseline& sech_baseline();

/// Looks up "normal", "logistic" or "sech"; throws invalid_argument otherwise.
const SymmetricBaseline& baseline_by_name(std::string_view name);

struct SkewSymmetricModel {
  const SymmetricBaseline* baseline = &normal_baseline();
  double mu = 0.0;
  double sigma = 1.0;
  double lambda = 0.0;
};

struct TwoPieceModel {
  const SymmetricBaseline* baseline = &normal_baseline();
  double mu = 0.0;
  double sigma = 1.0;
  double epsilon = 0.0;

  double sigma_left() const;   // sigma (1 + tanh(epsilon))
  double sigma_right() const;  // sigma (1 - tanh(epsilon))
};

double skew_pdf(const SkewSymmetricModel& model, double x);
double skew_log_pdf(const SkewSymmetricModel& model, double x);
double two_piece_pdf(const TwoPieceModel& model, double x);

// Baseline location-scale density (1/sigma) f((x - mu)/sigma).
double location_scale_pdf(const SymmetricBaseline& baseline, double mu, double sigma, double x);

/// Standard normal density and distribution function at x.
std::pair<double, double> normal_pdf_cdf(double x);
double normal_log_cdf(double x);
double normal_quantile(double p);

/// Deterministic accept-reflect sampler. Draw i depends only on (seed, i):
/// Z ~ f and U uniform; emit mu + sigma Z if U <= G(lambda omega(Z)), else
/// mu - sigma Z.
class SkewSampler {
 public:
  SkewSampler(const SkewSymmetricModel& model, std::uint64_t seed);

  double operator()(std::uint64_t index) const;

 private:
  SkewSymmetricModel model_;
  std::uint64_t key_;
};

std::vector<double> sample_skew(const SkewSymmetricModel& model, std::size_t n, std::uint64_t seed);

}  // namespace skewtest
