#include "skewtest/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "skewtest/error.hpp"
#include "skewtest/random.hpp"

namespace skewtest {

using std::numbers::pi;

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

// log(1 + e^{-|t|}) + |t|, i.e. log(e^t + e^{-t}) without overflow.
double log_two_cosh(double t) {
  const double a = std::fabs(t);
  return a + std::log1p(std::exp(-2.0 * a));
}

// ---- normal -----------------------------------------------------------------

double n_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double n_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double n_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }
double n_dlog_pdf(double x) { return -x; }
double n_d2log_pdf(double) { return -1.0; }

double n_log_cdf(double x) {
  if (x > -30.0) {
    if (x > 5.0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
    return std::log(n_cdf(x));
  }
  // Asymptotic Mills-ratio series; truncation error below 1e-12 for x <= -30.
  const double r = 1.0 / (x * x);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r * (1.0 - 9.0 * r))));
  return n_log_pdf(x) - std::log(-x) + std::log(series);
}

// phi(x) / Phi(x)
double n_mills_inv(double x) {
  if (x > -30.0) return n_pdf(x) / n_cdf(x);
  return std::exp(n_log_pdf(x) - n_log_cdf(x));
}

double n_d2log_cdf(double x) {
  const double r = n_mills_inv(x);
  return -r * (x + r);
}

double n_draw(double u1, double u2) {
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

// ---- logistic ---------------------------------------------------------------

double l_cdf(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
double l_pdf(double x) {
  const double e = std::exp(-std::fabs(x));
  return e / ((1.0 + e) * (1.0 + e));
}
double l_log_pdf(double x) {
  const double a = std::fabs(x);
  return -a - 2.0 * std::log1p(std::exp(-a));
}
double l_dlog_pdf(double x) { return -std::tanh(0.5 * x); }
double l_d2log_pdf(double x) {
  const double t = std::tanh(0.5 * x);
  return -0.5 * (1.0 - t * t);
}
double l_quantile(double p) { return std::log(p / (1.0 - p)); }
double l_log_cdf(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}
double l_dlog_cdf(double x) { return l_cdf(-x); }
double l_d2log_cdf(double x) { return -l_cdf(x) * l_cdf(-x); }
double l_draw(double u1, double) { return l_quantile(u1); }

// ---- hyperbolic secant --------------------------------------------------------

constexpr double kHalfPi = 0.5 * pi;

double s_pdf(double x) { return 0.5 / std::cosh(kHalfPi * x); }
double s_log_pdf(double x) { return -log_two_cosh(kHalfPi * x); }
double s_dlog_pdf(double x) { return -kHalfPi * std::tanh(kHalfPi * x); }
double s_d2log_pdf(double x) {
  const double t = std::tanh(kHalfPi * x);
  return -kHalfPi * kHalfPi * (1.0 - t * t);
}
double s_cdf(double x) {
  const double t = kHalfPi * x;
  if (t > 0.0) return 1.0 - (2.0 / pi) * std::atan(std::exp(-t));
  return (2.0 / pi) * std::atan(std::exp(t));
}
double s_log_cdf(double x) {
  const double t = kHalfPi * x;
  if (t > 0.0) return std::log1p(-(2.0 / pi) * std::atan(std::exp(-t)));
  if (t < -30.0) return std::log(2.0 / pi) + t;
  return std::log((2.0 / pi) * std::atan(std::exp(t)));
}
double s_quantile(double p) { return (2.0 / pi) * std::log(std::tan(kHalfPi * p)); }
double s_dlog_cdf(double x) { return std::exp(s_log_pdf(x) - s_log_cdf(x)); }
double s_d2log_cdf(double x) {
  const double r = s_dlog_cdf(x);
  return -r * (kHalfPi * std::tanh(kHalfPi * x) + r);
}
double s_draw(double u1, double) { return s_quantile(u1); }

double identity(double x) { return x; }
double one(double) { return 1.0; }
double zero(double) { return 0.0; }

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw Error(ErrorKind::invalid_argument, std::string(what) + " must be finite");
}

void require_scale(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorKind::invalid_argument, "scale must be positive and finite");
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::invalid_argument, "quantile level must lie in (0, 1)");
  // Acklam's rational approximation refined by Newton steps on the log cdf.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  const double lower = std::min(p, 1.0 - p);
  double x;
  if (lower < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(lower));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = lower - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // x now approximates the quantile of `lower` (<= 0.5, so x <= 0).
  const double target = std::log(lower);
  for (int i = 0; i < 3; ++i) {
    const double step = (n_log_cdf(x) - target) / n_mills_inv(x);
    x -= step;
  }
  return p < 0.5 ? x : -x;
}

const SymmetricBaseline& normal_baseline() {
  static const SymmetricBaseline b{"normal",     n_pdf,       n_cdf,       normal_quantile, n_log_pdf,
                                   n_dlog_pdf,   n_d2log_pdf, n_cdf,       n_pdf,           n_log_cdf,
                                   n_mills_inv,  n_d2log_cdf, identity,    one,             zero,
                                   n_draw};
  return b;
}

const SymmetricBaseline& logistic_baseline() {
  static const SymmetricBaseline b{"logistic",  l_pdf,       l_cdf,      l_quantile, l_log_pdf,
                                   l_dlog_pdf,  l_d2log_pdf, l_cdf,      l_pdf,      l_log_cdf,
                                   l_dlog_cdf,  l_d2log_cdf, identity,   one,        zero,
                                   l_draw};
  return b;
}

const SymmetricBaseline& sech_baseline() {
  static const SymmetricBaseline b{"sech",      s_pdf,       s_cdf,      s_quantile, s_log_pdf,
                                   s_dlog_pdf,  s_d2log_pdf, s_cdf,      s_pdf,      s_log_cdf,
                                   s_dlog_cdf,  s_d2log_cdf, identity,   one,        zero,
                                   s_draw};
  return b;
}

const SymmetricBaseline& baseline_by_name(std::string_view name) {
  if (name == "normal") return normal_baseline();
  if (name == "logistic") return logistic_baseline();
  if (name == "sech") return sech_baseline();
  throw Error(ErrorKind::invalid_argument, "unknown baseline '" + std::string(name) + "'");
}

double TwoPieceModel::sigma_left() const { return sigma * (1.0 + std::tanh(epsilon)); }
double TwoPieceModel::sigma_right() const { return sigma * (1.0 - std::tanh(epsilon)); }

double location_scale_pdf(const SymmetricBaseline& baseline, double mu, double sigma, double x) {
  return baseline.pdf((x - mu) / sigma) / sigma;
}

double skew_pdf(const SkewSymmetricModel& model, double x) {
  require_scale(model.sigma);
  require_finite(x, "x");
  const auto& b = *model.baseline;
  const double z = (x - model.mu) / model.sigma;
  return 2.0 / model.sigma * b.pdf(z) * b.skew_cdf(model.lambda * b.omega(z));
}

double skew_log_pdf(const SkewSymmetricModel& model, double x) {
  require_scale(model.sigma);
  require_finite(x, "x");
  const auto& b = *model.baseline;
  const double z = (x - model.mu) / model.sigma;
  return std::numbers::ln2 - std::log(model.sigma) + b.log_pdf(z) + b.log_skew_cdf(model.lambda * b.omega(z));
}

double two_piece_pdf(const TwoPieceModel& model, double x) {
  require_scale(model.sigma);
  require_finite(x, "x");
  const double s1 = model.sigma_left();
  const double s2 = model.sigma_right();
  const double z = x < model.mu ? (x - model.mu) / s1 : (x - model.mu) / s2;
  return 2.0 / (s1 + s2) * model.baseline->pdf(z);
}

std::pair<double, double> normal_pdf_cdf(double x) { return {n_pdf(x), n_cdf(x)}; }

double normal_log_cdf(double x) { return n_log_cdf(x); }

SkewSampler::SkewSampler(const SkewSymmetricModel& model, std::uint64_t seed)
    : model_(model), key_(derive_key({seed, 0x736b6577ULL})) {
  require_scale(model.sigma);
}

double SkewSampler::operator()(std::uint64_t index) const {
  const CounterStream stream(key_);
  const auto& b = *model_.baseline;
  const double z = b.draw(stream.uniform(3 * index), stream.uniform(3 * index + 1));
  const double u = stream.uniform(3 * index + 2);
  const double sign = u <= b.skew_cdf(model_.lambda * b.omega(z)) ? 1.0 : -1.0;
  return model_.mu + model_.sigma * sign * z;
}

std::vector<double> sample_skew(const SkewSymmetricModel& model, std::size_t n, std::uint64_t seed) {
  const SkewSampler sampler(model, seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler(i));
  return out;
}

}  // namespace skewtest
