#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include <boost/math/distributions/skew_normal.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "skewtest/error.hpp"
#include "skewtest/kernels.hpp"

using namespace skewtest;

namespace {

const SymmetricBaseline* all_baselines[] = {&normal_baseline(), &logistic_baseline(), &sech_baseline()};

double integral_of(const std::function<double(double)>& f) {
  const double inf = std::numeric_limits<double>::infinity();
  return oracle::gk(f, -inf, 0.0, 1e-12) + oracle::gk(f, 0.0, inf, 1e-12);
}

double moment(const std::vector<double>& x, int k, double centre) {
  double s = 0.0;
  for (double v : x) s += std::pow(v - centre, k);
  return s / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("skew density at lambda 0 reduces to the baseline") {
  const SkewSymmetricModel m{&normal_baseline(), 0.0, 1.0, 0.0};
  CHECK(skew_pdf(m, 1.3) == doctest::Approx(0.17136859204780736).epsilon(1e-12));
  CHECK(skew_pdf(m, 1.3) == doctest::Approx(oracle::normal_pdf(1.3)).epsilon(1e-14));
}

TEST_CASE("skew density at the location cancels the factor two") {
  const SkewSymmetricModel m{&normal_baseline(), 0.0, 1.0, 1.0};
  CHECK(skew_pdf(m, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
}

TEST_CASE("reflection identity for a fixed pair") {
  const SkewSymmetricModel neg{&normal_baseline(), 0.0, 1.0, -2.0};
  const SkewSymmetricModel pos{&normal_baseline(), 0.0, 1.0, 2.0};
  CHECK(skew_pdf(neg, 0.7) == skew_pdf(pos, -0.7));
}

TEST_CASE("skew density rejects invalid input") {
  const SkewSymmetricModel bad{&normal_baseline(), 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(skew_pdf(bad, 0.1), Error);
  const SkewSymmetricModel ok{&normal_baseline(), 0.0, 1.0, 1.0};
  CHECK_THROWS_AS(skew_pdf(ok, std::nan("")), Error);
  CHECK_THROWS_AS(skew_pdf(ok, INFINITY), Error);
  try {
    skew_pdf(bad, 0.1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_argument);
  }
}

TEST_CASE("skew density agrees with the Owen-T based skew-normal density") {
  boost::math::skew_normal_distribution<double> sn(0.5, 1.7, 2.5);
  const SkewSymmetricModel m{&normal_baseline(), 0.5, 1.7, 2.5};
  for (double x : {-4.0, -1.0, 0.0, 0.3, 2.0, 6.0}) CHECK(skew_pdf(m, x) == doctest::Approx(boost::math::pdf(sn, x)).epsilon(1e-12));
}

TEST_CASE("two-piece density at epsilon 0 is the baseline") {
  for (const auto* b : all_baselines) {
    const TwoPieceModel m{b, 0.4, 1.3, 0.0};
    for (double x : {-3.0, -0.2, 0.4, 1.0, 5.0}) CHECK(two_piece_pdf(m, x) == doctest::Approx(b->pdf((x - 0.4) / 1.3) / 1.3).epsilon(1e-14));
  }
}

TEST_CASE("two-piece density at the mode is independent of epsilon") {
  for (double eps : {-2.0, -0.5, 0.3, 1.7}) {
    const TwoPieceModel m{&normal_baseline(), 1.0, 2.0, eps};
    CHECK(two_piece_pdf(m, 1.0) == doctest::Approx(oracle::normal_pdf(0.0) / 2.0).epsilon(1e-14));
    CHECK(m.sigma_left() > 0.0);
    CHECK(m.sigma_right() > 0.0);
    CHECK(m.sigma_left() == doctest::Approx(2.0 * (1.0 + std::tanh(eps))));
  }
}

TEST_CASE("two-piece normal density integrates to one") {
  const TwoPieceModel m{&normal_baseline(), 1.0, 2.0, 0.5};
  CHECK(std::fabs(integral_of([&](double x) { return two_piece_pdf(m, x); }) - 1.0) < 1e-8);
  CHECK_THROWS_AS(two_piece_pdf(TwoPieceModel{&normal_baseline(), 0.0, -1.0, 0.5}, 0.0), Error);
}

TEST_CASE("sampler: symmetric law has no skewness") {
  const auto x = sample_skew({&normal_baseline(), 0.0, 1.0, 0.0}, 100000, 12345);
  double mean = 0.0;
  for (double v : x) mean += v / static_cast<double>(x.size());
  const double skew = moment(x, 3, mean) / std::pow(moment(x, 2, mean), 1.5);
  CHECK(std::fabs(skew) < 0.03);
}

TEST_CASE("sampler: skew-normal mean") {
  const auto x = sample_skew({&normal_baseline(), 0.0, 1.0, 2.5}, 100000, 777);
  double mean = 0.0;
  for (double v : x) mean += v / static_cast<double>(x.size());
  const double delta = 2.5 / std::sqrt(1.0 + 2.5 * 2.5);
  CHECK(std::fabs(mean - delta * std::sqrt(2.0 / oracle::kPi)) < 0.01);
}

TEST_CASE("sampler: determinism and edge cases") {
  const SkewSymmetricModel m{&logistic_baseline(), 1.0, 2.0, -1.5};
  const auto a = sample_skew(m, 5000, 99);
  const auto b = sample_skew(m, 5000, 99);
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  const auto c = sample_skew(m, 5000, 100);
  CHECK(a != c);
  // Draw i depends only on (seed, i).
  const auto prefix = sample_skew(m, 100, 99);
  CHECK(std::equal(prefix.begin(), prefix.end(), a.begin()));
  SkewSampler s(m, 99);
  CHECK(s(17) == a[17]);
  CHECK(sample_skew(m, 0, 1).empty());
  CHECK_THROWS_AS(sample_skew({&normal_baseline(), 0.0, -1.0, 0.0}, 10, 1), Error);
}

TEST_CASE("sampler: Kolmogorov-Smirnov distance for the skew-normal") {
  auto x = sample_skew({&normal_baseline(), 0.0, 1.0, 2.5}, 100000, 4242);
  std::sort(x.begin(), x.end());
  const auto cdf = oracle::skew_normal_cdf_at(x, 0.0, 1.0, 2.5);
  CHECK(oracle::ks_distance(cdf) < 0.01);
  boost::math::skew_normal_distribution<double> sn(0.0, 1.0, 2.5);
  for (std::size_t i : {std::size_t{10}, std::size_t{50000}, std::size_t{99990}})
    CHECK(cdf[i] == doctest::Approx(boost::math::cdf(sn, x[i])).epsilon(1e-9));
}

TEST_CASE("sampler: logistic and sech baselines follow their densities") {
  for (const auto* b : {&logistic_baseline(), &sech_baseline()}) {
    auto x = sample_skew({b, 0.0, 1.0, 1.5}, 50000, 31);
    std::sort(x.begin(), x.end());
    const SkewSymmetricModel m{b, 0.0, 1.0, 1.5};
    auto f = [&](double t) { return skew_pdf(m, t); };
    std::vector<double> cdf(x.size());
    double acc = oracle::gk(f, -std::numeric_limits<double>::infinity(), x.front(), 1e-12);
    cdf[0] = acc;
    for (std::size_t i = 1; i < x.size(); ++i) {
      acc += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, x[i - 1], x[i], 0, 0);
      cdf[i] = acc;
    }
    CHECK(oracle::ks_distance(cdf) < 0.01);
  }
}

TEST_CASE("normal pdf and cdf") {
  const auto [p0, c0] = normal_pdf_cdf(0.0);
  CHECK(p0 == doctest::Approx(0.3989422804).epsilon(1e-10));
  CHECK(c0 == 0.5);
  CHECK(normal_pdf_cdf(8.0).second > 1.0 - 1e-14);
  CHECK(std::fabs(normal_pdf_cdf(1.0).second - 0.8413447461) < 1e-10);
  double worst = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.0625)
    worst = std::max(worst, std::fabs(normal_pdf_cdf(x).second - oracle::normal_cdf_series(x)));
  CHECK(worst <= 1e-12);
  for (double p : {1e-10, 0.01, 0.3, 0.5, 0.9, 1 - 1e-9}) CHECK(normal_pdf_cdf(normal_quantile(p)).second == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("baselines are symmetric, normalised and carry complementary skewing functions") {
  for (const auto* b : all_baselines) {
    CAPTURE(b->name);
    CHECK(std::fabs(integral_of(b->pdf) - 1.0) < 1e-8);
    CHECK(std::fabs(integral_of(b->skew_pdf) - 1.0) < 1e-8);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-12.0, 12.0);
    for (int i = 0; i < 200; ++i) {
      const double x = u(rng);
      CHECK(b->pdf(x) == b->pdf(-x));
      CHECK(b->skew_pdf(x) == doctest::Approx(b->skew_pdf(-x)).epsilon(1e-15));
      CHECK(std::fabs(b->skew_cdf(x) + b->skew_cdf(-x) - 1.0) < 4e-16);
      CHECK(b->omega(-x) == -b->omega(x));
      CHECK(std::exp(b->log_pdf(x)) == doctest::Approx(b->pdf(x)).epsilon(1e-12));
    }
    CHECK(baseline_by_name(b->name).name == b->name);
  }
  CHECK_THROWS_AS(baseline_by_name("cauchy"), Error);
  // The sech density is 1/2 sech(pi x / 2).
  CHECK(sech_baseline().pdf(0.7) == doctest::Approx(0.5 / std::cosh(oracle::kPi * 0.35)).epsilon(1e-14));
  CHECK(logistic_baseline().pdf(0.7) == doctest::Approx(std::exp(-0.7) / std::pow(1 + std::exp(-0.7), 2)).epsilon(1e-14));
}

TEST_CASE("every model integrates to one across the shape grid") {
  for (const auto* b : all_baselines) {
    for (double s : {0.0, 0.5, 1.0, 2.5, 10.0}) {
      for (double sign : {-1.0, 1.0}) {
        CAPTURE(b->name);
        CAPTURE(sign * s);
        const SkewSymmetricModel m{b, 0.3, 1.4, sign * s};
        CHECK(std::fabs(integral_of([&](double x) { return skew_pdf(m, x); }) - 1.0) < 1e-6);
        const TwoPieceModel t{b, 0.3, 1.4, sign * s};
        CHECK(std::fabs(integral_of([&](double x) { return two_piece_pdf(t, x); }) - 1.0) < 1e-6);
      }
    }
  }
}

TEST_CASE("reflection and reduction hold on random inputs") {
  // Dyadic locations and offsets keep x and 2 mu - x exact, so the identity
  // must hold bit for bit.
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> grid(-6144, 6144);
  std::uniform_real_distribution<double> ul(-15.0, 15.0), us(0.2, 4.0), ux(-6.0, 6.0);
  for (const auto* b : all_baselines) {
    for (int i = 0; i < 500; ++i) {
      const double mu = grid(rng) / 1024.0, d = grid(rng) / 1024.0, sigma = us(rng), lambda = ul(rng);
      const SkewSymmetricModel neg{b, mu, sigma, -lambda}, pos{b, mu, sigma, lambda};
      CHECK(skew_pdf(neg, mu + d) == skew_pdf(pos, mu - d));
      const double x = ux(rng);
      const double base = location_scale_pdf(*b, mu, sigma, x);
      CHECK(std::fabs(skew_pdf({b, mu, sigma, 0.0}, x) - base) <= 1e-14);
      CHECK(std::fabs(two_piece_pdf({b, mu, sigma, 0.0}, x) - base) <= 1e-14);
    }
  }
}
