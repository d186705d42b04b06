#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skewtest/dataset.hpp"
#include "skewtest/kernels.hpp"
#include "skewtest/numerics.hpp"
#include "skewtest/priors.hpp"

namespace skewtest {

enum class ModeKind { map, mle };
enum class Engine { laplace, ila };

std::string_view to_string(Engine engine);
Engine engine_from_string(std::string_view name);

/// Constant carried by the improper prior on (mu, sigma) of the null model.
/// `sigma_scale` is pi(mu, sigma) = 1/sigma, identical to the alternative's.
/// `variance_scale` is the flat-on-log-variance form pi(mu, sigma^2) = 1/sigma^2,
/// which equals 2/sigma on the sigma scale and doubles the null marginal.
enum class NullPriorScale { sigma_scale, variance_scale };

std::string_view to_string(NullPriorScale scale);
NullPriorScale null_prior_scale_from_string(std::string_view name);

/// A mode of a log target. Parameters are reported as (mu, sigma[, lambda]);
/// the Hessian is that of the negative log target in (mu, log sigma[, lambda]).
struct ModelFit {
  std::vector<double> params;
  double log_target_at_mode = 0.0;
  double loglik_at_mode = 0.0;
  ModeKind mode_kind = ModeKind::mle;
  Matrix hessian;
  bool lambda_at_bound = false;
};

struct TestResult {
  double log_marg_null = 0.0;
  double log_marg_alt = 0.0;
  double log_bf_10 = 0.0;
  double post_prob_alt = 0.5;
  double bic_null = 0.0;
  double bic_alt = 0.0;
  std::string prior;
  Engine engine = Engine::ila;
  NullPriorScale null_scale = NullPriorScale::variance_scale;
  ModelFit fit_null;
  ModelFit fit_alt;
  ModelFit mle_alt;
};

/// 1 / (1 + exp(-log_bf - log_prior_odds)), computed without overflow.
double posterior_probability(double log_bf, double log_prior_odds = 0.0);

double loglik_skew(const Dataset& data, const SymmetricBaseline& baseline, double mu, double sigma, double lambda);

/// Closed-form log marginal of the normal model under pi(mu, sigma) = 1/sigma.
double log_marginal_null_closed(const Dataset& data);

/// Laplace approximation from a fitted mode; a fit with an empty Hessian
/// returns the log target itself.
double laplace_log_marginal(const ModelFit& fit);

struct IlaOptions {
  double lambda_bound = 60.0;
  int coarse_per_side = 40;
  int min_central_nodes = 161;
  double max_spacing = 0.1;
  int tail_nodes = 20;
  // Nodes whose profile falls this far below the maximum mark the central region.
  double central_drop = 30.0;
  // Gauss-Hermite points per axis for the (mu, log sigma) integral at each
  // node, placed on the Gaussian fitted at the inner mode. 1 is the plain
  // Laplace approximation; 0 picks 7 for n <= 60 and 3 above.
  int inner_points = 0;
};

/// Profile of the skew-symmetric likelihood over lambda. At each node the
/// (mu, log sigma) mode is found by Newton steps on the analytic score, and
/// the integral over (mu, log sigma) is taken by adaptive Gauss-Hermite
/// quadrature around that mode. Built once per
/// dataset and shared by every lambda prior.
class LambdaProfile {
 public:
  struct Node {
    double lambda = 0.0;
    double mu = 0.0;
    double eta = 0.0;       // log sigma
    double loglik = 0.0;    // profile log-likelihood
    double log_integral = 0.0;  // log int int exp(loglik) dmu deta
    bool ok = false;
  };

  LambdaProfile(const Dataset& data, const SymmetricBaseline& baseline, const IlaOptions& options = {});

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const IlaOptions& options() const noexcept { return options_; }
  const Dataset& data() const noexcept { return *data_; }
  const SymmetricBaseline& baseline() const noexcept { return *baseline_; }

  /// Solves the inner problem at an arbitrary lambda, warm-started from the
  /// nearest node.
  Node evaluate(double lambda) const;

  /// Maximiser of loglik + log prior over lambda in the box (prior optional:
  /// none gives the MLE). Returned with the 3-parameter Hessian.
  ModelFit fit(const PriorSpec* prior) const;

  /// log int exp(L(lambda)) pi(lambda) dlambda over the node set, plus the
  /// prior mass beyond the box weighted by the boundary profile.
  double log_marginal(const PriorSpec& prior) const;

 private:
  Node solve(double lambda, double mu0, double eta0) const;

  const Dataset* data_;
  const SymmetricBaseline* baseline_;
  IlaOptions options_;
  std::vector<Node> nodes_;
};

/// MLE of the null (symmetric baseline) model.
ModelFit fit_null(const Dataset& data, const SymmetricBaseline& baseline);

/// MAP under pi(mu, sigma) = 1/sigma and, when given, the lambda prior; with
/// no prior the null model's mode is returned (flat in (mu, log sigma), so
/// sigma^2 = A / n for the normal baseline).
ModelFit map_estimate(const Dataset& data, const SymmetricBaseline& baseline, const PriorSpec* prior);

/// MLE of the skew-symmetric model with lambda boxed to [-60, 60].
ModelFit mle_skew(const Dataset& data, const SymmetricBaseline& baseline);

double ila_log_marginal(const Dataset& data, const SymmetricBaseline& baseline, const PriorSpec& prior,
                        const IlaOptions& options = {});

/// Null log marginal under the given prior-scale convention: closed form for
/// the normal baseline, Laplace otherwise.
double log_marginal_null(const Dataset& data, const SymmetricBaseline& baseline, NullPriorScale scale);

struct BayesTestOptions {
  Engine engine = Engine::ila;
  NullPriorScale null_scale = NullPriorScale::variance_scale;
  IlaOptions ila;
};

TestResult bayes_test(const Dataset& data, const SymmetricBaseline& baseline, const PriorSpec& prior,
                      const BayesTestOptions& options = {});

/// Variant reusing a profile already built for this dataset (ILA engine).
TestResult bayes_test(const LambdaProfile& profile, const PriorSpec& prior, const BayesTestOptions& options = {});

nlohmann::json to_json(const ModelFit& fit);
nlohmann::json to_json(const TestResult& result);

}  // namespace skewtest
