#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "skewtest/evidence.hpp"

namespace skewtest {

struct SimConfig {
  std::vector<std::size_t> sample_sizes = {50, 100, 200, 500};
  std::vector<double> lambdas = {0.0, 1.0, 2.5};
  std::size_t replications = 1000;
  // Prior names as accepted by prior_from_name.
  std::vector<std::string> priors = {"jeffreys", "moomin", "dimom"};
  std::uint64_t master_seed = 20240601;
  Engine engine = Engine::ila;
  NullPriorScale null_scale = NullPriorScale::variance_scale;
  std::string baseline = "normal";
  double jeffreys_scale = 1.5707963267948966;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

nlohmann::json to_json(const SimConfig& cfg);
/// Missing keys keep their defaults; unknown keys are a schema-error.
SimConfig sim_config_from_json(const nlohmann::json& doc, SimConfig base = {});

struct SimRow {
  std::size_t n = 0;
  double true_lambda = 0.0;
  std::string prior;
  std::size_t replicate = 0;
  double post_prob_alt = 0.0;
  double log_bf_10 = 0.0;
  bool failed = false;
};

/// Tukey boxplot statistics of post_prob_alt within one (n, lambda, prior) cell.
struct CellSummary {
  std::size_t n = 0;
  double true_lambda = 0.0;
  std::string prior;
  std::size_t count = 0;
  std::size_t failures = 0;
  double lo_whisker = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, hi_whisker = 0.0;
  double mean_log_bf = 0.0;
};

struct SimResult {
  std::vector<SimRow> rows;
  std::vector<CellSummary> summary;
  std::size_t failures = 0;
  bool degraded = false;  // some cell lost more than 1% of its replicates
  std::vector<std::string> warnings;
};

/// Seed of replicate r in the cell (n, lambda): depends only on these values,
/// so adding cells or replicates leaves existing rows unchanged.
std::uint64_t replicate_seed(std::uint64_t master, std::size_t n, double lambda, std::size_t replicate);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

SimResult run_experiment(const SimConfig& cfg, const ProgressFn& progress = {});

/// Quartiles by linear interpolation (type 7) and 1.5 IQR whiskers clipped to
/// the most extreme observations inside the fences.
CellSummary summarize_cell(std::vector<double> values);

struct RateSlope {
  std::string prior;
  double slope = 0.0;
  double std_error = 0.0;
  std::vector<double> mean_log_bf;  // per sample size, in config order
};

struct RateStudy {
  std::vector<std::size_t> sample_sizes;
  std::vector<RateSlope> slopes;
  SimResult experiment;
};

/// OLS slope of the cell mean log BF on log n for each prior at lambda = 0,
/// with a bootstrap standard error over replicates.
RateStudy rate_study(SimConfig cfg, std::size_t bootstrap = 200, const ProgressFn& progress = {});

void write_rows_csv(std::ostream& out, const SimResult& result);
void write_summary_csv(std::ostream& out, const SimResult& result);
nlohmann::json summary_json(const SimResult& result);
nlohmann::json to_json(const RateStudy& study);

}  // namespace skewtest
