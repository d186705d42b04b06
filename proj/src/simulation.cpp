#include "skewtest/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "skewtest/error.hpp"
#include "skewtest/random.hpp"

namespace skewtest {

void SimConfig::validate() const {
  if (replications < 1) throw Error(ErrorKind::invalid_argument, "replications must be at least 1");
  if (sample_sizes.empty() || lambdas.empty() || priors.empty())
    throw Error(ErrorKind::invalid_argument, "sample sizes, lambdas and priors must be non-empty");
  for (auto n : sample_sizes)
    if (n < 10) throw Error(ErrorKind::invalid_argument, "sample sizes must be at least 10");
  for (double l : lambdas)
    if (!std::isfinite(l)) throw Error(ErrorKind::invalid_argument, "lambdas must be finite");
  baseline_by_name(baseline);
}

nlohmann::json to_json(const SimConfig& cfg) {
  return {{"sample_sizes", cfg.sample_sizes},
          {"lambdas", cfg.lambdas},
          {"replications", cfg.replications},
          {"priors", cfg.priors},
          {"master_seed", cfg.master_seed},
          {"engine", to_string(cfg.engine)},
          {"null_prior_scale", to_string(cfg.null_scale)},
          {"baseline", cfg.baseline},
          {"jeffreys_scale", cfg.jeffreys_scale}};
}

SimConfig sim_config_from_json(const nlohmann::json& doc, SimConfig cfg) {
  static const std::set<std::string> known = {"sample_sizes", "lambdas",   "replications", "priors",
                                              "master_seed",  "engine",    "null_prior_scale",
                                              "baseline",     "jeffreys_scale", "threads"};
  if (!doc.is_object()) throw Error(ErrorKind::schema_error, "simulation config must be a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (!known.count(key)) throw Error(ErrorKind::schema_error, "unknown config key '" + key + "'");
      if (key == "sample_sizes") cfg.sample_sizes = value.get<std::vector<std::size_t>>();
      else if (key == "lambdas") cfg.lambdas = value.get<std::vector<double>>();
      else if (key == "replications") cfg.replications = value.get<std::size_t>();
      else if (key == "priors") cfg.priors = value.get<std::vector<std::string>>();
      else if (key == "master_seed") cfg.master_seed = value.get<std::uint64_t>();
      else if (key == "engine") cfg.engine = engine_from_string(value.get<std::string>());
      else if (key == "null_prior_scale") cfg.null_scale = null_prior_scale_from_string(value.get<std::string>());
      else if (key == "baseline") cfg.baseline = value.get<std::string>();
      else if (key == "jeffreys_scale") cfg.jeffreys_scale = value.get<double>();
      else if (key == "threads") cfg.threads = value.get<unsigned>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::schema_error, std::string("simulation config: ") + e.what());
  }
  return cfg;
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t n, double lambda, std::size_t replicate) {
  return derive_key({master, static_cast<std::uint64_t>(n), std::bit_cast<std::uint64_t>(lambda + 0.0),
                     static_cast<std::uint64_t>(replicate)});
}

namespace {

double quantile7(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace

CellSummary summarize_cell(std::vector<double> v) {
  CellSummary s;
  s.count = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.q1 = quantile7(v, 0.25);
  s.median = quantile7(v, 0.5);
  s.q3 = quantile7(v, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr, hi_fence = s.q3 + 1.5 * iqr;
  s.lo_whisker = *std::lower_bound(v.begin(), v.end(), lo_fence);
  s.hi_whisker = *(std::upper_bound(v.begin(), v.end(), hi_fence) - 1);
  return s;
}

SimResult run_experiment(const SimConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const SymmetricBaseline& base = baseline_by_name(cfg.baseline);
  std::vector<PriorSpec> priors;
  for (const auto& name : cfg.priors) priors.push_back(prior_from_name(name, cfg.jeffreys_scale, base));

  struct Cell {
    std::size_t n;
    double lambda;
  };
  std::vector<Cell> cells;
  for (auto n : cfg.sample_sizes)
    for (double l : cfg.lambdas) cells.push_back({n, l});
  const std::size_t reps = cfg.replications;
  const std::size_t total = cells.size() * reps;

  // item = cell * reps + replicate; one slot per prior.
  std::vector<std::vector<SimRow>> out(total);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  BayesTestOptions options;
  options.engine = cfg.engine;
  options.null_scale = cfg.null_scale;

  parallel_for(total, cfg.threads, [&](std::size_t item) {
    const Cell& cell = cells[item / reps];
    const std::size_t r = item % reps;
    auto& rows = out[item];
    rows.resize(priors.size());
    for (std::size_t p = 0; p < priors.size(); ++p) {
      rows[p].n = cell.n;
      rows[p].true_lambda = cell.lambda;
      rows[p].prior = cfg.priors[p];
      rows[p].replicate = r;
      rows[p].failed = true;
    }
    Dataset data;
    data.values = sample_skew({&base, 0.0, 1.0, cell.lambda}, cell.n,
                              replicate_seed(cfg.master_seed, cell.n, cell.lambda, r));
    try {
      const LambdaProfile profile(data, base, options.ila);
      for (std::size_t p = 0; p < priors.size(); ++p) {
        try {
          const TestResult t = bayes_test(profile, priors[p], options);
          if (std::isfinite(t.log_bf_10)) {
            rows[p].post_prob_alt = t.post_prob_alt;
            rows[p].log_bf_10 = t.log_bf_10;
            rows[p].failed = false;
          }
        } catch (const Error&) {
        }
      }
    } catch (const Error&) {
    }
    const std::size_t d = ++done;
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(d, total);
    }
  });

  SimResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t p = 0; p < priors.size(); ++p) {
      std::vector<double> probs;
      double sum_bf = 0.0;
      std::size_t failures = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        const SimRow& row = out[c * reps + r][p];
        result.rows.push_back(row);
        if (row.failed) {
          ++failures;
          continue;
        }
        probs.push_back(row.post_prob_alt);
        sum_bf += row.log_bf_10;
      }
      CellSummary s = summarize_cell(probs);
      s.n = cells[c].n;
      s.true_lambda = cells[c].lambda;
      s.prior = cfg.priors[p];
      s.failures = failures;
      s.mean_log_bf = probs.empty() ? NAN : sum_bf / static_cast<double>(probs.size());
      result.failures += failures;
      if (static_cast<double>(failures) > 0.01 * static_cast<double>(reps)) {
        result.degraded = true;
        result.warnings.push_back("experiment-degraded: cell n=" + std::to_string(s.n) +
                                  " lambda=" + std::to_string(s.true_lambda) + " prior=" + s.prior + " lost " +
                                  std::to_string(failures) + " of " + std::to_string(reps) + " replicates");
      }
      result.summary.push_back(std::move(s));
    }
  }
  return result;
}

RateStudy rate_study(SimConfig cfg, std::size_t bootstrap, const ProgressFn& progress) {
  if (cfg.sample_sizes.size() < 3) throw Error(ErrorKind::invalid_argument, "rate study needs at least 3 sample sizes");
  cfg.lambdas = {0.0};
  RateStudy study;
  study.sample_sizes = cfg.sample_sizes;
  study.experiment = run_experiment(cfg, progress);
  const std::size_t reps = cfg.replications;
  std::vector<double> logn;
  for (auto n : cfg.sample_sizes) logn.push_back(std::log(static_cast<double>(n)));

  for (std::size_t p = 0; p < cfg.priors.size(); ++p) {
    RateSlope rs;
    rs.prior = cfg.priors[p];
    // Non-failed log BFs per sample size; rows are ordered (n, lambda, prior, replicate).
    std::vector<std::vector<double>> bfs(cfg.sample_sizes.size());
    for (std::size_t k = 0; k < cfg.sample_sizes.size(); ++k) {
      const std::size_t offset = (k * cfg.priors.size() + p) * reps;
      for (std::size_t r = 0; r < reps; ++r) {
        const SimRow& row = study.experiment.rows[offset + r];
        if (!row.failed) bfs[k].push_back(row.log_bf_10);
      }
      if (bfs[k].empty()) throw Error(ErrorKind::evaluation_failed, "every replicate failed in a rate-study cell");
      double s = 0.0;
      for (double v : bfs[k]) s += v;
      rs.mean_log_bf.push_back(s / static_cast<double>(bfs[k].size()));
    }
    rs.slope = ols_slope(logn, rs.mean_log_bf);

    std::vector<double> slopes;
    for (std::size_t b = 0; b < bootstrap; ++b) {
      std::vector<double> means;
      for (std::size_t k = 0; k < bfs.size(); ++k) {
        const CounterStream stream(derive_key({cfg.master_seed, 0x626f6f74ULL, p, b, k}));
        double s = 0.0;
        for (std::size_t i = 0; i < bfs[k].size(); ++i) {
          const auto j = static_cast<std::size_t>(stream.uniform(i) * static_cast<double>(bfs[k].size()));
          s += bfs[k][std::min(j, bfs[k].size() - 1)];
        }
        means.push_back(s / static_cast<double>(bfs[k].size()));
      }
      slopes.push_back(ols_slope(logn, means));
    }
    if (slopes.size() > 1) {
      double m = 0.0, v = 0.0;
      for (double s : slopes) m += s;
      m /= static_cast<double>(slopes.size());
      for (double s : slopes) v += (s - m) * (s - m);
      rs.std_error = std::sqrt(v / static_cast<double>(slopes.size() - 1));
    }
    study.slopes.push_back(std::move(rs));
  }
  return study;
}

void write_rows_csv(std::ostream& out, const SimResult& result) {
  out << "n,true_lambda,prior,replicate,post_prob_alt,log_bf_10,failed\n";
  out.precision(17);
  for (const auto& r : result.rows) {
    out << r.n << ',' << r.true_lambda << ',' << r.prior << ',' << r.replicate << ',';
    if (r.failed)
      out << ",,1\n";
    else
      out << r.post_prob_alt << ',' << r.log_bf_10 << ",0\n";
  }
}

void write_summary_csv(std::ostream& out, const SimResult& result) {
  out << "n,true_lambda,prior,count,failures,lo_whisker,q1,median,q3,hi_whisker,mean_log_bf\n";
  out.precision(17);
  for (const auto& s : result.summary)
    out << s.n << ',' << s.true_lambda << ',' << s.prior << ',' << s.count << ',' << s.failures << ','
        << s.lo_whisker << ',' << s.q1 << ',' << s.median << ',' << s.q3 << ',' << s.hi_whisker << ','
        << s.mean_log_bf << '\n';
}

nlohmann::json summary_json(const SimResult& result) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& s : result.summary) {
    cells.push_back({{"n", s.n},
                     {"true_lambda", s.true_lambda},
                     {"prior", s.prior},
                     {"count", s.count},
                     {"failures", s.failures},
                     {"lo_whisker", s.lo_whisker},
                     {"q1", s.q1},
                     {"median", s.median},
                     {"q3", s.q3},
                     {"hi_whisker", s.hi_whisker},
                     {"mean_log_bf", std::isfinite(s.mean_log_bf) ? nlohmann::json(s.mean_log_bf) : nlohmann::json()}});
  }
  return {{"cells", cells},
          {"failures", result.failures},
          {"degraded", result.degraded},
          {"warnings", result.warnings}};
}

nlohmann::json to_json(const RateStudy& study) {
  nlohmann::json slopes = nlohmann::json::array();
  for (const auto& s : study.slopes)
    slopes.push_back({{"prior", s.prior}, {"slope", s.slope}, {"std_error", s.std_error}, {"mean_log_bf", s.mean_log_bf}});
  return {{"sample_sizes", study.sample_sizes}, {"slopes", slopes}};
}

}  // namespace skewtest
