// Command-line front end: curve, test, simulate, fit-rate.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "skewtest/dataio.hpp"
#include "skewtest/discrepancy.hpp"
#include "skewtest/error.hpp"
#include "skewtest/evidence.hpp"
#include "skewtest/plot.hpp"
#include "skewtest/priors.hpp"
#include "skewtest/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace skewtest;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitData = 4;
constexpr int kManifestVersion = 1;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::schema_error, "cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_manifest(const fs::path& dir, const std::string& command, const json& config,
                    std::optional<std::uint64_t> seed) {
  json m;
  m["command"] = command;
  m["config"] = config;
  m["versions"] = {{"tool", SKEWTEST_VERSION}, {"manifest", kManifestVersion}};
  m["seed"] = seed ? json(*seed) : json();
  m["timestamp"] = utc_now();
  write_json(dir / "manifest.json", m);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::schema_error, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema_error, "'" + path + "': " + e.what());
  }
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorKind::schema_error, "cannot create '" + dir + "': " + ec.message());
  return p;
}

std::string number_tag(double v) {
  std::ostringstream s;
  s << v;
  std::string t = s.str();
  for (char& c : t)
    if (c == '.') c = 'p';
    else if (c == '-') c = 'm';
  return t;
}

// ---------------------------------------------------------------- curve

struct CurveArgs {
  std::string family = "skew";
  std::string baseline;
  std::optional<double> grid_min, grid_max;
  std::optional<std::size_t> nodes;
  std::string out_dir;
};

int run_curve(const CurveArgs& a) {
  const Family family = family_from_string(a.family);
  const auto& base = baseline_by_name(a.baseline);
  const auto fallback = default_grid(family);
  const double lo = a.grid_min.value_or(fallback.front());
  const double hi = a.grid_max.value_or(fallback.back());
  const std::size_t nodes = a.nodes.value_or(fallback.size());
  const auto grid = uniform_grid(lo, hi, nodes);
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end())
    throw Error(ErrorKind::invalid_argument, "the grid must contain 0 (use an odd node count on a symmetric range)");
  const fs::path dir = prepare_dir(a.out_dir);

  auto curve = build_curve(family, base, grid);
  const MoominExactContext ctx(family, base, curve);
  const PriorSpec prior = normalize(MoominExact{std::make_shared<const MoominExactContext>(ctx), 0.0});

  std::ostringstream csv;
  write_curve_csv(csv, curve);
  write_text(dir / "curve.csv", csv.str());
  std::ostringstream pcsv;
  write_prior_csv(pcsv, prior, curve.lambdas);
  write_text(dir / "prior.csv", pcsv.str());

  const std::string sym = family == Family::two_piece ? "epsilon" : "lambda";
  const std::string name = std::string(to_string(family)) + "-" + std::string(base.name);
  std::vector<double> density;
  for (double l : curve.lambdas) density.push_back(prior_density(prior, l));
  auto svg = [&](const std::string& file, const std::string& title, const std::string& ylabel,
                 const std::vector<double>& y) {
    std::ostringstream s;
    write_svg(s, CurvePlot{title + " (" + name + ")", sym, ylabel, {{ylabel, curve.lambdas, y}}});
    write_text(dir / file, s.str());
  };
  svg("discrepancy.svg", "Minimum discrepancy", "D_min", curve.d_min);
  svg("signed.svg", "Signed discrepancy", "M", curve.signed_values);
  svg("prior.svg", "MOOMIN prior", "density", density);

  json cfg = {{"family", to_string(family)}, {"baseline", base.name}, {"grid_min", lo}, {"grid_max", hi},
              {"nodes", nodes}};
  write_manifest(dir, "curve", cfg, std::nullopt);

  std::cout.precision(7);
  std::cout << "family " << to_string(family) << ", baseline " << base.name << ", " << nodes << " nodes on [" << lo
            << ", " << hi << "]\n"
            << "d_min at endpoints: " << curve.d_min.front() << " / " << curve.d_min.back() << '\n'
            << "range constant C (endpoint): " << curve.range_constant() << '\n';
  if (family == Family::skew_symmetric)
    std::cout << "limit as |" << sym << "| -> inf: " << d_min_limit(base).value << '\n';
  std::cout << "prior normalising mass: " << std::get<MoominExact>(prior).norm_const << '\n'
            << "wrote " << (dir / "curve.csv").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- test

struct TestArgs {
  std::string data;
  std::string column = "0";
  std::string delimiter = ",";
  std::string prior = "moomin";
  std::string engine = "ila";
  std::string baseline = "normal";
  std::string null_scale = "variance";
  bool remove_outliers = false;
  double mad_threshold = 3.0;
  double jeffreys_scale = 1.5707963267948966;
  std::string out;
};

int run_test(const TestArgs& a) {
  if (a.delimiter.size() != 1) throw Error(ErrorKind::invalid_argument, "delimiter must be a single character");
  const auto& base = baseline_by_name(a.baseline);
  BayesTestOptions options;
  options.engine = engine_from_string(a.engine);
  options.null_scale = null_prior_scale_from_string(a.null_scale);
  Dataset data = load_column(a.data, ColumnRef::parse(a.column), a.delimiter[0]);
  data.validate();

  json outliers;
  if (a.remove_outliers) {
    const auto rep = mad_outliers(data, a.mad_threshold);
    outliers = {{"threshold", rep.threshold},
                {"median", rep.median},
                {"mad_scaled", rep.mad_scaled},
                {"indices", rep.indices},
                {"values", rep.flagged_values}};
    data = remove_indices(data, rep.indices);
    data.validate();
  }

  std::string prior_name = a.prior;
  if (prior_name == "moomin-exact") prior_name = "moomin_exact";
  if (prior_name != "jeffreys" && prior_name != "dimom" && prior_name != "moomin" && prior_name != "moomin_exact")
    throw Error(ErrorKind::invalid_argument, "unknown prior '" + a.prior + "'");
  const PriorSpec prior = prior_from_name(prior_name, a.jeffreys_scale, base);
  const TestResult r = bayes_test(data, base, prior, options);

  json doc = to_json(r);
  doc["prior_spec"] = to_json(prior);
  doc["n"] = data.size();
  doc["baseline"] = base.name;
  if (a.remove_outliers) doc["outliers"] = outliers;

  const fs::path out(a.out);
  const fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  prepare_dir(dir.string());
  write_json(out, doc);
  json cfg = {{"data", a.data},         {"column", a.column},           {"delimiter", a.delimiter},
              {"prior", a.prior},       {"engine", a.engine},           {"baseline", a.baseline},
              {"null_prior_scale", a.null_scale}, {"remove_outliers", a.remove_outliers},
              {"mad_threshold", a.mad_threshold}, {"jeffreys_scale", a.jeffreys_scale}};
  write_manifest(dir, "test", cfg, std::nullopt);

  std::cout.precision(6);
  std::cout << "n = " << data.size() << ", prior " << r.prior << ", engine " << to_string(r.engine) << '\n'
            << "log marginal null/alt: " << r.log_marg_null << " / " << r.log_marg_alt << '\n'
            << "log BF(1|0): " << r.log_bf_10 << '\n'
            << "posterior probability of the skewed model: " << r.post_prob_alt << '\n'
            << "BIC null/alt: " << r.bic_null << " / " << r.bic_alt << '\n';
  if (a.remove_outliers) std::cout << "removed " << outliers["indices"].size() << " outlier(s)\n";
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimArgs {
  std::string config;
  std::vector<std::size_t> n;
  std::vector<double> lambda;
  std::optional<std::size_t> replications;
  std::vector<std::string> priors;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> engine;
  std::optional<std::string> null_scale;
  std::optional<std::string> baseline;
  std::optional<double> jeffreys_scale;
  unsigned threads = 0;
  bool strict = false;
  bool rate_study = false;
  std::size_t bootstrap = 200;
  bool quiet = false;
  std::string out_dir;
};

int run_simulate(const SimArgs& a) {
  SimConfig cfg;
  bool seed_from_config = false;
  if (!a.config.empty()) {
    json doc = read_json_file(a.config);
    // A manifest from an earlier run carries its config under "config".
    if (doc.contains("command") && doc.contains("config")) doc = doc["config"];
    seed_from_config = doc.contains("master_seed");
    doc.erase("rate_study");
    doc.erase("bootstrap");
    cfg = sim_config_from_json(doc);
  }
  if (!a.n.empty()) cfg.sample_sizes = a.n;
  if (!a.lambda.empty()) cfg.lambdas = a.lambda;
  if (a.replications) cfg.replications = *a.replications;
  if (!a.priors.empty()) cfg.priors = a.priors;
  if (a.engine) cfg.engine = engine_from_string(*a.engine);
  if (a.null_scale) cfg.null_scale = null_prior_scale_from_string(*a.null_scale);
  if (a.baseline) cfg.baseline = *a.baseline;
  if (a.jeffreys_scale) cfg.jeffreys_scale = *a.jeffreys_scale;
  if (a.seed) {
    cfg.master_seed = *a.seed;
  } else if (!seed_from_config) {
    if (const char* env = std::getenv("SKEWTEST_SEED")) {
      try {
        cfg.master_seed = std::stoull(env);
      } catch (const std::exception&) {
        throw Error(ErrorKind::invalid_argument, std::string("SKEWTEST_SEED is not an integer: ") + env);
      }
    }
  }
  cfg.threads = a.threads;
  if (a.rate_study) cfg.lambdas = {0.0};
  cfg.validate();
  const fs::path dir = prepare_dir(a.out_dir);

  ProgressFn progress;
  if (!a.quiet) {
    progress = [last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
      const std::size_t pct = 100 * done / total;
      if (pct >= last + 5 || done == total) {
        last = pct;
        std::cerr << "\r  " << done << " / " << total << " datasets" << std::flush;
        if (done == total) std::cerr << '\n';
      }
    };
  }

  SimResult result;
  std::optional<RateStudy> study;
  if (a.rate_study) {
    study = rate_study(cfg, a.bootstrap, progress);
    result = study->experiment;
  } else {
    result = run_experiment(cfg, progress);
  }

  std::ostringstream rows, summary;
  write_rows_csv(rows, result);
  write_summary_csv(summary, result);
  write_text(dir / "rows.csv", rows.str());
  write_text(dir / "summary.csv", summary.str());
  write_json(dir / "summary.json", summary_json(result));

  for (auto n : cfg.sample_sizes) {
    for (double l : cfg.lambdas) {
      BoxPlot plot{"Posterior probability of the skewed model, n = " + std::to_string(n) +
                       ", lambda = " + number_tag(l),
                   "P(M1 | x)",
                   {}};
      for (const auto& s : result.summary)
        if (s.n == n && s.true_lambda == l && s.count > 0)
          plot.boxes.push_back({s.prior, s.lo_whisker, s.q1, s.median, s.q3, s.hi_whisker});
      if (plot.boxes.empty()) continue;
      std::ostringstream svg;
      write_svg(svg, plot);
      write_text(dir / ("boxplot_n" + std::to_string(n) + "_lambda" + number_tag(l) + ".svg"), svg.str());
    }
  }

  json cfg_doc = to_json(cfg);
  if (a.rate_study) {
    cfg_doc["rate_study"] = true;
    cfg_doc["bootstrap"] = a.bootstrap;
    write_json(dir / "rate_slopes.json", to_json(*study));
  }
  write_manifest(dir, "simulate", cfg_doc, cfg.master_seed);

  std::cout.precision(4);
  std::cout << std::fixed;
  std::cout << "n      lambda  prior          median    q1        q3        mean logBF  failures\n";
  for (const auto& s : result.summary) {
    std::cout << std::left << std::setw(7) << s.n << std::setw(8) << s.true_lambda << std::setw(15) << s.prior
              << std::setw(10) << s.median << std::setw(10) << s.q1 << std::setw(10) << s.q3 << std::setw(12)
              << s.mean_log_bf << s.failures << '\n';
  }
  if (study) {
    std::cout << "\nslope of mean log BF on log n (lambda = 0)\n";
    for (const auto& s : study->slopes)
      std::cout << std::setw(15) << s.prior << std::setw(10) << s.slope << " (bootstrap se " << s.std_error << ")\n";
  }
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (result.degraded && a.strict) return kExitNumerical;
  return 0;
}

// ---------------------------------------------------------------- fit-rate

struct RateArgs {
  std::string baseline = "normal";
  std::string family = "skew";
  double halfwidth = 0.5;
  std::string out_dir;
};

int run_fit_rate(const RateArgs& a) {
  const auto& base = baseline_by_name(a.baseline);
  const Family family = family_from_string(a.family);
  if (!(a.halfwidth > 0.0)) throw Error(ErrorKind::invalid_argument, "halfwidth must be positive");
  // Only the curve nodes bracketing the neighbourhood matter.
  const double span = std::max(1.0, std::ceil(a.halfwidth) + 1.0);
  const auto grid = uniform_grid(-span, span, static_cast<std::size_t>(std::lround(span * 16)) * 2 + 1);
  const RateFitOptions opts;
  // Fail on the node count before paying for the curve.
  fit_vanishing_rate([](double l) { return std::fabs(l); }, a.halfwidth, opts);
  const MoominExactContext ctx(family, base, grid);
  const RateFit fit = fit_vanishing_rate(ctx, a.halfwidth, opts);

  std::cout.precision(5);
  std::cout << "baseline " << base.name << ", family " << to_string(family) << ", halfwidth " << a.halfwidth << ", "
            << fit.nodes << " nodes\n"
            << "fitted k (log-log slope): " << fit.slope << '\n'
            << "nearest even integer: " << fit.nearest_even << '\n'
            << "best even power (least squares on the density scale): " << fit.best_even_power << '\n';
  if (!a.out_dir.empty()) {
    const fs::path dir = prepare_dir(a.out_dir);
    json report = {{"baseline", base.name},        {"family", to_string(family)},
                   {"halfwidth", a.halfwidth},      {"nodes", fit.nodes},
                   {"slope", fit.slope},            {"intercept", fit.intercept},
                   {"nearest_even", fit.nearest_even}, {"best_even_power", fit.best_even_power}};
    write_json(dir / "rate_fit.json", report);
    write_manifest(dir, "fit-rate",
                   {{"baseline", base.name}, {"family", to_string(family)}, {"halfwidth", a.halfwidth}},
                   std::nullopt);
  }
  return 0;
}

int exit_code_for(const Error& e) {
  if (e.kind() == ErrorKind::invalid_argument) return kExitUsage;
  if (is_data_error(e.kind())) return kExitData;
  return kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Objective Bayesian symmetry tests for skew-symmetric models"};
  app.set_version_flag("--version", SKEWTEST_VERSION);
  app.require_subcommand(1);

  CurveArgs ca;
  auto* curve = app.add_subcommand("curve", "Minimum-discrepancy curve, signed curve and MOOMIN prior");
  curve->add_option("--family", ca.family, "skew or two-piece")->capture_default_str();
  curve->add_option("--baseline", ca.baseline, "normal, logistic or sech")->required();
  curve->add_option("--grid-min", ca.grid_min, "Lower end of the shape grid");
  curve->add_option("--grid-max", ca.grid_max, "Upper end of the shape grid");
  curve->add_option("--nodes", ca.nodes, "Number of grid nodes")->check(CLI::PositiveNumber);
  curve->add_option("--out-dir", ca.out_dir, "Output directory")->required();

  TestArgs ta;
  auto* test = app.add_subcommand("test", "Bayes test of symmetry on one data column");
  test->add_option("--data", ta.data, "CSV file")->required()->check(CLI::ExistingFile);
  test->add_option("--column", ta.column, "Column name or zero-based index")->capture_default_str();
  test->add_option("--delimiter", ta.delimiter, "Field delimiter")->capture_default_str();
  test->add_option("--prior", ta.prior, "Shape prior")
      ->check(CLI::IsMember({"jeffreys", "dimom", "moomin", "moomin-exact"}))
      ->capture_default_str();
  test->add_option("--engine", ta.engine, "Marginal likelihood engine")
      ->check(CLI::IsMember({"laplace", "ila"}))
      ->capture_default_str();
  test->add_option("--baseline", ta.baseline, "Symmetric baseline")
      ->check(CLI::IsMember({"normal", "logistic", "sech"}))
      ->capture_default_str();
  test->add_option("--null-prior-scale", ta.null_scale, "Null (mu, sigma) prior: variance (1/sigma^2) or sigma (1/sigma)")
      ->check(CLI::IsMember({"variance", "sigma"}))
      ->capture_default_str();
  test->add_flag("--remove-outliers", ta.remove_outliers, "Drop MAD outliers before testing");
  test->add_option("--mad-threshold", ta.mad_threshold, "MAD outlier threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  test->add_option("--jeffreys-scale", ta.jeffreys_scale, "Scale of the Student-t Jeffreys approximation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  test->add_option("--out", ta.out, "Result JSON path")->required();

  SimArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulation study of posterior probabilities");
  sim->add_option("--config", sa.config, "JSON config or a previous run's manifest")->check(CLI::ExistingFile);
  sim->add_option("--n", sa.n, "Sample sizes")->delimiter(',');
  sim->add_option("--lambda", sa.lambda, "True shape values")->delimiter(',');
  sim->add_option("--N", sa.replications, "Replications per cell")->check(CLI::PositiveNumber);
  sim->add_option("--prior", sa.priors, "Priors (jeffreys, dimom, moomin, moomin-exact)")->delimiter(',');
  sim->add_option("--seed", sa.seed, "Master seed (fallback: SKEWTEST_SEED)");
  sim->add_option("--engine", sa.engine, "laplace or ila")->check(CLI::IsMember({"laplace", "ila"}));
  sim->add_option("--null-prior-scale", sa.null_scale, "variance or sigma")->check(CLI::IsMember({"variance", "sigma"}));
  sim->add_option("--baseline", sa.baseline, "Symmetric baseline")->check(CLI::IsMember({"normal", "logistic", "sech"}));
  sim->add_option("--jeffreys-scale", sa.jeffreys_scale, "Scale of the Student-t Jeffreys approximation");
  sim->add_option("--threads", sa.threads, "Worker threads (0: all cores)")->capture_default_str();
  sim->add_flag("--strict", sa.strict, "Exit 3 when a cell loses more than 1% of replicates");
  sim->add_flag("--rate-study", sa.rate_study, "Slope of mean log BF on log n at lambda = 0");
  sim->add_option("--bootstrap", sa.bootstrap, "Bootstrap resamples for slope errors")->capture_default_str();
  sim->add_flag("--quiet", sa.quiet, "No progress output");
  sim->add_option("--out-dir", sa.out_dir, "Output directory")->required();

  RateArgs ra;
  auto* rate = app.add_subcommand("fit-rate", "Vanishing rate of the exact MOOMIN prior at 0");
  rate->add_option("--baseline", ra.baseline, "Symmetric baseline")
      ->check(CLI::IsMember({"normal", "logistic", "sech"}))
      ->capture_default_str();
  rate->add_option("--family", ra.family, "skew or two-piece")->capture_default_str();
  rate->add_option("--halfwidth", ra.halfwidth, "Neighbourhood half-width")->capture_default_str();
  rate->add_option("--out-dir", ra.out_dir, "Optional report directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*curve) return run_curve(ca);
    if (*test) return run_test(ta);
    if (*sim) return run_simulate(sa);
    if (*rate) return run_fit_rate(ra);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
