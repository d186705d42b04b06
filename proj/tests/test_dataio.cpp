#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "skewtest/dataio.hpp"
#include "skewtest/error.hpp"
#include "skewtest/plot.hpp"

using namespace skewtest;

namespace {

const std::string kAis = std::string(SKEWTEST_DATA_DIR) + "/ais_female_bmi.csv";

ErrorKind load_error(const std::string& text, const ColumnRef& col = {}) {
  std::istringstream in(text);
  try {
    load_column(in, col);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::invalid_argument;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("skewtest_dataio_" + name);
}

}  // namespace

TEST_CASE("two values are too few") {
  CHECK(load_error("bmi\n21.5\n22.0\n") == ErrorKind::insufficient_data);
}

TEST_CASE("AIS female BMI has 100 values") {
  const auto d = load_column(kAis, ColumnRef{"bmi"});
  CHECK(d.size() == 100);
  CHECK(d.values.front() == 20.56);
  for (double v : d.values) {
    CHECK(v > 15.0);
    CHECK(v < 40.0);
  }
  CHECK(load_column(kAis, ColumnRef::parse("0")).values == d.values);
}

TEST_CASE("trailing blank lines do not change the result") {
  std::istringstream a("x\n1\n2\n3\n"), b("x\n1\n2\n3\n\n\n");
  CHECK(load_column(a, {}).values == load_column(b, {}).values);
  std::istringstream crlf("x\r\n1\r\n2\r\n3\r\n");
  CHECK(load_column(crlf, {}).values == std::vector<double>{1, 2, 3});
}

TEST_CASE("header detection, column selection and quoting") {
  std::istringstream headerless("1.5,2\n2.5,3\n3.5,4\n");
  CHECK(load_column(headerless, ColumnRef{"", 1}).values == std::vector<double>{2, 3, 4});
  std::istringstream named("id,\"body, mass\"\na,20\nb,21\nc,\"22.5\"\n");
  CHECK(load_column(named, ColumnRef{"body, mass"}).values == std::vector<double>{20, 21, 22.5});
  std::istringstream semi("a;b\n1;4\n2;5\n3;6\n");
  CHECK(load_column(semi, ColumnRef{"b"}, ';').values == std::vector<double>{4, 5, 6});
  CHECK(split_record("a,\"b,\"\"c\"\"\",d", ',') == std::vector<std::string>{"a", "b,\"c\"", "d"});
  CHECK(ColumnRef::parse("3").index == 3);
  CHECK(ColumnRef::parse("bmi").name == "bmi");
}

TEST_CASE("load errors") {
  CHECK(load_error("x\n1\n2\n3\n", ColumnRef{"y"}) == ErrorKind::schema_error);
  CHECK(load_error("x\n1\n2\n3\n", ColumnRef{"", 4}) == ErrorKind::schema_error);
  std::istringstream in("x\n1\n2\nabc\n4\n");
  try {
    load_column(in, {});
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse_error);
    CHECK(std::string(e.what()).find("row 4") != std::string::npos);
  }
  CHECK(load_error("x\n1\n2\ninf\n") == ErrorKind::parse_error);
  CHECK_THROWS_AS(load_column("/nonexistent/file.csv", {}), Error);
}

TEST_CASE("write then load round-trips exactly") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  Dataset d;
  for (int i = 0; i < 50; ++i) d.values.push_back(z(rng) * 1e3);
  d.values.push_back(1.0 / 3.0);
  d.values.push_back(-0.0);
  std::stringstream buf;
  write_column(buf, d, "value");
  CHECK(load_column(buf, ColumnRef{"value"}).values == d.values);
}

TEST_CASE("MAD outliers: examples") {
  CHECK(mad_outliers(Dataset{{1, 2, 3, 4, 5}, ""}).indices.empty());
  const auto r = mad_outliers(Dataset{{1, 2, 3, 4, 5, 40}, ""});
  CHECK(r.median == 3.5);
  CHECK(r.mad_scaled == doctest::Approx(1.5 * kMadConsistency));
  REQUIRE(r.indices == std::vector<std::size_t>{5});
  CHECK(r.flagged_values == std::vector<double>{40});
  std::vector<double> zeros(20, 0.0);
  zeros.push_back(100.0);
  try {
    mad_outliers(Dataset{zeros, ""});
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_spread);
  }
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}

TEST_CASE("AIS female BMI has exactly one MAD outlier, above 30") {
  const auto d = load_column(kAis, ColumnRef{"bmi"});
  const auto r = mad_outliers(d);
  REQUIRE(r.indices.size() == 1);
  CHECK(r.flagged_values[0] > 30.0);
  CHECK(d.values[r.indices[0]] == r.flagged_values[0]);
  for (double v : r.flagged_values) CHECK(std::fabs(v - r.median) / r.mad_scaled > r.threshold);
  const auto trimmed = remove_indices(d, r.indices);
  CHECK(trimmed.size() == 99);
}

TEST_CASE("MAD flags are permutation invariant and affine equivariant") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  Dataset d;
  for (int i = 0; i < 60; ++i) d.values.push_back(z(rng));
  d.values[7] = 6.0;
  d.values[33] = -5.5;
  const auto base = mad_outliers(d);
  auto flagged = base.flagged_values;
  std::sort(flagged.begin(), flagged.end());
  CHECK(flagged == std::vector<double>{-5.5, 6.0});

  Dataset shuffled = d;
  std::shuffle(shuffled.values.begin(), shuffled.values.end(), rng);
  auto f2 = mad_outliers(shuffled).flagged_values;
  std::sort(f2.begin(), f2.end());
  CHECK(f2 == flagged);

  for (auto [c, b] : {std::pair{3.0, 10.0}, std::pair{-0.5, 2.0}}) {
    Dataset t = d;
    for (double& v : t.values) v = c * v + b;
    CHECK(mad_outliers(t).indices == base.indices);
  }
}

TEST_CASE("curve plot draws one polyline per series") {
  Table t;
  t.columns = {"lambda", "normal", "logistic"};
  for (int i = 0; i < 100; ++i) {
    const double x = -5.0 + 0.1 * i;
    t.rows.push_back({std::to_string(x), std::to_string(std::tanh(x)), std::to_string(0.5 * std::tanh(x))});
  }
  const auto path = temp_path("curve.svg");
  emit_plot(PlotKind::curve, t, path.string(), "curves");
  const auto svg = slurp(path);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count(svg, "<polyline") == 2);
  CHECK(svg.find("logistic") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("boxplot draws one group per cell") {
  Table t;
  t.columns = {"label", "lo_whisker", "q1", "median", "q3", "hi_whisker"};
  t.rows = {{"jeffreys", "0.05", "0.1", "0.17", "0.3", "0.5"},
            {"dimom", "0.01", "0.06", "0.12", "0.2", "0.35"},
            {"moomin", "0.001", "0.02", "0.04", "0.1", "0.2"}};
  const auto path = temp_path("box.svg");
  emit_plot(PlotKind::boxplot, t, path.string());
  CHECK(count(slurp(path), "<g class=\"box\"") == 3);
  std::filesystem::remove(path);
}

TEST_CASE("empty or mismatched tables are schema errors") {
  const auto path = temp_path("bad.svg");
  auto kind_of = [&](PlotKind k, const Table& t) {
    try {
      emit_plot(k, t, path.string());
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::invalid_argument;
  };
  CHECK(kind_of(PlotKind::curve, Table{}) == ErrorKind::schema_error);
  CHECK(kind_of(PlotKind::boxplot, Table{}) == ErrorKind::schema_error);
  Table wrong;
  wrong.columns = {"label", "median"};
  wrong.rows = {{"a", "0.5"}};
  CHECK(kind_of(PlotKind::boxplot, wrong) == ErrorKind::schema_error);
  Table text;
  text.columns = {"x", "y"};
  text.rows = {{"1", "oops"}};
  CHECK(kind_of(PlotKind::curve, text) == ErrorKind::schema_error);
  CHECK_FALSE(std::filesystem::exists(path));
}

TEST_CASE("read_table keeps header and rows") {
  std::istringstream in("a,b\n1,2\n\n3,4\n");
  const auto t = read_table(in);
  CHECK(t.columns == std::vector<std::string>{"a", "b"});
  CHECK(t.rows.size() == 2);
}
