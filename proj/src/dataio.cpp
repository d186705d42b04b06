#include "skewtest/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "skewtest/error.hpp"

namespace skewtest {

namespace {

bool parse_double(std::string s, double& out) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

ColumnRef ColumnRef::parse(const std::string& text) {
  if (!text.empty() && std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c) != 0; }))
    return {"", static_cast<std::size_t>(std::stoul(text))};
  return {text, 0};
}

std::vector<std::string> split_record(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

Dataset load_column(std::istream& in, const ColumnRef& column, char delimiter, const std::string& label) {
  Dataset data;
  data.label = label;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  std::size_t col = column.index;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (blank(line)) continue;
    auto fields = split_record(line, delimiter);
    if (first) {
      first = false;
      double dummy;
      const bool header =
          std::any_of(fields.begin(), fields.end(), [&](const std::string& f) { return !parse_double(f, dummy); });
      if (header) {
        if (!column.name.empty()) {
          const auto it = std::find(fields.begin(), fields.end(), column.name);
          if (it == fields.end()) throw Error(ErrorKind::schema_error, "column '" + column.name + "' not in header");
          col = static_cast<std::size_t>(it - fields.begin());
        }
        if (data.label.empty() && col < fields.size()) data.label = fields[col];
        continue;
      }
      if (!column.name.empty())
        throw Error(ErrorKind::schema_error, "column '" + column.name + "' requested but the file has no header");
    }
    if (col >= fields.size())
      throw Error(ErrorKind::schema_error,
                  "row " + std::to_string(lineno) + " has no column " + std::to_string(col));
    double v;
    if (!parse_double(fields[col], v) || !std::isfinite(v))
      throw Error(ErrorKind::parse_error, "row " + std::to_string(lineno) + ": '" + fields[col] + "' is not a number");
    data.values.push_back(v);
  }
  if (data.values.size() < 3)
    throw Error(ErrorKind::insufficient_data,
                "found " + std::to_string(data.values.size()) + " values; at least 3 are needed");
  return data;
}

Dataset load_column(const std::string& path, const ColumnRef& column, char delimiter) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::schema_error, "cannot open '" + path + "'");
  return load_column(in, column, delimiter, "");
}

void write_column(std::ostream& out, const Dataset& data, const std::string& header) {
  out << header << '\n';
  out.precision(17);
  for (double v : data.values) out << v << '\n';
}

double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorKind::insufficient_data, "median of an empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

OutlierReport mad_outliers(const Dataset& data, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorKind::invalid_argument, "MAD threshold must be positive");
  if (data.values.size() < 3) throw Error(ErrorKind::insufficient_data, "MAD screening needs at least 3 values");
  OutlierReport rep;
  rep.threshold = threshold;
  rep.median = median(data.values);
  std::vector<double> dev(data.values.size());
  for (std::size_t i = 0; i < dev.size(); ++i) dev[i] = std::fabs(data.values[i] - rep.median);
  rep.mad_scaled = kMadConsistency * median(dev);
  if (!(rep.mad_scaled > 0.0)) throw Error(ErrorKind::degenerate_spread, "median absolute deviation is zero");
  for (std::size_t i = 0; i < dev.size(); ++i) {
    if (dev[i] / rep.mad_scaled > threshold) {
      rep.indices.push_back(i);
      rep.flagged_values.push_back(data.values[i]);
    }
  }
  return rep;
}

Dataset remove_indices(const Dataset& data, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.label = data.label;
  for (std::size_t i = 0; i < data.values.size(); ++i)
    if (std::find(indices.begin(), indices.end(), i) == indices.end()) out.values.push_back(data.values[i]);
  return out;
}

}  // namespace skewtest
