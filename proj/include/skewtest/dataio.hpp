#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "skewtest/dataset.hpp"

namespace skewtest {

/// Column selector: by header name, or by zero-based position when `name` is empty.
struct ColumnRef {
  std::string name;
  std::size_t index = 0;

  static ColumnRef parse(const std::string& text);  // digits select a position
};

/// Reads one numeric column. A first row with any non-numeric field is taken
/// as the header; blank lines are skipped. Quoted fields follow RFC 4180.
Dataset load_column(const std::string& path, const ColumnRef& column, char delimiter = ',');
Dataset load_column(std::istream& in, const ColumnRef& column, char delimiter = ',', const std::string& label = "");

void write_column(std::ostream& out, const Dataset& data, const std::string& header);

/// Splits one delimited record, honouring double-quoted fields.
std::vector<std::string> split_record(const std::string& line, char delimiter);

struct OutlierReport {
  std::vector<std::size_t> indices;
  double threshold = 3.0;
  double median = 0.0;
  double mad_scaled = 0.0;
  std::vector<double> flagged_values;
};

constexpr double kMadConsistency = 1.4826;

double median(std::vector<double> values);

/// Flags x_i with |x_i - median| / (1.4826 MAD) > threshold.
OutlierReport mad_outliers(const Dataset& data, double threshold = 3.0);

Dataset remove_indices(const Dataset& data, const std::vector<std::size_t>& indices);

}  // namespace skewtest
