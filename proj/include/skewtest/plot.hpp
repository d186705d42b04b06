#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace skewtest {

/// A string table as read from or written to CSV.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(std::istream& in, char delimiter = ',');

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct CurvePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

struct BoxSummary {
  std::string label;
  double lo_whisker = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double hi_whisker = 0.0;
};

struct BoxPlot {
  std::string title;
  std::string y_label;
  std::vector<BoxSummary> boxes;
};

void write_svg(std::ostream& out, const CurvePlot& plot);
void write_svg(std::ostream& out, const BoxPlot& plot);

enum class PlotKind { curve, boxplot };

/// Renders a table as SVG. Curve tables: first column x, each further column
/// one series. Boxplot tables: label,lo_whisker,q1,median,q3,hi_whisker.
/// Empty or mismatched tables are a schema-error.
void emit_plot(PlotKind kind, const Table& table, const std::string& path, const std::string& title = "");

}  // namespace skewtest
