#include "skewtest/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "skewtest/dataio.hpp"
#include "skewtest/error.hpp"

namespace skewtest {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double m = 0.04 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

void header(std::ostream& out, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
}

// Frame, tick marks and axis labels.
void axes(std::ostream& out, const Range& xr, const Range& yr, const std::string& xl, const std::string& yl,
          bool x_ticks) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double yv = yr.lo + f * (yr.hi - yr.lo);
    const double py = y0 - f * (y0 - y1);
    out << "<line x1=\"" << x0 - 4 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
        << "\" stroke=\"black\"/><text x=\"" << x0 - 6 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << fmt(yv)
        << "</text>\n";
    if (x_ticks) {
      const double xv = xr.lo + f * (xr.hi - xr.lo);
      const double px = x0 + f * (x1 - x0);
      out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << y0 + 4
          << "\" stroke=\"black\"/><text x=\"" << px << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">"
          << fmt(xv) << "</text>\n";
    }
  }
  out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << escape(xl)
      << "</text>\n";
  out << "<text transform=\"translate(16," << (y0 + y1) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(yl) << "</text>\n";
}

double to_number(const std::string& s, std::size_t row) {
  std::istringstream in(s);
  double v;
  if (!(in >> v)) throw Error(ErrorKind::schema_error, "row " + std::to_string(row) + ": '" + s + "' is not numeric");
  return v;
}

}  // namespace

Table read_table(std::istream& in, char delimiter) {
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_record(line, delimiter);
    if (t.columns.empty())
      t.columns = std::move(fields);
    else
      t.rows.push_back(std::move(fields));
  }
  return t;
}

void write_svg(std::ostream& out, const CurvePlot& plot) {
  if (plot.series.empty()) throw Error(ErrorKind::schema_error, "curve plot without series");
  Range xr, yr;
  for (const auto& s : plot.series) {
    if (s.x.empty() || s.x.size() != s.y.size())
      throw Error(ErrorKind::schema_error, "series '" + s.name + "' is empty or has mismatched lengths");
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.pad();
  yr.pad();
  header(out, plot.title);
  axes(out, xr, yr, plot.x_label, plot.y_label, true);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      const double px = x0 + (s.x[i] - xr.lo) / (xr.hi - xr.lo) * (x1 - x0);
      const double py = y0 - (s.y[i] - yr.lo) / (yr.hi - yr.lo) * (y0 - y1);
      out << fmt(px) << ',' << fmt(py) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << x1 - 8 << "\" y=\"" << y1 + 16 + 14.0 * static_cast<double>(k)
        << "\" text-anchor=\"end\" fill=\"" << colour << "\">" << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_svg(std::ostream& out, const BoxPlot& plot) {
  if (plot.boxes.empty()) throw Error(ErrorKind::schema_error, "boxplot without boxes");
  Range yr;
  for (const auto& b : plot.boxes)
    for (double v : {b.lo_whisker, b.q1, b.median, b.q3, b.hi_whisker}) yr.add(v);
  yr.pad();
  header(out, plot.title);
  axes(out, Range{0, 1}, yr, "", plot.y_label, false);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  auto py = [&](double v) { return y0 - (v - yr.lo) / (yr.hi - yr.lo) * (y0 - y1); };
  const double slot = (x1 - x0) / static_cast<double>(plot.boxes.size());
  for (std::size_t k = 0; k < plot.boxes.size(); ++k) {
    const auto& b = plot.boxes[k];
    const double cx = x0 + slot * (static_cast<double>(k) + 0.5);
    const double half = std::min(30.0, slot * 0.3);
    out << "<g class=\"box\">\n"
        << "<line x1=\"" << cx << "\" y1=\"" << py(b.lo_whisker) << "\" x2=\"" << cx << "\" y2=\"" << py(b.q1)
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << cx << "\" y1=\"" << py(b.q3) << "\" x2=\"" << cx << "\" y2=\"" << py(b.hi_whisker)
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << cx - half / 2 << "\" y1=\"" << py(b.lo_whisker) << "\" x2=\"" << cx + half / 2
        << "\" y2=\"" << py(b.lo_whisker) << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << cx - half / 2 << "\" y1=\"" << py(b.hi_whisker) << "\" x2=\"" << cx + half / 2
        << "\" y2=\"" << py(b.hi_whisker) << "\" stroke=\"black\"/>\n"
        << "<rect x=\"" << cx - half << "\" y=\"" << py(b.q3) << "\" width=\"" << 2 * half << "\" height=\""
        << std::max(py(b.q1) - py(b.q3), 0.5) << "\" fill=\"" << kPalette[k % std::size(kPalette)]
        << "\" fill-opacity=\"0.35\" stroke=\"black\"/>\n"
        << "<line x1=\"" << cx - half << "\" y1=\"" << py(b.median) << "\" x2=\"" << cx + half << "\" y2=\""
        << py(b.median) << "\" stroke=\"black\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << cx << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">" << escape(b.label)
        << "</text>\n"
        << "</g>\n";
  }
  out << "</svg>\n";
}

void emit_plot(PlotKind kind, const Table& table, const std::string& path, const std::string& title) {
  if (table.columns.empty() || table.rows.empty()) throw Error(ErrorKind::schema_error, "empty table");
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    if (table.rows[r].size() != table.columns.size())
      throw Error(ErrorKind::schema_error, "row " + std::to_string(r + 1) + " does not match the header width");
  auto save = [&](const auto& plot) {
    std::ostringstream svg;
    write_svg(svg, plot);
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::schema_error, "cannot write '" + path + "'");
    out << svg.str();
  };
  if (kind == PlotKind::curve) {
    if (table.columns.size() < 2) throw Error(ErrorKind::schema_error, "curve table needs x and at least one series");
    CurvePlot plot{title, table.columns[0], "", {}};
    for (std::size_t c = 1; c < table.columns.size(); ++c) {
      Series s{table.columns[c], {}, {}};
      for (std::size_t r = 0; r < table.rows.size(); ++r) {
        s.x.push_back(to_number(table.rows[r][0], r + 1));
        s.y.push_back(to_number(table.rows[r][c], r + 1));
      }
      plot.series.push_back(std::move(s));
    }
    save(plot);
    return;
  }
  const std::vector<std::string> expected = {"label", "lo_whisker", "q1", "median", "q3", "hi_whisker"};
  if (table.columns != expected)
    throw Error(ErrorKind::schema_error, "boxplot table needs columns label,lo_whisker,q1,median,q3,hi_whisker");
  BoxPlot plot{title, "", {}};
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    plot.boxes.push_back({row[0], to_number(row[1], r + 1), to_number(row[2], r + 1), to_number(row[3], r + 1),
                          to_number(row[4], r + 1), to_number(row[5], r + 1)});
  }
  save(plot);
}

}  // namespace skewtest
