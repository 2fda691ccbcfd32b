#include "netshift/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "netshift/errors.hpp"

namespace netshift {
namespace {

std::size_t distance(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

bool has_match(std::size_t t, std::span<const std::size_t> others, std::size_t delay) {
  return std::ranges::any_of(others, [&](std::size_t o) { return distance(t, o) <= delay; });
}

Score matched_fraction(std::span<const std::size_t> points, std::span<const std::size_t> targets,
                       std::size_t delay) {
  if (points.empty()) return {0.0, false};
  const auto hits = std::ranges::count_if(points, [&](std::size_t t) {
    return has_match(t, targets, delay);
  });
  return {static_cast<double>(hits) / static_cast<double>(points.size()), true};
}

void check_runs(std::span<const RunDecisions> runs, std::size_t horizon) {
  if (runs.empty()) throw std::invalid_argument("no runs");
  for (const auto& run : runs) {
    if (run.horizon != horizon) {
      throw DataError("run horizon " + std::to_string(run.horizon) +
                      " does not match the expected horizon " + std::to_string(horizon));
    }
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::string escape_xml(const std::string& text) {
  std::string escaped;
  for (const char c : text) {
    switch (c) {
      case '&': escaped += "&amp;"; break;
      case '<': escaped += "&lt;"; break;
      case '>': escaped += "&gt;"; break;
      case '"': escaped += "&quot;"; break;
      default: escaped += c;
    }
  }
  return escaped;
}

std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

Score precision(std::span<const std::size_t> found, std::span<const std::size_t> known,
                std::size_t delay) {
  return matched_fraction(found, known, delay);
}

Score recall(std::span<const std::size_t> found, std::span<const std::size_t> known,
             std::size_t delay) {
  return matched_fraction(known, found, delay);
}

std::vector<PrecisionRecallRow> precision_recall_table(std::span<const std::size_t> found,
                                                       std::span<const std::size_t> known,
                                                       std::size_t max_delay) {
  std::vector<PrecisionRecallRow> rows;
  rows.reserve(max_delay + 1);
  for (std::size_t s = 0; s <= max_delay; ++s) {
    rows.push_back({s, precision(found, known, s), recall(found, known, s)});
  }
  return rows;
}

std::vector<std::size_t> RunDecisions::change_points() const {
  std::vector<std::size_t> points;
  for (const auto& w : windows) {
    if (w.accepted) points.push_back(w.t_star);
  }
  std::ranges::sort(points);
  const auto [first, last] = std::ranges::unique(points);
  points.erase(first, last);
  return points;
}

RunDecisions decisions_of(const DetectionReport& report) {
  RunDecisions run;
  run.horizon = report.horizon;
  for (const auto& w : report.windows) run.windows.push_back({w.t0, w.width, w.t_star, w.p, w.accepted});
  return run;
}

RunDecisions decisions_of(const BaselineReport& report) {
  RunDecisions run;
  run.horizon = report.horizon;
  for (const auto& w : report.windows) {
    if (!w.skipped) run.windows.push_back({w.t0, w.width, w.t_star, w.p, w.accepted});
  }
  return run;
}

std::vector<double> detection_rate_curve(std::span<const RunDecisions> runs, std::size_t horizon) {
  check_runs(runs, horizon);
  std::vector<double> curve(horizon, 0.0);
  for (const auto& run : runs) {
    for (const auto t : run.change_points()) {
      if (t < horizon) curve[t] += 1.0;
    }
  }
  for (auto& v : curve) v /= static_cast<double>(runs.size());
  return curve;
}

std::vector<double> mean_one_minus_p_curve(std::span<const RunDecisions> runs,
                                           std::size_t horizon) {
  check_runs(runs, horizon);
  std::vector<double> sum(horizon, 0.0), count(horizon, 0.0);
  for (const auto& run : runs) {
    for (const auto& w : run.windows) {
      if (w.t_star >= horizon) continue;
      sum[w.t_star] += 1.0 - w.p;
      count[w.t_star] += 1.0;
    }
  }
  for (std::size_t t = 0; t < horizon; ++t) {
    if (count[t] > 0.0) sum[t] /= count[t];
  }
  return sum;
}

void PlotTable::validate() const {
  if (columns.empty()) throw std::invalid_argument("plot table has no columns");
  for (const auto& c : columns) {
    if (c.values.size() != x.size()) {
      throw std::invalid_argument("column '" + c.name + "' has " + std::to_string(c.values.size()) +
                                  " values for " + std::to_string(x.size()) + " rows");
    }
  }
}

PlotTable precision_recall_plot(std::span<const PrecisionRecallRow> rows) {
  PlotTable table;
  table.x_label = "delay";
  table.columns = {{"precision", {}}, {"recall", {}}};
  for (const auto& r : rows) {
    table.x.push_back(static_cast<double>(r.delay));
    table.columns[0].values.push_back(r.precision.value);
    table.columns[1].values.push_back(r.recall.value);
  }
  return table;
}

PlotTable curve_plot(std::span<const PlotColumn> curves) {
  if (curves.empty()) throw std::invalid_argument("no curves to plot");
  PlotTable table;
  table.columns.assign(curves.begin(), curves.end());
  for (std::size_t t = 0; t < curves.front().values.size(); ++t) table.x.push_back(static_cast<double>(t));
  table.validate();
  return table;
}

void write_csv(std::ostream& out, const PlotTable& table) {
  table.validate();
  out << table.x_label;
  for (const auto& c : table.columns) out << ',' << c.name;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < table.x.size(); ++i) {
    out << table.x[i];
    for (const auto& c : table.columns) out << ',' << c.values[i];
    out << '\n';
  }
}

void write_csv(const std::string& path, const PlotTable& table) {
  table.validate();
  auto out = open_output(path);
  write_csv(out, table);
}

PlotTable read_plot_csv(std::istream& in) {
  const auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream s(line);
    while (std::getline(s, field, ',')) fields.push_back(field);
    return fields;
  };
  std::string line;
  while (std::getline(in, line) && (line.empty() || line.front() == '#')) {
  }
  if (line.empty()) throw DataError("plot CSV has no header");
  const auto header = split(line);
  if (header.size() < 2) throw DataError("plot CSV needs an x column and at least one value column");
  PlotTable table;
  table.x_label = header.front();
  for (std::size_t c = 1; c < header.size(); ++c) table.columns.push_back({header[c], {}});
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw DataError("plot CSV row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(header.size()));
    }
    try {
      table.x.push_back(std::stod(fields[0]));
      for (std::size_t c = 1; c < fields.size(); ++c) table.columns[c - 1].values.push_back(std::stod(fields[c]));
    } catch (const std::exception&) {
      throw DataError("plot CSV row " + std::to_string(row) + " is not numeric");
    }
  }
  return table;
}

void write_svg(std::ostream& out, const PlotTable& table, ChartKind kind, const std::string& title) {
  table.validate();
  constexpr double width = 720.0, height = 360.0;
  constexpr double left = 60.0, right = 20.0, top = 40.0, bottom = 50.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double y_max = 0.0;
  for (const auto& c : table.columns) {
    for (const double v : c.values) {
      if (std::isfinite(v)) y_max = std::max(y_max, v);
    }
  }
  if (y_max <= 0.0) y_max = 1.0;
  const std::size_t rows = table.x.size();
  const double slot = rows > 0 ? plot_w / static_cast<double>(rows) : plot_w;
  const auto y_of = [&](double v) {
    return top + plot_h * (1.0 - std::clamp(std::isfinite(v) ? v : 0.0, 0.0, y_max) / y_max);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << escape_xml(title) << "</text>\n";
  }
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = y_max * i / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << y_of(v) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_number(v)
        << "</text>\n";
  }
  const std::size_t label_step = std::max<std::size_t>(1, rows / 16);
  for (std::size_t i = 0; i < rows; i += label_step) {
    out << "<text x=\"" << left + slot * (static_cast<double>(i) + 0.5) << "\" y=\""
        << top + plot_h + 16 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << format_number(table.x[i]) << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape_xml(table.x_label) << "</text>\n";

  const std::size_t series = table.columns.size();
  for (std::size_t c = 0; c < series; ++c) {
    const auto& column = table.columns[c];
    const char* color = kPalette[c % std::size(kPalette)];
    out << "<g class=\"series\" data-name=\"" << escape_xml(column.name) << "\" fill=\"" << color
        << "\" stroke=\"" << color << "\">\n";
    if (kind == ChartKind::bar) {
      const double bar_w = slot * 0.8 / static_cast<double>(series);
      for (std::size_t i = 0; i < rows; ++i) {
        const double x = left + slot * static_cast<double>(i) + slot * 0.1 + bar_w * static_cast<double>(c);
        const double y = y_of(column.values[i]);
        out << "<rect class=\"bar\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w
            << "\" height=\"" << top + plot_h - y << "\" stroke=\"none\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < rows; ++i) {
        out << left + slot * (static_cast<double>(i) + 0.5) << ',' << y_of(column.values[i]) << ' ';
      }
      out << "\"/>\n";
    }
    out << "</g>\n";
    out << "<text x=\"" << left + plot_w - 4 << "\" y=\"" << top + 14 * static_cast<double>(c + 1)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
        << "\">" << escape_xml(column.name) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_svg(const std::string& path, const PlotTable& table, ChartKind kind,
               const std::string& title) {
  table.validate();
  auto out = open_output(path);
  write_svg(out, table, kind, title);
}

}  // namespace netshift
