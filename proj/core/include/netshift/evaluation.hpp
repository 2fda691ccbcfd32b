#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "netshift/baseline.hpp"
#include "netshift/changepoint.hpp"

namespace netshift {

/// A ratio that may be undefined for lack of a denominator. Undefined scores
/// carry value 0.
struct Score {
  double value = 0.0;
  bool defined = true;
};

/// Fraction of found points with a known point at most `delay` instants away.
Score precision(std::span<const std::size_t> found, std::span<const std::size_t> known,
                std::size_t delay);
/// Fraction of known points with a found point at most `delay` instants away.
Score recall(std::span<const std::size_t> found, std::span<const std::size_t> known,
             std::size_t delay);

struct PrecisionRecallRow {
  std::size_t delay = 0;
  Score precision;
  Score recall;
};

/// Rows for delay = 0..max_delay.
std::vector<PrecisionRecallRow> precision_recall_table(std::span<const std::size_t> found,
                                                       std::span<const std::size_t> known,
                                                       std::size_t max_delay);

/// Detector-independent view of one window decision.
struct WindowDecision {
  std::size_t t0 = 0;
  std::size_t width = 0;
  std::size_t t_star = 0;
  double p = 1.0;
  bool accepted = false;
};

struct RunDecisions {
  std::size_t horizon = 0;
  std::vector<WindowDecision> windows;

  /// Instants accepted by at least one window, ascending and distinct.
  std::vector<std::size_t> change_points() const;
};

RunDecisions decisions_of(const DetectionReport& report);
/// Skipped baseline windows are left out.
RunDecisions decisions_of(const BaselineReport& report);

/// For each instant, the fraction of runs that report it as a change point.
std::vector<double> detection_rate_curve(std::span<const RunDecisions> runs, std::size_t horizon);

/// For each instant, 1 - p averaged over the windows (of all runs) whose best
/// split is that instant; 0 for instants never chosen.
std::vector<double> mean_one_minus_p_curve(std::span<const RunDecisions> runs,
                                           std::size_t horizon);

struct PlotColumn {
  std::string name;
  std::vector<double> values;
};

/// Rows keyed by x, one column per method or quantity.
struct PlotTable {
  std::string x_label = "t";
  std::vector<double> x;
  std::vector<PlotColumn> columns;

  void validate() const;
};

PlotTable precision_recall_plot(std::span<const PrecisionRecallRow> rows);
PlotTable curve_plot(std::span<const PlotColumn> curves);

void write_csv(std::ostream& out, const PlotTable& table);
void write_csv(const std::string& path, const PlotTable& table);
/// Parses the layout write_csv produces; lines starting with '#' are skipped.
PlotTable read_plot_csv(std::istream& in);

enum class ChartKind { bar, line };

/// Self-contained SVG chart, with grouped bars or polylines per column.
void write_svg(std::ostream& out, const PlotTable& table, ChartKind kind,
               const std::string& title = {});
void write_svg(const std::string& path, const PlotTable& table, ChartKind kind,
               const std::string& title = {});

}  // namespace netshift
