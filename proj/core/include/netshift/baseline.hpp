#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netshift/temporal_graph.hpp"

namespace netshift {

enum class ScalarStatistic { mean_degree, mean_geodesic };

std::string to_string(ScalarStatistic statistic);
ScalarStatistic scalar_statistic_from_string(const std::string& name);

/// One value per snapshot, in order. Snapshots whose mean geodesic is
/// undefined (no connected pair) are empty rather than filled in.
std::vector<std::optional<double>> scalar_series(const TemporalNetwork& net,
                                                 ScalarStatistic statistic);

enum class TTestForm {
  prediction,  // t = (x - mean) / (s * sqrt(1 + 1/w))
  plain,       // t = (x - mean) / (s / sqrt(w))
};

struct ScalarWindowTest {
  std::vector<double> values;
  double probe = 0.0;
  double t = 0.0;
  std::size_t dof = 0;
  double p = 1.0;
  double alpha = 0.05;
  bool accepted = false;
  bool degenerate = false;  // zero window variance with a differing probe
};

/// Two-tailed P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double students_t_two_tailed(double t, double dof);

/// Two-tailed test of `probe` against the window sample. Needs at least two values.
ScalarWindowTest t_test_detect(std::span<const double> window, double probe, double alpha,
                               TTestForm form = TTestForm::prediction);

struct BaselineOptions {
  ScalarStatistic statistic = ScalarStatistic::mean_degree;
  std::size_t width = 16;
  double alpha = 0.05;
  TTestForm form = TTestForm::prediction;
};

void validate(const BaselineOptions& options);

struct BaselineWindow {
  std::size_t t0 = 0;
  std::size_t width = 0;
  std::size_t t_star = 0;  // the probed instant, t0 + w
  double t = 0.0;
  double p = 1.0;
  bool accepted = false;
  bool degenerate = false;
  std::size_t missing = 0;  // window values left out for lack of a geodesic
  bool skipped = false;     // probe missing or fewer than two usable values
};

struct BaselineReport {
  std::size_t horizon = 0;
  std::int64_t first_time = 0;
  BaselineOptions options;
  std::vector<BaselineWindow> windows;

  std::vector<std::size_t> change_points() const;
};

/// Tests snapshot t0 + w against the w snapshots before it, for every t0 with
/// t0 + w inside the series.
BaselineReport detect_baseline(const TemporalNetwork& series, const BaselineOptions& options);

}  // namespace netshift
