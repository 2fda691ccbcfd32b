#include "netshift/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace netshift {

std::string to_string(ScalarStatistic statistic) {
  return statistic == ScalarStatistic::mean_degree ? "mean_degree" : "mean_geodesic";
}

ScalarStatistic scalar_statistic_from_string(const std::string& name) {
  if (name == "mean_degree") return ScalarStatistic::mean_degree;
  if (name == "mean_geodesic") return ScalarStatistic::mean_geodesic;
  throw std::invalid_argument("unknown scalar statistic '" + name + "'");
}

std::vector<std::optional<double>> scalar_series(const TemporalNetwork& net,
                                                 ScalarStatistic statistic) {
  std::vector<std::optional<double>> values;
  values.reserve(net.size());
  for (const auto& s : net.snapshots()) {
    if (statistic == ScalarStatistic::mean_degree) {
      values.emplace_back(mean_degree(s));
    } else {
      values.push_back(mean_geodesic(s));
    }
  }
  return values;
}

double students_t_two_tailed(double t, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isnan(t)) throw std::invalid_argument("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(dof);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

ScalarWindowTest t_test_detect(std::span<const double> window, double probe, double alpha,
                               TTestForm form) {
  if (window.size() < 2) throw std::invalid_argument("t-test needs at least two window values");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  ScalarWindowTest test;
  test.values.assign(window.begin(), window.end());
  test.probe = probe;
  test.alpha = alpha;
  test.dof = window.size() - 1;
  const auto w = static_cast<double>(window.size());
  const double mean = std::accumulate(window.begin(), window.end(), 0.0) / w;
  double ss = 0.0;
  for (const double x : window) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (w - 1.0));
  if (sd == 0.0) {
    if (probe == mean) {
      test.t = 0.0;
      test.p = 1.0;
    } else {
      test.t = probe > mean ? INFINITY : -INFINITY;
      test.p = 0.0;
      test.degenerate = true;
    }
  } else {
    const double scale = form == TTestForm::prediction ? sd * std::sqrt(1.0 + 1.0 / w)
                                                       : sd / std::sqrt(w);
    test.t = (probe - mean) / scale;
    test.p = students_t_two_tailed(test.t, static_cast<double>(test.dof));
  }
  test.accepted = test.p < alpha;
  return test;
}

void validate(const BaselineOptions& options) {
  if (options.width < 2) throw std::invalid_argument("window width must be at least 2");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

BaselineReport detect_baseline(const TemporalNetwork& series, const BaselineOptions& options) {
  validate(options);
  if (series.size() <= options.width) {
    throw std::invalid_argument("series has " + std::to_string(series.size()) +
                                " snapshots, too few for a window of " +
                                std::to_string(options.width) + " plus a probe");
  }
  const auto values = scalar_series(series, options.statistic);
  BaselineReport report;
  report.horizon = series.size();
  report.first_time = series.first_time();
  report.options = options;
  for (std::size_t t0 = 0; t0 + options.width < series.size(); ++t0) {
    BaselineWindow row;
    row.t0 = t0;
    row.width = options.width;
    row.t_star = t0 + options.width;
    std::vector<double> sample;
    for (std::size_t t = t0; t < row.t_star; ++t) {
      if (values[t]) {
        sample.push_back(*values[t]);
      } else {
        ++row.missing;
      }
    }
    const auto& probe = values[row.t_star];
    if (!probe || sample.size() < 2) {
      row.skipped = true;
    } else {
      const auto test = t_test_detect(sample, *probe, options.alpha, options.form);
      row.t = test.t;
      row.p = test.p;
      row.accepted = test.accepted;
      row.degenerate = test.degenerate;
    }
    report.windows.push_back(row);
  }
  return report;
}

std::vector<std::size_t> BaselineReport::change_points() const {
  std::vector<std::size_t> points;
  for (const auto& w : windows) {
    if (w.accepted) points.push_back(w.t_star);
  }
  return points;
}

}  // namespace netshift
