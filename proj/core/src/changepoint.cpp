#include "netshift/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "netshift/errors.hpp"
#include "netshift/likelihood.hpp"
#include "netshift/parallel.hpp"
#include "netshift/random.hpp"
#include "netshift/sampling.hpp"

namespace netshift {
namespace {

// Seed roles inside one window.
enum : std::uint64_t { kNullRole = 0, kBeforeRole = 1, kAfterRole = 2, kBootstrapRole = 3 };

MultiGraph aggregate(std::span<const MultiGraph> snapshots) {
  if (snapshots.empty()) throw std::invalid_argument("cannot aggregate an empty run of snapshots");
  std::vector<Edge> edges;
  for (const auto& g : snapshots) edges.insert(edges.end(), g.edges().begin(), g.edges().end());
  return MultiGraph(snapshots.front().node_count(), std::move(edges));
}

std::vector<MultiGraph> to_multigraphs(std::span<const Snapshot> snapshots) {
  std::vector<MultiGraph> graphs;
  graphs.reserve(snapshots.size());
  for (const auto& s : snapshots) graphs.emplace_back(s);
  return graphs;
}

BlockModel as_family(const BlockModel& model, Family family) {
  if (family == model.family) return model;
  auto converted = model;
  converted.family = family;
  const auto k = converted.block_count();
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = 0; s < k; ++s) {
      converted.Q(r, s) = std::min(converted.Q(r, s), 1.0);
    }
  }
  return converted;
}

}  // namespace

std::string_view to_string(SurrogateFamily family) {
  switch (family) {
    case SurrogateFamily::poisson: return "poisson";
    case SurrogateFamily::bernoulli: return "bernoulli";
    default: return "automatic";
  }
}

SurrogateFamily parse_surrogate_family(std::string_view name) {
  if (name == "automatic") return SurrogateFamily::automatic;
  if (name == "poisson") return SurrogateFamily::poisson;
  if (name == "bernoulli") return SurrogateFamily::bernoulli;
  throw std::invalid_argument("unknown surrogate family '" + std::string(name) + "'");
}

Family surrogate_family(SurrogateFamily choice, std::span<const MultiGraph> window) {
  switch (choice) {
    case SurrogateFamily::poisson: return Family::poisson;
    case SurrogateFamily::bernoulli: return Family::bernoulli;
    default: break;
  }
  const bool simple = std::ranges::all_of(window, [](const MultiGraph& g) { return g.max_multiplicity() <= 1; });
  return simple ? Family::bernoulli : Family::poisson;
}

double segment_log_likelihood(std::span<const MultiGraph> snapshots, const SegmentModel& segment,
                              bool prior_per_snapshot) {
  double total = 0.0;
  for (const auto& g : snapshots) total += poisson_log_likelihood(g, segment.partition, segment.model);
  if (!prior_per_snapshot && snapshots.size() > 1) {
    double prior = 0.0;
    const auto sizes = segment.partition.block_sizes();
    for (std::size_t r = 0; r < sizes.size(); ++r) {
      if (sizes[r] > 0) prior += static_cast<double>(sizes[r]) * std::log(segment.model.n[r]);
    }
    total -= static_cast<double>(snapshots.size() - 1) * prior;
  }
  return total;
}

SegmentModel fit_segment(std::span<const MultiGraph> snapshots, const EngineOptions& options,
                         std::optional<std::size_t> block_count, std::uint64_t seed,
                         const std::optional<Partition>& warm_start) {
  const auto graph = aggregate(snapshots);
  auto fit_options = options.fit;
  fit_options.seed = seed;
  fit_options.warm_start.reset();
  if (warm_start && (!block_count || warm_start->block_count() == *block_count)) {
    fit_options.warm_start = warm_start;
    fit_options.restarts = 1 + options.segment_restarts;
  }
  FitResult result;
  if (block_count) {
    const auto k = std::min(*block_count, graph.node_count());
    if (fit_options.warm_start && fit_options.warm_start->block_count() != k) fit_options.warm_start.reset();
    result = fit(graph, k, Family::poisson, options.degree_corrected, fit_options);
  } else {
    std::vector<std::size_t> ks;
    for (auto k : options.k_range) {
      if (k <= graph.node_count()) ks.push_back(k);
    }
    if (ks.empty()) ks.push_back(1);
    result = fit_best_k(graph, ks, Family::poisson, options.degree_corrected, fit_options);
  }
  SegmentModel segment;
  segment.length = snapshots.size();
  segment.degenerate = graph.total_multiplicity() == 0;
  segment.converged = result.converged;
  segment.sweeps = result.sweeps;
  segment.model = std::move(result.model);
  segment.partition = std::move(result.partition);
  const auto k = segment.model.block_count();
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = 0; s < k; ++s) {
      segment.model.Q(r, s) = clamp_rate(Family::poisson,
                                         segment.model.Q(r, s) / static_cast<double>(segment.length));
    }
  }
  return segment;
}

SegmentModel fit_null_model(std::span<const MultiGraph> window, const EngineOptions& options,
                            std::uint64_t seed) {
  if (window.size() < 2) throw std::invalid_argument("window width must be at least 2");
  return fit_segment(window, options, options.fixed_k, derive_seed({seed, kNullRole}));
}

double log_likelihood_ratio(std::span<const MultiGraph> window, std::size_t offset,
                            const SegmentModel& before, const SegmentModel& after,
                            const SegmentModel& null_model, bool prior_per_snapshot) {
  if (offset == 0 || offset >= window.size()) {
    throw std::invalid_argument("split must leave at least one snapshot on each side");
  }
  const auto head = window.first(offset);
  const auto tail = window.subspan(offset);
  return (segment_log_likelihood(head, before, prior_per_snapshot) -
          segment_log_likelihood(head, null_model, prior_per_snapshot)) +
         (segment_log_likelihood(tail, after, prior_per_snapshot) -
          segment_log_likelihood(tail, null_model, prior_per_snapshot));
}

ScanResult scan_window(std::span<const MultiGraph> window, const EngineOptions& options,
                       std::uint64_t seed) {
  return scan_window(window, fit_null_model(window, options, seed), options, seed);
}

ScanResult scan_window(std::span<const MultiGraph> window, SegmentModel null_model,
                       const EngineOptions& options, std::uint64_t seed) {
  if (window.size() < 2) throw std::invalid_argument("window width must be at least 2");
  ScanResult result;
  const std::optional<std::size_t> shared_k =
      options.independent_k ? options.fixed_k : std::optional(null_model.model.block_count());
  const bool per_snapshot = options.prior_per_snapshot;
  bool first = true;
  for (std::size_t offset = 1; offset < window.size(); ++offset) {
    CandidateSplit split;
    split.offset = offset;
    const auto head = window.first(offset);
    const auto tail = window.subspan(offset);
    split.before = fit_segment(head, options, shared_k, derive_seed({seed, kBeforeRole, offset}),
                               null_model.partition);
    split.after = fit_segment(tail, options, shared_k, derive_seed({seed, kAfterRole, offset}),
                              null_model.partition);
    split.lambda = log_likelihood_ratio(window, offset, split.before, split.after, null_model,
                                        per_snapshot);
    if (!std::isfinite(split.lambda)) throw NumericalError("log-likelihood ratio is not finite");
    if (first || split.lambda > result.g) {
      first = false;
      result.g = split.lambda;
      result.t_star_offset = offset;
    }
    result.models.candidates.push_back(std::move(split));
  }
  result.models.null_model = std::move(null_model);
  return result;
}

double bootstrap_statistic(const SegmentModel& null_model, std::size_t width,
                           const EngineOptions& options, std::uint64_t seed, std::size_t index,
                           Family family) {
  if (width < 2) throw std::invalid_argument("window width must be at least 2");
  const auto model = as_family(null_model.model, family);
  auto rng = make_rng({seed, kBootstrapRole, index});
  std::vector<MultiGraph> surrogate;
  surrogate.reserve(width);
  for (std::size_t t = 0; t < width; ++t) {
    surrogate.emplace_back(sample_graph(model, null_model.partition, rng));
  }
  return scan_window(surrogate, options, derive_seed({seed, kBootstrapRole, index})).g;
}

NullDistribution bootstrap_null(const SegmentModel& null_model, std::size_t width,
                                std::size_t samples, const EngineOptions& options,
                                std::uint64_t seed, std::size_t jobs, Family family) {
  if (samples < 1) throw std::invalid_argument("bootstrap needs at least one sample");
  if (width < 2) throw std::invalid_argument("window width must be at least 2");
  NullDistribution null;
  null.seed = seed;
  null.samples.assign(samples, 0.0);
  parallel_for(samples, jobs, [&](std::size_t b) {
    null.samples[b] = bootstrap_statistic(null_model, width, options, seed, b, family);
  });
  std::ranges::sort(null.samples);
  return null;
}

double p_value(double g, const NullDistribution& null) {
  if (null.samples.empty()) throw std::invalid_argument("null distribution is empty");
  const auto above = null.samples.end() - std::ranges::upper_bound(null.samples, g);
  return static_cast<double>(above) / static_cast<double>(null.samples.size());
}

void validate(const DetectorOptions& options) {
  if (options.width < 2) throw std::invalid_argument("window width must be at least 2");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (options.bootstrap < 1) throw std::invalid_argument("bootstrap sample count must be at least 1");
  if (options.engine.fit.restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (options.engine.k_range.empty() && !options.engine.fixed_k) {
    throw std::invalid_argument("k_range must not be empty");
  }
}

ChangePointResult evaluate_window(const TemporalNetwork& series, std::size_t t0,
                                  const DetectorOptions& options) {
  validate(options);
  std::vector<MultiGraph> window;
  if (options.active_nodes) {
    try {
      window = to_multigraphs(filter_active_nodes(series, t0, options.width).window.snapshots());
    } catch (const DataError&) {
      window = to_multigraphs(series.window(t0, options.width));
    }
  } else {
    window = to_multigraphs(series.window(t0, options.width));
  }
  const auto seed = derive_seed({options.seed, t0});
  auto scan = scan_window(window, options.engine, seed);
  const auto family = surrogate_family(options.surrogate, window);

  ChangePointResult result;
  result.t0 = t0;
  result.width = options.width;
  result.t_star = t0 + scan.t_star_offset;
  result.g = scan.g;
  result.bootstrap_samples = options.bootstrap;
  if (options.early_stop) {
    const auto total = static_cast<double>(options.bootstrap);
    const std::size_t batch = std::max<std::size_t>(options.jobs, 1);
    std::vector<double> stats;
    std::size_t above = 0;
    std::size_t evaluated = 0;
    bool stopped = false;
    while (!stopped && evaluated < options.bootstrap) {
      const auto count = std::min(batch, options.bootstrap - evaluated);
      stats.assign(count, 0.0);
      parallel_for(count, options.jobs, [&](std::size_t i) {
        stats[i] = bootstrap_statistic(scan.models.null_model, options.width, options.engine, seed,
                                       evaluated + i, family);
      });
      for (const double s : stats) {
        ++evaluated;
        if (s > scan.g) ++above;
        if (!(static_cast<double>(above) / total < options.alpha)) {
          stopped = true;
          break;
        }
      }
    }
    result.bootstrap_evaluated = evaluated;
    result.p = static_cast<double>(above) / total;
    result.p_lower_bound = evaluated < options.bootstrap;
  } else {
    const auto null = bootstrap_null(scan.models.null_model, options.width, options.bootstrap,
                                     options.engine, seed, options.jobs, family);
    result.bootstrap_evaluated = options.bootstrap;
    result.p = p_value(scan.g, null);
  }
  result.alpha = options.alpha;
  result.accepted = result.p < options.alpha;
  result.block_count = scan.models.null_model.model.block_count();
  result.seed = seed;
  result.degenerate = scan.models.null_model.degenerate;
  for (const auto& c : scan.models.candidates) result.lambdas.push_back(c.lambda);
  return result;
}

DetectionReport detect(const TemporalNetwork& series, const DetectorOptions& options) {
  validate(options);
  if (series.size() < options.width) {
    throw std::invalid_argument("series has " + std::to_string(series.size()) +
                                " snapshots, fewer than the window width " +
                                std::to_string(options.width));
  }
  DetectionReport report;
  report.horizon = series.size();
  report.first_time = series.first_time();
  report.options = options;
  for (std::size_t t0 = 0; t0 + options.width <= series.size(); ++t0) {
    report.windows.push_back(evaluate_window(series, t0, options));
  }
  return report;
}

std::vector<std::size_t> DetectionReport::change_points() const {
  std::vector<std::size_t> points;
  for (const auto& w : windows) {
    if (w.accepted) points.push_back(w.t_star);
  }
  std::ranges::sort(points);
  const auto [first, last] = std::ranges::unique(points);
  points.erase(first, last);
  return points;
}

std::vector<double> DetectionReport::acceptance_fractions() const {
  std::vector<double> accepted(horizon, 0.0), covering(horizon, 0.0);
  for (const auto& w : windows) {
    for (std::size_t t = w.t0 + 1; t < w.t0 + w.width && t < horizon; ++t) covering[t] += 1.0;
    if (w.accepted && w.t_star < horizon) accepted[w.t_star] += 1.0;
  }
  for (std::size_t t = 0; t < horizon; ++t) {
    if (covering[t] > 0.0) accepted[t] /= covering[t];
  }
  return accepted;
}

}  // namespace netshift
