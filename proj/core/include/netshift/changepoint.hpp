#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "netshift/block_model.hpp"
#include "netshift/fit.hpp"
#include "netshift/multigraph.hpp"
#include "netshift/temporal_graph.hpp"

namespace netshift {

/// Block model of a run of snapshots, with Q expressed per snapshot.
struct SegmentModel {
  BlockModel model;     // Poisson, Q divided by the segment length
  Partition partition;  // MAP partition of the aggregate fit
  std::size_t length = 0;
  bool degenerate = false;  // the segment had no links at all
  bool converged = false;
  std::size_t sweeps = 0;
};

struct EngineOptions {
  FitOptions fit;
  std::vector<std::size_t> k_range = k_range_up_to(6);
  std::optional<std::size_t> fixed_k;  // skips description-length selection when set
  bool degree_corrected = false;
  /// Select K separately for each segment instead of sharing the null model's K.
  bool independent_k = false;
  /// Random restarts for segment fits, on top of a warm start from the null partition.
  std::size_t segment_restarts = 1;
  /// Count the block-membership term sum_r N_r ln n_r in every snapshot's
  /// likelihood rather than once per segment.
  bool prior_per_snapshot = false;
};

struct CandidateSplit {
  std::size_t offset = 0;  // t_n - t0, in 1..w-1
  SegmentModel before;     // snapshots [t0, t_n)
  SegmentModel after;      // snapshots [t_n, t0 + w)
  double lambda = 0.0;
};

struct WindowModels {
  SegmentModel null_model;
  std::vector<CandidateSplit> candidates;
};

struct ScanResult {
  std::size_t t_star_offset = 0;  // offset of the best split inside the window
  double g = 0.0;
  WindowModels models;
};

/// Poisson complete-data log-likelihood of a run of snapshots under the
/// segment's model and partition: the membership term sum_r N_r ln n_r once
/// (or once per snapshot when `prior_per_snapshot`) plus every snapshot's link terms.
double segment_log_likelihood(std::span<const MultiGraph> snapshots, const SegmentModel& segment,
                              bool prior_per_snapshot = false);

/// Aggregates the snapshots, fits a Poisson block model (K by description
/// length unless fixed), and divides Q by the number of snapshots.
/// `warm_start` seeds restart 0 of the fit when its block count matches.
SegmentModel fit_segment(std::span<const MultiGraph> snapshots, const EngineOptions& options,
                         std::optional<std::size_t> block_count, std::uint64_t seed,
                         const std::optional<Partition>& warm_start = std::nullopt);

SegmentModel fit_null_model(std::span<const MultiGraph> window, const EngineOptions& options,
                            std::uint64_t seed);

/// ln-likelihood ratio of the split model (before, after) against the null
/// model, for a split at `offset` snapshots into the window. Each model is
/// scored segment by segment, so the null is the special case of the split
/// model whose two segments share its parameters.
double log_likelihood_ratio(std::span<const MultiGraph> window, std::size_t offset,
                            const SegmentModel& before, const SegmentModel& after,
                            const SegmentModel& null_model, bool prior_per_snapshot = false);

/// Fits every split t0 < t_n < t0 + w and returns the largest ratio g and its
/// split (ties to the earliest).
ScanResult scan_window(std::span<const MultiGraph> window, const EngineOptions& options,
                       std::uint64_t seed);

/// As above with a null model that is already fitted.
ScanResult scan_window(std::span<const MultiGraph> window, SegmentModel null_model,
                       const EngineOptions& options, std::uint64_t seed);

struct NullDistribution {
  std::vector<double> samples;  // ascending
  std::uint64_t seed = 0;
};

/// How surrogate snapshots are drawn from the null model's per-snapshot rates.
enum class SurrogateFamily {
  automatic,  // Bernoulli when every snapshot of the window is a simple graph, else Poisson
  poisson,
  bernoulli,  // link probability min(rate, 1)
};

std::string_view to_string(SurrogateFamily family);
SurrogateFamily parse_surrogate_family(std::string_view name);

/// `automatic` resolved against the window's snapshots.
Family surrogate_family(SurrogateFamily choice, std::span<const MultiGraph> window);

/// B surrogate windows of w snapshots drawn from the null model (its partition,
/// per-snapshot rates), each rescanned with the same options.
NullDistribution bootstrap_null(const SegmentModel& null_model, std::size_t width,
                                std::size_t samples, const EngineOptions& options,
                                std::uint64_t seed, std::size_t jobs = 1,
                                Family family = Family::poisson);

/// Statistic g of bootstrap surrogate `index`, the same value bootstrap_null stores for it.
double bootstrap_statistic(const SegmentModel& null_model, std::size_t width,
                           const EngineOptions& options, std::uint64_t seed, std::size_t index,
                           Family family = Family::poisson);

/// Fraction of bootstrap statistics strictly greater than g.
double p_value(double g, const NullDistribution& null);

struct ChangePointResult {
  std::size_t t0 = 0;
  std::size_t width = 0;
  std::size_t t_star = 0;  // snapshot index of the best split
  double g = 0.0;
  std::size_t bootstrap_samples = 0;
  double p = 1.0;
  double alpha = 0.05;
  bool accepted = false;
  std::size_t block_count = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;
  /// Surrogates actually evaluated; below bootstrap_samples only with early stopping.
  std::size_t bootstrap_evaluated = 0;
  /// p counts exceedances among the evaluated surrogates only, so it is a lower bound.
  bool p_lower_bound = false;
  std::vector<double> lambdas;  // one per candidate split, in order
};

struct DetectorOptions {
  std::size_t width = 16;
  double alpha = 0.05;
  std::size_t bootstrap = 200;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool active_nodes = false;
  /// Stop drawing surrogates once acceptance has become impossible. Decisions
  /// are unchanged; rejected windows then report a lower bound on p.
  bool early_stop = false;
  SurrogateFamily surrogate = SurrogateFamily::automatic;
  EngineOptions engine;
};

struct DetectionReport {
  std::size_t horizon = 0;  // number of snapshots in the series
  std::int64_t first_time = 0;
  DetectorOptions options;
  std::vector<ChangePointResult> windows;

  /// Instants accepted as t* by at least one window, ascending.
  std::vector<std::size_t> change_points() const;
  /// For each instant, accepted windows choosing it over windows whose split range contains it.
  std::vector<double> acceptance_fractions() const;
};

/// Decision for the window [t0, t0 + w) of `series`.
ChangePointResult evaluate_window(const TemporalNetwork& series, std::size_t t0,
                                  const DetectorOptions& options);

/// Slides a width-w window one snapshot at a time over the series.
DetectionReport detect(const TemporalNetwork& series, const DetectorOptions& options);

void validate(const DetectorOptions& options);

}  // namespace netshift
