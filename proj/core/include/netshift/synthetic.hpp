#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "netshift/block_model.hpp"
#include "netshift/temporal_graph.hpp"

namespace netshift {

struct Phase {
  BlockMatrix Q;
  std::vector<std::size_t> block_sizes;  // contiguous layout: block 0 first
  std::size_t duration = 1;
};

struct PlantedSeriesSpec {
  std::string name;
  Family family = Family::bernoulli;
  std::vector<Phase> phases;
  std::uint64_t seed = 0;

  std::size_t node_count() const;
  std::size_t length() const;
  /// Throws std::invalid_argument when phases disagree on N, have zero
  /// duration, or carry Q matrices of the wrong shape or range.
  void validate() const;
};

struct PlantedSeries {
  TemporalNetwork network;
  std::vector<std::size_t> change_points;  // snapshot indices where a new phase starts
};

/// Snapshot t is drawn from its phase's block model with the stream (seed, t).
PlantedSeries generate_series(const PlantedSeriesSpec& spec);

/// The three two-phase setups with 16 + 16 snapshots, keyed "ER->2C", "2C->CP", "CP->2C".
const std::map<std::string, PlantedSeriesSpec>& builtin_specs();

/// Looks up a builtin by name, ignoring case and accepting "er-2c" style aliases
/// and the arrow character. Throws std::invalid_argument for unknown names.
PlantedSeriesSpec builtin_spec(std::string_view name);

}  // namespace netshift
