#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <netshift/baseline.hpp>
#include <netshift/changepoint.hpp>
#include <netshift/fit.hpp>
#include <netshift/serialization.hpp>

namespace netshift::cli {

/// Every tunable of every command. Values resolve as command-line flags over
/// the config file over the environment (seed only) over these defaults.
struct RunConfig {
  std::string command;

  std::string detector = "sbm";  // sbm | dcsbm | mean_degree | mean_geodesic
  std::optional<std::size_t> window;
  double alpha = 0.05;
  std::size_t bootstrap = 200;
  bool early_stop = false;
  std::string surrogate = "automatic";  // automatic | poisson | bernoulli
  std::optional<std::size_t> k;  // fixed block count
  std::size_t k_max = 6;
  std::vector<std::size_t> k_range;  // overrides k_max when non-empty
  std::string family = "poisson";
  bool degree_corrected = false;
  std::size_t restarts = 10;
  std::size_t segment_restarts = 1;
  bool independent_k = false;
  double damping = 0.7;
  double tolerance = 1e-6;
  std::size_t max_sweeps = 500;
  std::size_t max_iterations = 100;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool active_nodes = false;
  std::string t_test = "prediction";  // prediction | plain

  std::string input;
  std::string output;
  std::string csv;
  std::string format = "json";  // json | csv
  std::optional<std::size_t> snapshot;

  std::string spec;
  std::string spec_file;
  std::size_t runs = 1;
  std::string output_dir = ".";

  std::vector<std::string> reports;
  std::vector<std::string> truth;
  std::size_t max_delay = 10;
  bool svg = false;

  std::string kind = "bar";  // bar | line
  std::string title;

  /// Throws std::invalid_argument on values outside their allowed ranges.
  void validate() const;

  std::vector<std::size_t> resolved_k_range() const;
  FitOptions fit_options() const;
  DetectorOptions detector_options() const;
  BaselineOptions baseline_options() const;
  bool baseline() const { return detector == "mean_degree" || detector == "mean_geodesic"; }
};

void to_json(Json& j, const RunConfig& config);
void from_json(const Json& j, RunConfig& config);

/// Layers `file` and then `flags` over the defaults. `env_seed` applies when
/// neither layer sets a seed.
RunConfig resolve_config(const Json& file, const Json& flags,
                         const std::optional<std::string>& env_seed);

}  // namespace netshift::cli
