#include "netshift_cli/run_config.hpp"

#include <stdexcept>

namespace netshift::cli {
namespace {

template <class T>
void read_optional(const Json& j, const char* key, T& value) {
  if (const auto it = j.find(key); it != j.end() && !it->is_null()) it->get_to(value);
}

template <class T>
void read_optional(const Json& j, const char* key, std::optional<T>& value) {
  if (const auto it = j.find(key); it != j.end()) {
    value = it->is_null() ? std::nullopt : std::optional<T>(it->get<T>());
  }
}

template <class T>
Json nullable(const std::optional<T>& value) {
  return value ? Json(*value) : Json(nullptr);
}

bool one_of(const std::string& value, std::initializer_list<const char*> choices) {
  for (const char* c : choices) {
    if (value == c) return true;
  }
  return false;
}

}  // namespace

void RunConfig::validate() const {
  if (!one_of(detector, {"sbm", "dcsbm", "mean_degree", "mean_geodesic"})) {
    throw std::invalid_argument("unknown detector '" + detector + "'");
  }
  if (window && *window < 2) throw std::invalid_argument("window must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  parse_surrogate_family(surrogate);
  if (bootstrap < 1) throw std::invalid_argument("bootstrap must be at least 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (k && *k < 1) throw std::invalid_argument("k must be at least 1");
  if (k_max < 1) throw std::invalid_argument("kmax must be at least 1");
  for (const auto k_value : k_range) {
    if (k_value < 1) throw std::invalid_argument("k_range entries must be at least 1");
  }
  parse_family(family);
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_sweeps < 1 || max_iterations < 1) {
    throw std::invalid_argument("sweep and iteration caps must be at least 1");
  }
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  if (!one_of(t_test, {"prediction", "plain"})) throw std::invalid_argument("unknown t-test form '" + t_test + "'");
  if (!one_of(format, {"json", "csv"})) throw std::invalid_argument("unknown format '" + format + "'");
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (!one_of(kind, {"bar", "line"})) throw std::invalid_argument("unknown chart kind '" + kind + "'");
}

std::vector<std::size_t> RunConfig::resolved_k_range() const {
  return k_range.empty() ? k_range_up_to(k_max) : k_range;
}

FitOptions RunConfig::fit_options() const {
  FitOptions options;
  options.restarts = restarts;
  options.max_sweeps = max_sweeps;
  options.max_iterations = max_iterations;
  options.tolerance = tolerance;
  options.damping = damping;
  options.seed = seed;
  return options;
}

DetectorOptions RunConfig::detector_options() const {
  DetectorOptions options;
  if (window) options.width = *window;
  options.alpha = alpha;
  options.bootstrap = bootstrap;
  options.seed = seed;
  options.jobs = jobs;
  options.active_nodes = active_nodes;
  options.early_stop = early_stop;
  options.surrogate = parse_surrogate_family(surrogate);
  options.engine.fit = fit_options();
  options.engine.k_range = resolved_k_range();
  options.engine.fixed_k = k;
  options.engine.degree_corrected = degree_corrected || detector == "dcsbm";
  options.engine.independent_k = independent_k;
  options.engine.segment_restarts = segment_restarts;
  return options;
}

BaselineOptions RunConfig::baseline_options() const {
  BaselineOptions options;
  options.statistic = scalar_statistic_from_string(detector);
  if (window) options.width = *window;
  options.alpha = alpha;
  options.form = t_test == "plain" ? TTestForm::plain : TTestForm::prediction;
  return options;
}

void to_json(Json& j, const RunConfig& c) {
  j = Json{{"command", c.command},
           {"detector", c.detector},
           {"window", nullable(c.window)},
           {"alpha", c.alpha},
           {"bootstrap", c.bootstrap},
           {"early_stop", c.early_stop},
           {"surrogate", c.surrogate},
           {"k", nullable(c.k)},
           {"k_max", c.k_max},
           {"k_range", c.k_range},
           {"family", c.family},
           {"degree_corrected", c.degree_corrected},
           {"restarts", c.restarts},
           {"segment_restarts", c.segment_restarts},
           {"independent_k", c.independent_k},
           {"damping", c.damping},
           {"tolerance", c.tolerance},
           {"max_sweeps", c.max_sweeps},
           {"max_iterations", c.max_iterations},
           {"seed", c.seed},
           {"jobs", c.jobs},
           {"active_nodes", c.active_nodes},
           {"t_test", c.t_test},
           {"input", c.input},
           {"output", c.output},
           {"csv", c.csv},
           {"format", c.format},
           {"snapshot", nullable(c.snapshot)},
           {"spec", c.spec},
           {"spec_file", c.spec_file},
           {"runs", c.runs},
           {"output_dir", c.output_dir},
           {"reports", c.reports},
           {"truth", c.truth},
           {"max_delay", c.max_delay},
           {"svg", c.svg},
           {"kind", c.kind},
           {"title", c.title}};
}

void from_json(const Json& j, RunConfig& c) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  read_optional(j, "command", c.command);
  read_optional(j, "detector", c.detector);
  read_optional(j, "window", c.window);
  read_optional(j, "alpha", c.alpha);
  read_optional(j, "bootstrap", c.bootstrap);
  read_optional(j, "early_stop", c.early_stop);
  read_optional(j, "surrogate", c.surrogate);
  read_optional(j, "k", c.k);
  read_optional(j, "k_max", c.k_max);
  read_optional(j, "k_range", c.k_range);
  read_optional(j, "family", c.family);
  read_optional(j, "degree_corrected", c.degree_corrected);
  read_optional(j, "restarts", c.restarts);
  read_optional(j, "segment_restarts", c.segment_restarts);
  read_optional(j, "independent_k", c.independent_k);
  read_optional(j, "damping", c.damping);
  read_optional(j, "tolerance", c.tolerance);
  read_optional(j, "max_sweeps", c.max_sweeps);
  read_optional(j, "max_iterations", c.max_iterations);
  read_optional(j, "seed", c.seed);
  read_optional(j, "jobs", c.jobs);
  read_optional(j, "active_nodes", c.active_nodes);
  read_optional(j, "t_test", c.t_test);
  read_optional(j, "input", c.input);
  read_optional(j, "output", c.output);
  read_optional(j, "csv", c.csv);
  read_optional(j, "format", c.format);
  read_optional(j, "snapshot", c.snapshot);
  read_optional(j, "spec", c.spec);
  read_optional(j, "spec_file", c.spec_file);
  read_optional(j, "runs", c.runs);
  read_optional(j, "output_dir", c.output_dir);
  read_optional(j, "reports", c.reports);
  read_optional(j, "truth", c.truth);
  read_optional(j, "max_delay", c.max_delay);
  read_optional(j, "svg", c.svg);
  read_optional(j, "kind", c.kind);
  read_optional(j, "title", c.title);
}

RunConfig resolve_config(const Json& file, const Json& flags,
                         const std::optional<std::string>& env_seed) {
  Json merged = RunConfig{};
  if (env_seed && !file.contains("seed") && !flags.contains("seed")) {
    std::size_t used = 0;
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(*env_seed, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != env_seed->size()) {
      throw std::invalid_argument("NETSHIFT_SEED must be a non-negative integer, got '" + *env_seed + "'");
    }
    merged["seed"] = seed;
  }
  try {
    merged.merge_patch(file);
    merged.merge_patch(flags);
    RunConfig config = merged.get<RunConfig>();
    config.validate();
    return config;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
}

}  // namespace netshift::cli
