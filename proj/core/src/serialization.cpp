#include "netshift/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "netshift/errors.hpp"

namespace netshift {
namespace {

template <class T>
void read_optional(const Json& j, const char* key, T& value) {
  if (const auto it = j.find(key); it != j.end() && !it->is_null()) value = it->get<T>();
}

Json rows_of(const BlockMatrix& q) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < q.size(); ++r) {
    Json row = Json::array();
    for (std::size_t s = 0; s < q.size(); ++s) row.push_back(q(r, s));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void to_json(Json& j, const BlockMatrix& q) { j = rows_of(q); }

void from_json(const Json& j, BlockMatrix& q) {
  if (!j.is_array()) throw DataError("block matrix must be an array of rows");
  const auto k = j.size();
  BlockMatrix m(k);
  for (std::size_t r = 0; r < k; ++r) {
    if (!j[r].is_array() || j[r].size() != k) throw DataError("block matrix must be square");
    for (std::size_t s = 0; s < k; ++s) m(r, s) = j[r][s].get<double>();
  }
  q = std::move(m);
}

void to_json(Json& j, const FitResult& result) {
  j = Json{{"K", result.block_count()},
           {"family", std::string(to_string(result.model.family))},
           {"degree_corrected", result.model.degree_corrected()},
           {"n", result.model.n},
           {"Q", rows_of(result.model.Q)},
           {"partition", std::vector<BlockId>(result.partition.labels().begin(),
                                              result.partition.labels().end())},
           {"log_likelihood", result.log_likelihood},
           {"description_length", result.description_length},
           {"converged", result.converged},
           {"restarts", result.restarts},
           {"best_restart", result.best_restart},
           {"seed", result.seed},
           {"sweeps", result.sweeps}};
  if (result.model.degree_correction) j["theta"] = result.model.degree_correction->theta;
}

void to_json(Json& j, const FitOptions& options) {
  j = Json{{"restarts", options.restarts},
           {"max_sweeps", options.max_sweeps},
           {"max_iterations", options.max_iterations},
           {"tolerance", options.tolerance},
           {"damping", options.damping},
           {"seed", options.seed}};
}

void from_json(const Json& j, FitOptions& options) {
  read_optional(j, "restarts", options.restarts);
  read_optional(j, "max_sweeps", options.max_sweeps);
  read_optional(j, "max_iterations", options.max_iterations);
  read_optional(j, "tolerance", options.tolerance);
  read_optional(j, "damping", options.damping);
  read_optional(j, "seed", options.seed);
}

void to_json(Json& j, const EngineOptions& options) {
  j = Json{{"fit", options.fit},
           {"k_range", options.k_range},
           {"fixed_k", options.fixed_k ? Json(*options.fixed_k) : Json(nullptr)},
           {"degree_corrected", options.degree_corrected},
           {"independent_k", options.independent_k},
           {"segment_restarts", options.segment_restarts},
           {"prior_per_snapshot", options.prior_per_snapshot}};
}

void from_json(const Json& j, EngineOptions& options) {
  if (const auto it = j.find("fit"); it != j.end()) it->get_to(options.fit);
  read_optional(j, "k_range", options.k_range);
  if (const auto it = j.find("fixed_k"); it != j.end()) {
    options.fixed_k = it->is_null() ? std::nullopt : std::optional(it->get<std::size_t>());
  }
  read_optional(j, "degree_corrected", options.degree_corrected);
  read_optional(j, "independent_k", options.independent_k);
  read_optional(j, "segment_restarts", options.segment_restarts);
  read_optional(j, "prior_per_snapshot", options.prior_per_snapshot);
}

void to_json(Json& j, const DetectorOptions& options) {
  j = Json{{"width", options.width},       {"alpha", options.alpha},
           {"bootstrap", options.bootstrap}, {"seed", options.seed},
           {"jobs", options.jobs},         {"active_nodes", options.active_nodes},
           {"early_stop", options.early_stop},
           {"surrogate", std::string(to_string(options.surrogate))},
           {"engine", options.engine}};
}

void from_json(const Json& j, DetectorOptions& options) {
  read_optional(j, "width", options.width);
  read_optional(j, "alpha", options.alpha);
  read_optional(j, "bootstrap", options.bootstrap);
  read_optional(j, "seed", options.seed);
  read_optional(j, "jobs", options.jobs);
  read_optional(j, "active_nodes", options.active_nodes);
  read_optional(j, "early_stop", options.early_stop);
  if (const auto it = j.find("surrogate"); it != j.end()) {
    options.surrogate = parse_surrogate_family(it->get<std::string>());
  }
  if (const auto it = j.find("engine"); it != j.end()) it->get_to(options.engine);
}

void to_json(Json& j, const BaselineOptions& options) {
  j = Json{{"statistic", to_string(options.statistic)},
           {"width", options.width},
           {"alpha", options.alpha},
           {"form", options.form == TTestForm::prediction ? "prediction" : "plain"}};
}

void from_json(const Json& j, BaselineOptions& options) {
  if (const auto it = j.find("statistic"); it != j.end()) {
    options.statistic = scalar_statistic_from_string(it->get<std::string>());
  }
  read_optional(j, "width", options.width);
  read_optional(j, "alpha", options.alpha);
  if (const auto it = j.find("form"); it != j.end()) {
    const auto form = it->get<std::string>();
    if (form == "prediction") {
      options.form = TTestForm::prediction;
    } else if (form == "plain") {
      options.form = TTestForm::plain;
    } else {
      throw std::invalid_argument("unknown t-test form '" + form + "'");
    }
  }
}

void to_json(Json& j, const ChangePointResult& window) {
  j = Json{{"t0", window.t0},
           {"w", window.width},
           {"t_star", window.t_star},
           {"g", window.g},
           {"p", window.p},
           {"accepted", window.accepted},
           {"K", window.block_count},
           {"seed", window.seed},
           {"bootstrap", window.bootstrap_samples},
           {"bootstrap_evaluated", window.bootstrap_evaluated},
           {"p_lower_bound", window.p_lower_bound},
           {"alpha", window.alpha},
           {"degenerate", window.degenerate},
           {"lambdas", window.lambdas}};
}

void to_json(Json& j, const DetectionReport& report) {
  j = Json{{"horizon", report.horizon},
           {"first_time", report.first_time},
           {"options", report.options},
           {"windows", report.windows},
           {"change_points", report.change_points()},
           {"acceptance_fractions", report.acceptance_fractions()}};
}

void to_json(Json& j, const BaselineWindow& window) {
  j = Json{{"t0", window.t0},
           {"w", window.width},
           {"t_star", window.t_star},
           {"t", finite_or_null(window.t)},
           {"p", window.p},
           {"accepted", window.accepted},
           {"degenerate", window.degenerate},
           {"missing", window.missing},
           {"skipped", window.skipped}};
}

void to_json(Json& j, const BaselineReport& report) {
  j = Json{{"horizon", report.horizon},
           {"first_time", report.first_time},
           {"options", report.options},
           {"windows", report.windows},
           {"change_points", report.change_points()}};
}

void to_json(Json& j, const Phase& phase) {
  j = Json{{"Q", rows_of(phase.Q)}, {"block_sizes", phase.block_sizes}, {"duration", phase.duration}};
}

void from_json(const Json& j, Phase& phase) {
  j.at("Q").get_to(phase.Q);
  j.at("block_sizes").get_to(phase.block_sizes);
  j.at("duration").get_to(phase.duration);
}

void to_json(Json& j, const PlantedSeriesSpec& spec) {
  j = Json{{"name", spec.name},
           {"family", std::string(to_string(spec.family))},
           {"seed", spec.seed},
           {"phases", spec.phases}};
}

void from_json(const Json& j, PlantedSeriesSpec& spec) {
  read_optional(j, "name", spec.name);
  if (const auto it = j.find("family"); it != j.end()) spec.family = parse_family(it->get<std::string>());
  read_optional(j, "seed", spec.seed);
  j.at("phases").get_to(spec.phases);
}

void write_window_csv(std::ostream& out, const DetectionReport& report, const std::string& detector) {
  out << kWindowCsvHeader << '\n' << std::setprecision(17);
  for (const auto& w : report.windows) {
    out << detector << ',' << w.t0 << ',' << w.width << ',' << w.t_star << ',' << w.g << ',' << w.p
        << ',' << (w.accepted ? "true" : "false") << ',' << w.block_count << ',' << w.seed << ','
        << w.bootstrap_samples << '\n';
  }
}

void write_window_csv(std::ostream& out, const BaselineReport& report) {
  out << kWindowCsvHeader << '\n' << std::setprecision(17);
  const auto detector = to_string(report.options.statistic);
  for (const auto& w : report.windows) {
    if (w.skipped) continue;
    out << detector << ',' << w.t0 << ',' << w.width << ',' << w.t_star << ",," << w.p << ','
        << (w.accepted ? "true" : "false") << ",,,\n";
  }
}

RunDecisions run_decisions_from_json(const Json& report) {
  try {
    RunDecisions run;
    report.at("horizon").get_to(run.horizon);
    for (const auto& w : report.at("windows")) {
      if (w.value("skipped", false)) continue;
      run.windows.push_back({w.at("t0").get<std::size_t>(), w.at("w").get<std::size_t>(),
                             w.at("t_star").get<std::size_t>(), w.at("p").get<double>(),
                             w.at("accepted").get<bool>()});
    }
    return run;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

RunDecisions run_decisions_from_csv(std::istream& in, std::size_t horizon) {
  std::string line;
  while (std::getline(in, line) && !line.empty() && line.front() == '#') {
  }
  if (line.empty()) throw DataError("empty window CSV");
  const auto header = split_csv_line(line);
  const auto column = [&](const std::string& name) {
    const auto it = std::ranges::find(header, name);
    if (it == header.end()) throw DataError("window CSV lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto t0 = column("t0"), w = column("w"), t_star = column("t_star"), p = column("p"),
             accepted = column("accepted");
  RunDecisions run;
  run.horizon = horizon;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("window CSV row " + std::to_string(row) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    try {
      run.windows.push_back({std::stoul(fields[t0]), std::stoul(fields[w]),
                             std::stoul(fields[t_star]), std::stod(fields[p]),
                             fields[accepted] == "true" || fields[accepted] == "1"});
    } catch (const std::exception&) {
      throw DataError("window CSV row " + std::to_string(row) + " is malformed");
    }
  }
  return run;
}

RunDecisions read_run_decisions(const std::string& path) {
  return run_decisions_from_json(read_json_file(path));
}

std::vector<std::size_t> read_truth(const std::string& path) {
  const auto j = read_json_file(path);
  try {
    return j.at("change_points").get<std::vector<std::size_t>>();
  } catch (const Json::exception& e) {
    throw DataError("malformed truth file '" + path + "': " + e.what());
  }
}

void write_truth(const std::string& path, const std::vector<std::size_t>& change_points) {
  write_json_file(path, Json{{"change_points", change_points}});
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DataError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& value) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << value.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace netshift
