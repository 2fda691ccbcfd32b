#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "netshift/baseline.hpp"
#include "netshift/changepoint.hpp"
#include "netshift/evaluation.hpp"
#include "netshift/fit.hpp"
#include "netshift/synthetic.hpp"

namespace netshift {

using Json = nlohmann::json;

void to_json(Json& j, const BlockMatrix& q);
void from_json(const Json& j, BlockMatrix& q);

/// {K, family, degree_corrected, n, Q, theta?, partition, log_likelihood,
///  description_length, converged, restarts, seed, ...}
void to_json(Json& j, const FitResult& result);

void to_json(Json& j, const FitOptions& options);
void from_json(const Json& j, FitOptions& options);
void to_json(Json& j, const EngineOptions& options);
void from_json(const Json& j, EngineOptions& options);
void to_json(Json& j, const DetectorOptions& options);
void from_json(const Json& j, DetectorOptions& options);
void to_json(Json& j, const BaselineOptions& options);
void from_json(const Json& j, BaselineOptions& options);

void to_json(Json& j, const ChangePointResult& window);
void to_json(Json& j, const DetectionReport& report);
void to_json(Json& j, const BaselineWindow& window);
void to_json(Json& j, const BaselineReport& report);

void to_json(Json& j, const Phase& phase);
void from_json(const Json& j, Phase& phase);
void to_json(Json& j, const PlantedSeriesSpec& spec);
void from_json(const Json& j, PlantedSeriesSpec& spec);

/// Columns shared by every detector; fields a detector does not produce are left empty.
inline constexpr const char* kWindowCsvHeader = "detector,t0,w,t_star,g,p,accepted,K,seed,bootstrap";

void write_window_csv(std::ostream& out, const DetectionReport& report, const std::string& detector);
void write_window_csv(std::ostream& out, const BaselineReport& report);

/// Reads the window decisions of a JSON report of any detector.
/// Throws DataError on malformed content.
RunDecisions read_run_decisions(const std::string& path);
RunDecisions run_decisions_from_json(const Json& report);
/// `horizon` is needed because the CSV rows do not carry it.
RunDecisions run_decisions_from_csv(std::istream& in, std::size_t horizon);

/// Truth files hold {"change_points": [snapshot indices]}.
std::vector<std::size_t> read_truth(const std::string& path);
void write_truth(const std::string& path, const std::vector<std::size_t>& change_points);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& value);

}  // namespace netshift
