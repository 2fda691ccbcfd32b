#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <netshift/errors.hpp>
#include <netshift/serialization.hpp>

namespace netshift {
namespace {

DetectionReport sample_report() {
  DetectionReport report;
  report.horizon = 12;
  report.options.width = 4;
  report.options.bootstrap = 20;
  report.windows = {ChangePointResult{.t0 = 0, .width = 4, .t_star = 2, .g = 3.5, .bootstrap_samples = 20, .p = 0.0,
                                      .accepted = true, .block_count = 2, .seed = 11},
                    ChangePointResult{.t0 = 1, .width = 4, .t_star = 3, .g = 0.5, .bootstrap_samples = 20, .p = 0.4,
                                      .accepted = false, .block_count = 1, .seed = 12}};
  return report;
}

TEST(Serialization, OptionsRoundTrip) {
  DetectorOptions options;
  options.width = 7;
  options.alpha = 0.01;
  options.bootstrap = 33;
  options.early_stop = true;
  options.surrogate = SurrogateFamily::poisson;
  options.engine.k_range = {1, 2, 5};
  options.engine.fixed_k = 3;
  options.engine.degree_corrected = true;
  options.engine.fit.damping = 0.5;
  options.engine.fit.seed = 99;
  const Json j = options;
  const auto back = j.get<DetectorOptions>();
  EXPECT_EQ(Json(back), j);
  EXPECT_EQ(back.width, 7u);
  EXPECT_EQ(back.surrogate, SurrogateFamily::poisson);
  EXPECT_EQ(back.engine.fixed_k, 3u);
  EXPECT_EQ(back.engine.k_range, (std::vector<std::size_t>{1, 2, 5}));
}

TEST(Serialization, SpecRoundTrip) {
  const auto spec = builtin_spec("CP->2C");
  const Json j = spec;
  const auto back = j.get<PlantedSeriesSpec>();
  EXPECT_EQ(back.name, spec.name);
  ASSERT_EQ(back.phases.size(), 2u);
  EXPECT_EQ(back.phases[0].Q, spec.phases[0].Q);
  EXPECT_EQ(back.phases[1].block_sizes, spec.phases[1].block_sizes);
}

TEST(Serialization, ReportDecisionsRoundTripThroughJson) {
  const auto report = sample_report();
  const auto decisions = run_decisions_from_json(Json(report));
  EXPECT_EQ(decisions.horizon, 12u);
  ASSERT_EQ(decisions.windows.size(), 2u);
  EXPECT_EQ(decisions.change_points(), (std::vector<std::size_t>{2}));
  EXPECT_DOUBLE_EQ(decisions.windows[1].p, 0.4);
}

TEST(Serialization, WindowCsvRoundTrip) {
  std::stringstream csv;
  write_window_csv(csv, sample_report(), "sbm");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, kWindowCsvHeader);
  csv.seekg(0);
  const auto decisions = run_decisions_from_csv(csv, 12);
  ASSERT_EQ(decisions.windows.size(), 2u);
  EXPECT_TRUE(decisions.windows[0].accepted);
  EXPECT_EQ(decisions.windows[1].t_star, 3u);
}

TEST(Serialization, BaselineCsvLeavesBootstrapFieldsEmpty) {
  BaselineReport report;
  report.horizon = 6;
  report.windows = {BaselineWindow{.t0 = 0, .width = 3, .t_star = 3, .t = 1.0, .p = 0.3}};
  std::ostringstream csv;
  write_window_csv(csv, report);
  const auto text = csv.str();
  const auto row = text.substr(text.find('\n') + 1);
  EXPECT_EQ(row.rfind("mean_degree,0,3,3,", 0), 0u);
  EXPECT_NE(row.find(",,"), std::string::npos);
}

TEST(Serialization, TruthFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "netshift_serialization";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "t.truth.json").string();
  write_truth(path, {16, 40});
  EXPECT_EQ(read_truth(path), (std::vector<std::size_t>{16, 40}));
  EXPECT_EQ(read_json_file(path), (Json{{"change_points", {16, 40}}}));
  write_json_file(path, Json{{"points", 1}});
  EXPECT_THROW(read_truth(path), DataError);
  EXPECT_THROW(read_json_file((dir / "missing.json").string()), DataError);
  std::filesystem::remove_all(dir);
}

TEST(Serialization, MalformedReportsAreDataErrors) {
  EXPECT_THROW(run_decisions_from_json(Json{{"windows", 3}}), DataError);
  std::istringstream bad("detector,t0\nsbm,x\n");
  EXPECT_THROW(run_decisions_from_csv(bad, 5), DataError);
}

}  // namespace
}  // namespace netshift
