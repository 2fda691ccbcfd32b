#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <netshift/serialization.hpp>
#include <netshift_cli/cli.hpp>
#include <netshift_cli/run_config.hpp>

namespace netshift::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "netshift");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("netshift_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("NETSHIFT_SEED");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("NETSHIFT_SEED");
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // A short two-phase series written through the simulate command.
  std::string short_series(std::uint64_t seed) {
    const Json spec{{"name", "short"},
                    {"family", "bernoulli"},
                    {"phases",
                     {{{"Q", {{0.1, 0.1}, {0.1, 0.1}}}, {"block_sizes", {10, 10}}, {"duration", 4}},
                      {{"Q", {{0.4, 0.02}, {0.02, 0.4}}}, {"block_sizes", {10, 10}}, {"duration", 4}}}}};
    write_json_file(path("short.json"), spec);
    const auto r = invoke({"simulate", "--spec-file", path("short.json"), "--runs", "1", "--seed",
                           std::to_string(seed), "-d", path("sim")});
    EXPECT_EQ(r.code, kSuccess) << r.err;
    return path("sim/short-0.edges");
  }

  fs::path dir_;
};

const std::vector<std::string> kFastEngine{"--restarts", "2", "--kmax", "2", "--tolerance", "1e-4",
                                           "--max-sweeps", "3", "--max-iterations", "10",
                                           "--segment-restarts", "0"};

std::vector<std::string> with_fast(std::vector<std::string> args) {
  args.insert(args.end(), kFastEngine.begin(), kFastEngine.end());
  return args;
}

TEST_F(CliTest, SimulateWritesSeriesAndTruth) {
  const auto r = invoke({"simulate", "--spec", "er-2c", "--runs", "3", "--seed", "1", "-d", path("out")});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  for (int i = 0; i < 3; ++i) {
    const auto base = path("out/er-2c-" + std::to_string(i));
    EXPECT_TRUE(fs::exists(base + ".edges"));
    EXPECT_EQ(read_truth(base + ".truth.json"), (std::vector<std::size_t>{16}));
    EXPECT_EQ(read_temporal_network(base + ".edges").size(), 32u);
  }
  const auto manifest = read_json_file(path("out/er-2c.manifest.json"));
  EXPECT_EQ(manifest.at("runs").size(), 3u);
  EXPECT_EQ(manifest.at("config").at("seed"), 1);
}

TEST_F(CliTest, SimulateCorePeripheryToCommunities) {
  ASSERT_EQ(invoke({"simulate", "--spec", "cp-2c", "-d", path("out")}).code, kSuccess);
  const auto manifest = read_json_file(path("out/cp-2c.manifest.json"));
  const auto spec = manifest.at("spec").get<PlantedSeriesSpec>();
  EXPECT_EQ(spec.phases[0].Q, (BlockMatrix{{0.3, 0.09}, {0.09, 0.01}}));
}

TEST_F(CliTest, SimulateUsageErrors) {
  EXPECT_EQ(invoke({"simulate", "--spec", "er-2c", "--runs", "0", "-d", path("out")}).code, kUsage);
  EXPECT_EQ(invoke({"simulate", "--spec", "ring", "-d", path("out")}).code, kUsage);
  EXPECT_EQ(invoke({"simulate", "-d", path("out")}).code, kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsage);
  EXPECT_EQ(invoke({}).code, kUsage);
}

TEST_F(CliTest, FitSingleBlockIsDensityModel) {
  std::ofstream(path("g.edges")) << "0 a b\n0 b c\n0 c d\n0 a c\n";
  const auto r = invoke({"fit", "-i", path("g.edges"), "--k", "1", "--family", "bernoulli", "-o", path("fit.json")});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto j = read_json_file(path("fit.json"));
  EXPECT_EQ(j.at("K"), 1);
  EXPECT_NEAR(j.at("Q")[0][0].get<double>(), 4.0 / 6.0, 1e-12);
  EXPECT_EQ(j.at("config").at("k"), 1);
}

TEST_F(CliTest, FitSelectsTwoBlocksOnPlantedAggregate) {
  const Json spec{{"name", "two communities"},
                  {"family", "bernoulli"},
                  {"phases", {{{"Q", {{0.15, 0.05}, {0.05, 0.15}}}, {"block_sizes", {22, 28}}, {"duration", 16}}}}};
  write_json_file(path("2c.json"), spec);
  int two = 0;
  for (int seed = 0; seed < 5; ++seed) {
    const auto sim = invoke({"simulate", "--spec-file", path("2c.json"), "--seed", std::to_string(seed), "-d",
                             path("sim")});
    ASSERT_EQ(sim.code, kSuccess) << sim.err;
    const auto r = invoke({"fit", "-i", path("sim/two-communities-0.edges"), "--kmax", "6", "--restarts", "3",
                           "--seed", std::to_string(seed), "-o", path("fit.json")});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    two += read_json_file(path("fit.json")).at("K") == 2;
  }
  EXPECT_GE(two, 3);
}

TEST_F(CliTest, FitMissingInputIsDataError) {
  EXPECT_EQ(invoke({"fit", "-i", path("none.edges")}).code, kData);
  std::ofstream(path("bad.edges")) << "0 a\n";
  EXPECT_EQ(invoke({"fit", "-i", path("bad.edges")}).code, kData);
  EXPECT_EQ(invoke({"fit"}).code, kUsage);
}

TEST_F(CliTest, BaselineDetectorWritesCsvWithoutBootstrapFields) {
  const auto series = short_series(3);
  const auto r = invoke({"detect", "-i", series, "--detector", "mean_degree", "--window", "3", "--format", "csv",
                         "-o", path("baseline.csv")});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  std::istringstream csv(slurp(path("baseline.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("# config ", 0), 0u);
  EXPECT_EQ(Json::parse(line.substr(9)).at("detector"), "mean_degree");
  std::getline(csv, line);
  EXPECT_EQ(line, kWindowCsvHeader);
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.size() - 3), ",,,");
  }
  EXPECT_EQ(rows, 5u);
}

TEST_F(CliTest, DetectUsageErrors) {
  const auto series = short_series(4);
  EXPECT_EQ(invoke({"detect", "-i", series, "--window", "9", "--bootstrap", "2"}).code, kUsage);
  EXPECT_EQ(invoke({"detect", "-i", series}).code, kUsage);
  EXPECT_EQ(invoke({"detect", "-i", series, "--window", "4", "--alpha", "1.5"}).code, kUsage);
  EXPECT_EQ(invoke({"detect", "-i", series, "--window", "4", "--detector", "magic"}).code, kUsage);
}

TEST_F(CliTest, DetectIsReproducibleAndIndependentOfJobs) {
  const auto series = short_series(5);
  const auto base = with_fast({"detect", "-i", series, "--window", "4", "--bootstrap", "4", "--seed", "7"});
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"-o", path("a.json")});
  b.insert(b.end(), {"-o", path("b.json")});
  c.insert(c.end(), {"-o", path("c.json"), "--jobs", "2"});
  ASSERT_EQ(invoke(a).code, kSuccess);
  ASSERT_EQ(invoke(b).code, kSuccess);
  ASSERT_EQ(invoke(c).code, kSuccess);
  auto ja = read_json_file(path("a.json"));
  auto jb = read_json_file(path("b.json"));
  EXPECT_EQ(ja.at("config").at("output"), path("a.json"));
  ja["config"].erase("output");
  jb["config"].erase("output");
  EXPECT_EQ(ja, jb);
  auto jc = read_json_file(path("c.json"));
  EXPECT_EQ(ja.at("windows"), jc.at("windows"));
  EXPECT_EQ(ja.at("config").at("seed"), 7);
  EXPECT_EQ(ja.at("windows").size(), 5u);
}

TEST_F(CliTest, SeedFallsBackToEnvironment) {
  const auto series = short_series(6);
  setenv("NETSHIFT_SEED", "42", 1);
  const auto args = with_fast({"detect", "-i", series, "--window", "8", "--bootstrap", "2", "-o", path("env.json")});
  ASSERT_EQ(invoke(args).code, kSuccess);
  EXPECT_EQ(read_json_file(path("env.json")).at("config").at("seed"), 42);
  auto flagged = args;
  flagged.insert(flagged.end(), {"--seed", "3"});
  ASSERT_EQ(invoke(flagged).code, kSuccess);
  EXPECT_EQ(read_json_file(path("env.json")).at("config").at("seed"), 3);
  setenv("NETSHIFT_SEED", "abc", 1);
  EXPECT_EQ(invoke(args).code, kUsage);
}

TEST_F(CliTest, FlagsOverrideConfigFileOverDefaults) {
  const auto series = short_series(7);
  write_json_file(path("cfg.json"), Json{{"alpha", 0.01}, {"bootstrap", 3}, {"window", 8}, {"seed", 5}});
  const auto r = invoke(with_fast({"detect", "--config", path("cfg.json"), "-i", series, "--bootstrap", "2", "-o",
                                   path("r.json")}));
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto config = read_json_file(path("r.json")).at("config");
  EXPECT_EQ(config.at("alpha"), 0.01);
  EXPECT_EQ(config.at("bootstrap"), 2);
  EXPECT_EQ(config.at("window"), 8);
  EXPECT_EQ(config.at("seed"), 5);
  EXPECT_EQ(config.at("damping"), 0.7);
  setenv("NETSHIFT_SEED", "99", 1);
  ASSERT_EQ(invoke(with_fast({"detect", "--config", path("cfg.json"), "-i", series, "-o", path("r.json")})).code,
            kSuccess);
  EXPECT_EQ(read_json_file(path("r.json")).at("config").at("seed"), 5);
  write_json_file(path("bad.json"), Json{{"alpha", "high"}});
  EXPECT_EQ(invoke({"detect", "--config", path("bad.json"), "-i", series, "--window", "4"}).code, kUsage);
}

TEST(RunConfig, ResolutionLayers) {
  const auto defaults = resolve_config(Json::object(), Json::object(), std::nullopt);
  EXPECT_EQ(defaults.alpha, 0.05);
  EXPECT_EQ(defaults.bootstrap, 200u);
  EXPECT_EQ(defaults.restarts, 10u);
  EXPECT_EQ(defaults.damping, 0.7);
  EXPECT_EQ(defaults.tolerance, 1e-6);
  EXPECT_EQ(defaults.resolved_k_range(), (std::vector<std::size_t>{1, 2, 3, 4, 5, 6}));
  EXPECT_FALSE(defaults.window.has_value());
  const auto layered = resolve_config(Json{{"seed", 4}, {"k_max", 3}}, Json{{"k_max", 2}}, std::string("9"));
  EXPECT_EQ(layered.seed, 4u);
  EXPECT_EQ(layered.resolved_k_range(), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(resolve_config(Json::object(), Json::object(), std::string("9")).seed, 9u);
  EXPECT_THROW(resolve_config(Json{{"damping", 0.0}}, Json::object(), std::nullopt), std::invalid_argument);
  EXPECT_THROW(resolve_config(Json{{"family", "normal"}}, Json::object(), std::nullopt), std::invalid_argument);
}

TEST_F(CliTest, EvaluateScoresReportsAgainstTruth) {
  DetectionReport report;
  report.horizon = 10;
  report.windows = {ChangePointResult{.t0 = 0, .width = 4, .t_star = 4, .p = 0.0, .accepted = true},
                    ChangePointResult{.t0 = 1, .width = 4, .t_star = 3, .p = 0.5, .accepted = false}};
  write_json_file(path("report.json"), Json(report));
  write_truth(path("truth.json"), {4});
  const auto r = invoke({"evaluate", "-r", path("report.json"), "-t", path("truth.json"), "--max-delay", "3", "--svg",
                         "-d", path("eval")});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  std::ifstream in(path("eval/precision_recall.csv"));
  const auto table = read_plot_csv(in);
  ASSERT_EQ(table.x.size(), 4u);
  for (const auto& column : table.columns) {
    for (double v : column.values) EXPECT_EQ(v, 1.0);
  }
  const auto summary = read_json_file(path("eval/evaluation.json"));
  EXPECT_EQ(summary.at("detection_rate")[4], 1.0);
  EXPECT_NEAR(summary.at("mean_one_minus_p")[3].get<double>(), 0.5, 1e-15);
  EXPECT_TRUE(fs::exists(path("eval/detection_rate.svg")));
  EXPECT_EQ(slurp(path("eval/detection_rate.csv")).rfind("# config ", 0), 0u);
}

TEST_F(CliTest, EvaluateErrors) {
  write_truth(path("truth.json"), {4});
  EXPECT_EQ(invoke({"evaluate", "-t", path("truth.json"), "-d", path("eval")}).code, kUsage);
  DetectionReport a, b;
  a.horizon = 10;
  b.horizon = 12;
  write_json_file(path("a.json"), Json(a));
  write_json_file(path("b.json"), Json(b));
  EXPECT_EQ(invoke({"evaluate", "-r", path("a.json"), path("b.json"), "-t", path("truth.json"), "-d", path("eval")})
                .code,
            kData);
}

TEST_F(CliTest, PlotRendersCsv) {
  DetectionReport report;
  report.horizon = 6;
  write_json_file(path("report.json"), Json(report));
  write_truth(path("truth.json"), {3});
  ASSERT_EQ(invoke({"evaluate", "-r", path("report.json"), "-t", path("truth.json"), "-d", path("eval")}).code,
            kSuccess);
  const auto r = invoke({"plot", "-i", path("eval/detection_rate.csv"), "-o", path("rate.svg"), "--title", "rate"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  EXPECT_NE(slurp(path("rate.svg")).find("<svg"), std::string::npos);
  EXPECT_EQ(invoke({"plot", "-i", path("missing.csv"), "-o", path("x.svg")}).code, kData);
}

}  // namespace
}  // namespace netshift::cli
