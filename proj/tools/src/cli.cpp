#include "netshift_cli/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <netshift/errors.hpp>
#include <netshift/evaluation.hpp>
#include <netshift/synthetic.hpp>
#include <netshift/temporal_graph.hpp>

#include "netshift_cli/run_config.hpp"

namespace netshift::cli {
namespace {

/// Records the flags the user actually passed, keyed like the config file.
class FlagLayer {
 public:
  explicit FlagLayer(Json& flags) : flags_(flags) {}

  template <class T>
  CLI::Option* option(CLI::App* app, const std::string& name, const std::string& key,
                      const std::string& help) {
    return app->add_option_function<T>(name, [this, key](const T& v) { flags_[key] = v; }, help);
  }

  CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& key,
                    const std::string& help) {
    return app->add_flag_function(name, [this, key](std::int64_t) { flags_[key] = true; }, help);
  }

 private:
  Json& flags_;
};

std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

void emit_json(const Json& value, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << value.dump(2) << '\n';
  } else {
    auto file = open_for_writing(path);
    file << value.dump(2) << '\n';
  }
}

std::string stem_for(const std::string& name) {
  std::string stem;
  for (const char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      stem += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!stem.empty() && stem.back() != '-') {
      stem += '-';
    }
  }
  while (!stem.empty() && stem.back() == '-') stem.pop_back();
  return stem.empty() ? "series" : stem;
}

void require_input(const RunConfig& config) {
  if (config.input.empty()) throw std::invalid_argument("--input is required");
}

int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err) {
  require_input(config);
  const auto series = read_temporal_network(config.input);
  Snapshot graph;
  if (config.snapshot) {
    if (*config.snapshot >= series.size()) {
      throw std::invalid_argument("--snapshot " + std::to_string(*config.snapshot) +
                                  " is past the last snapshot " + std::to_string(series.size() - 1));
    }
    graph = series.snapshots()[*config.snapshot];
  } else {
    graph = sum_snapshots(series.snapshots());
  }
  const MultiGraph multigraph(graph);
  const auto family = parse_family(config.family);
  FitResult result;
  if (config.k) {
    result = fit(multigraph, *config.k, family, config.degree_corrected, config.fit_options());
  } else {
    const auto ks = config.resolved_k_range();
    result = fit_best_k(multigraph, ks, family, config.degree_corrected, config.fit_options());
  }
  std::ostream& summary = config.output.empty() && config.format == "json" ? err : out;
  summary << "K=" << result.block_count() << " log_likelihood=" << std::setprecision(10)
          << result.log_likelihood << " description_length=" << result.description_length << '\n';
  if (config.format == "csv") {
    std::ostringstream body;
    body << "# config " << Json(config).dump() << "\nnode,block\n";
    for (std::size_t u = 0; u < result.partition.node_count(); ++u) {
      body << series.labels()[u] << ',' << result.partition[u] << '\n';
    }
    if (config.output.empty()) {
      out << body.str();
    } else {
      open_for_writing(config.output) << body.str();
    }
    return kSuccess;
  }
  Json j = result;
  j["config"] = config;
  emit_json(j, config.output, out);
  return kSuccess;
}

int cmd_detect(const RunConfig& config, std::ostream& out, std::ostream&) {
  require_input(config);
  if (!config.window) throw std::invalid_argument("--window is required");
  const auto series = read_temporal_network(config.input);
  Json report;
  std::ostringstream csv;
  csv << "# config " << Json(config).dump() << '\n';
  if (config.baseline()) {
    const auto result = detect_baseline(series, config.baseline_options());
    report = result;
    write_window_csv(csv, result);
  } else {
    const auto options = config.detector_options();
    if (series.size() < options.width) {
      throw std::invalid_argument("window " + std::to_string(options.width) + " exceeds the " +
                                  std::to_string(series.size()) + " snapshots of the series");
    }
    const auto result = detect(series, options);
    report = result;
    write_window_csv(csv, result, config.detector);
  }
  report["detector"] = config.detector;
  report["config"] = config;
  if (config.format == "csv") {
    if (config.output.empty()) {
      out << csv.str();
    } else {
      open_for_writing(config.output) << csv.str();
    }
  } else {
    emit_json(report, config.output, out);
  }
  if (!config.csv.empty()) open_for_writing(config.csv) << csv.str();
  return kSuccess;
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream&) {
  PlantedSeriesSpec spec;
  if (!config.spec_file.empty()) {
    spec = read_json_file(config.spec_file).get<PlantedSeriesSpec>();
  } else if (!config.spec.empty()) {
    spec = builtin_spec(config.spec);
  } else {
    throw std::invalid_argument("--spec or --spec-file is required");
  }
  spec.validate();
  std::filesystem::create_directories(config.output_dir);
  const auto stem = stem_for(spec.name);
  Json manifest{{"spec", spec}, {"config", config}, {"runs", Json::array()}};
  for (std::size_t i = 0; i < config.runs; ++i) {
    auto run_spec = spec;
    run_spec.seed = derive_seed({config.seed, i});
    const auto series = generate_series(run_spec);
    const auto base = (std::filesystem::path(config.output_dir) / (stem + "-" + std::to_string(i))).string();
    write_temporal_network(base + ".edges", series.network);
    write_json_file(base + ".truth.json",
                    Json{{"change_points", series.change_points}, {"seed", run_spec.seed},
                         {"config", config}});
    manifest["runs"].push_back(Json{{"edges", base + ".edges"},
                                    {"truth", base + ".truth.json"},
                                    {"seed", run_spec.seed}});
  }
  write_json_file((std::filesystem::path(config.output_dir) / (stem + ".manifest.json")).string(),
                  manifest);
  out << "wrote " << config.runs << " series to " << config.output_dir << '\n';
  return kSuccess;
}

void write_plot_csv(const std::filesystem::path& path, const PlotTable& table, const RunConfig& config) {
  std::ostringstream body;
  body << "# config " << Json(config).dump() << '\n';
  write_csv(body, table);
  std::ofstream out(path);
  if (!(out << body.str())) throw DataError("cannot write '" + path.string() + "'");
}

int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream&) {
  if (config.reports.empty()) throw std::invalid_argument("no reports supplied");
  if (config.truth.empty()) throw std::invalid_argument("--truth is required");
  if (config.truth.size() != 1 && config.truth.size() != config.reports.size()) {
    throw std::invalid_argument("give one truth file, or one per report");
  }
  std::vector<RunDecisions> runs;
  std::vector<std::vector<std::size_t>> truths;
  for (std::size_t i = 0; i < config.reports.size(); ++i) {
    runs.push_back(read_run_decisions(config.reports[i]));
    truths.push_back(read_truth(config.truth[config.truth.size() == 1 ? 0 : i]));
  }
  const auto horizon = runs.front().horizon;

  std::vector<double> precision_sum(config.max_delay + 1, 0.0), recall_sum(config.max_delay + 1, 0.0);
  std::vector<double> precision_n(config.max_delay + 1, 0.0), recall_n(config.max_delay + 1, 0.0);
  Json per_run = Json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto found = runs[i].change_points();
    const auto rows = precision_recall_table(found, truths[i], config.max_delay);
    Json table = Json::array();
    for (const auto& r : rows) {
      if (r.precision.defined) {
        precision_sum[r.delay] += r.precision.value;
        precision_n[r.delay] += 1.0;
      }
      if (r.recall.defined) {
        recall_sum[r.delay] += r.recall.value;
        recall_n[r.delay] += 1.0;
      }
      table.push_back(Json{{"delay", r.delay},
                           {"precision", r.precision.value},
                           {"precision_defined", r.precision.defined},
                           {"recall", r.recall.value},
                           {"recall_defined", r.recall.defined}});
    }
    per_run.push_back(Json{{"report", config.reports[i]}, {"found", found}, {"known", truths[i]},
                           {"table", table}});
  }
  PlotTable pr;
  pr.x_label = "delay";
  pr.columns = {{"precision", {}}, {"recall", {}}};
  for (std::size_t s = 0; s <= config.max_delay; ++s) {
    pr.x.push_back(static_cast<double>(s));
    pr.columns[0].values.push_back(precision_n[s] > 0 ? precision_sum[s] / precision_n[s] : 0.0);
    pr.columns[1].values.push_back(recall_n[s] > 0 ? recall_sum[s] / recall_n[s] : 0.0);
  }
  const std::vector<PlotColumn> rate{{"detection_rate", detection_rate_curve(runs, horizon)}};
  const std::vector<PlotColumn> one_minus_p{{"mean_one_minus_p", mean_one_minus_p_curve(runs, horizon)}};
  const auto rate_table = curve_plot(rate);
  const auto p_table = curve_plot(one_minus_p);

  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path dir(config.output_dir);
  write_plot_csv(dir / "precision_recall.csv", pr, config);
  write_plot_csv(dir / "detection_rate.csv", rate_table, config);
  write_plot_csv(dir / "one_minus_p.csv", p_table, config);
  if (config.svg) {
    write_svg((dir / "precision_recall.svg").string(), pr, ChartKind::line, "precision and recall");
    write_svg((dir / "detection_rate.svg").string(), rate_table, ChartKind::bar, "detection rate");
    write_svg((dir / "one_minus_p.svg").string(), p_table, ChartKind::bar, "mean 1 - p");
  }
  Json summary{{"config", config},
               {"horizon", horizon},
               {"runs", per_run},
               {"precision", pr.columns[0].values},
               {"recall", pr.columns[1].values},
               {"detection_rate", rate.front().values},
               {"mean_one_minus_p", one_minus_p.front().values}};
  write_json_file((dir / "evaluation.json").string(), summary);
  out << "evaluated " << runs.size() << " reports into " << config.output_dir << '\n';
  return kSuccess;
}

int cmd_plot(const RunConfig& config, std::ostream& out, std::ostream&) {
  require_input(config);
  if (config.output.empty()) throw std::invalid_argument("--output is required");
  std::ifstream in(config.input);
  if (!in) throw DataError("cannot open '" + config.input + "'");
  const auto table = read_plot_csv(in);
  write_svg(config.output, table, config.kind == "line" ? ChartKind::line : ChartKind::bar,
            config.title);
  out << "wrote " << config.output << '\n';
  return kSuccess;
}

void add_engine_flags(FlagLayer& layer, CLI::App* app) {
  layer.option<std::size_t>(app, "--k", "k", "Fixed number of blocks");
  layer.option<std::size_t>(app, "--kmax", "k_max", "Largest K tried by description-length selection");
  layer.option<std::vector<std::size_t>>(app, "--k-range", "k_range", "Explicit list of K values to try");
  layer.flag(app, "--degree-corrected", "degree_corrected", "Use the degree-corrected model");
  layer.option<std::size_t>(app, "--restarts", "restarts", "Random restarts per fit");
  layer.option<double>(app, "--damping", "damping", "Message damping in (0, 1]");
  layer.option<double>(app, "--tolerance", "tolerance", "Convergence tolerance");
  layer.option<std::size_t>(app, "--max-sweeps", "max_sweeps", "Message-passing sweeps per EM step");
  layer.option<std::size_t>(app, "--max-iterations", "max_iterations", "EM steps per restart");
  layer.option<std::uint64_t>(app, "--seed", "seed", "Random seed (falls back to NETSHIFT_SEED)");
  layer.option<std::string>(app, "--format", "format", "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  layer.option<std::string>(app, "-o,--output", "output", "Output file (stdout when omitted)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Change-point detection in temporal networks with stochastic block models", "netshift"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "netshift 0.1.0");
  Json flags = Json::object();
  FlagLayer layer(flags);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);

  auto* fit_cmd = app.add_subcommand("fit", "Fit a block model to an aggregated edge list");
  fit_cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  layer.option<std::string>(fit_cmd, "-i,--input", "input", "Temporal edge list");
  layer.option<std::size_t>(fit_cmd, "--snapshot", "snapshot", "Fit one snapshot instead of the aggregate");
  layer.option<std::string>(fit_cmd, "--family", "family", "Link distribution")
      ->check(CLI::IsMember({"bernoulli", "poisson"}));
  add_engine_flags(layer, fit_cmd);

  auto* detect_cmd = app.add_subcommand("detect", "Run sliding-window change-point detection");
  detect_cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  layer.option<std::string>(detect_cmd, "-i,--input", "input", "Temporal edge list");
  layer.option<std::string>(detect_cmd, "--detector", "detector", "Detector")
      ->check(CLI::IsMember({"sbm", "dcsbm", "mean_degree", "mean_geodesic"}));
  layer.option<std::size_t>(detect_cmd, "-w,--window", "window", "Window width (required)");
  layer.option<double>(detect_cmd, "--alpha", "alpha", "Significance level");
  layer.option<std::size_t>(detect_cmd, "-B,--bootstrap", "bootstrap", "Bootstrap samples per window");
  layer.flag(detect_cmd, "--early-stop", "early_stop",
             "Stop bootstrapping once acceptance is impossible (p becomes a lower bound)");
  layer.option<std::string>(detect_cmd, "--surrogate", "surrogate",
                            "Distribution of bootstrap snapshots")
      ->check(CLI::IsMember({"automatic", "poisson", "bernoulli"}));
  layer.option<std::size_t>(detect_cmd, "--segment-restarts", "segment_restarts",
                            "Random restarts for segment fits besides the warm start");
  layer.flag(detect_cmd, "--independent-k", "independent_k", "Select K separately per segment");
  layer.option<std::size_t>(detect_cmd, "--jobs", "jobs", "Worker threads");
  layer.flag(detect_cmd, "--active-nodes", "active_nodes", "Drop nodes with no links in the window");
  layer.option<std::string>(detect_cmd, "--t-test", "t_test", "Baseline t-test form")
      ->check(CLI::IsMember({"prediction", "plain"}));
  layer.option<std::string>(detect_cmd, "--csv", "csv", "Also write the per-window CSV here");
  layer.option<std::string>(detect_cmd, "--family", "family", "Accepted for symmetry; detection uses Poisson")
      ->check(CLI::IsMember({"bernoulli", "poisson"}));
  add_engine_flags(layer, detect_cmd);

  auto* simulate_cmd = app.add_subcommand("simulate", "Generate series with planted change points");
  simulate_cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  layer.option<std::string>(simulate_cmd, "--spec", "spec", "Builtin spec (er-2c, 2c-cp, cp-2c)");
  layer.option<std::string>(simulate_cmd, "--spec-file", "spec_file", "JSON spec file");
  layer.option<std::size_t>(simulate_cmd, "--runs", "runs", "Number of series");
  layer.option<std::uint64_t>(simulate_cmd, "--seed", "seed", "Random seed (falls back to NETSHIFT_SEED)");
  layer.option<std::string>(simulate_cmd, "-d,--output-dir", "output_dir", "Directory for the series");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score detection reports against truth files");
  evaluate_cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  layer.option<std::vector<std::string>>(evaluate_cmd, "-r,--reports", "reports", "Detection report JSON files");
  layer.option<std::vector<std::string>>(evaluate_cmd, "-t,--truth", "truth",
                                         "Truth file, or one per report");
  layer.option<std::size_t>(evaluate_cmd, "--max-delay", "max_delay", "Largest delay s scored");
  layer.option<std::string>(evaluate_cmd, "-d,--output-dir", "output_dir", "Directory for metric files");
  layer.flag(evaluate_cmd, "--svg", "svg", "Also write SVG charts");

  auto* plot_cmd = app.add_subcommand("plot", "Render a curve CSV as an SVG chart");
  plot_cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  layer.option<std::string>(plot_cmd, "-i,--input", "input", "CSV written by evaluate");
  layer.option<std::string>(plot_cmd, "-o,--output", "output", "SVG path");
  layer.option<std::string>(plot_cmd, "--kind", "kind", "Chart kind")->check(CLI::IsMember({"bar", "line"}));
  layer.option<std::string>(plot_cmd, "--title", "title", "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    Json file = Json::object();
    if (!config_path.empty()) {
      file = read_json_file(config_path);
      if (!file.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    }
    const char* env = std::getenv("NETSHIFT_SEED");
    auto config = resolve_config(file, flags, env ? std::optional<std::string>(env) : std::nullopt);
    if (fit_cmd->parsed()) {
      config.command = "fit";
      return cmd_fit(config, out, err);
    }
    if (detect_cmd->parsed()) {
      config.command = "detect";
      return cmd_detect(config, out, err);
    }
    if (simulate_cmd->parsed()) {
      config.command = "simulate";
      return cmd_simulate(config, out, err);
    }
    if (evaluate_cmd->parsed()) {
      config.command = "evaluate";
      return cmd_evaluate(config, out, err);
    }
    config.command = "plot";
    return cmd_plot(config, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace netshift::cli
