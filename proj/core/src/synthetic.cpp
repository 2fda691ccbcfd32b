#include "netshift/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>

#include "netshift/random.hpp"
#include "netshift/sampling.hpp"

namespace netshift {
namespace {

PlantedSeriesSpec two_phase(std::string name, BlockMatrix first, BlockMatrix second,
                            std::vector<std::size_t> sizes) {
  PlantedSeriesSpec spec;
  spec.name = std::move(name);
  spec.family = Family::bernoulli;
  spec.phases.push_back(Phase{std::move(first), sizes, 16});
  spec.phases.push_back(Phase{std::move(second), sizes, 16});
  return spec;
}

std::string normalize(std::string_view name) {
  std::string out;
  for (std::size_t i = 0; i < name.size(); ++i) {
    const auto c = static_cast<unsigned char>(name[i]);
    if (name.substr(i, 3) == "\xE2\x86\x92") {  // UTF-8 right arrow
      out += '-';
      i += 2;
    } else if (c == '>' || c == '_' || c == ' ') {
      if (out.empty() || out.back() != '-') out += '-';
    } else if (c == '-') {
      if (out.empty() || out.back() != '-') out += '-';
    } else {
      out += static_cast<char>(std::tolower(c));
    }
  }
  return out;
}

}  // namespace

std::size_t PlantedSeriesSpec::node_count() const {
  if (phases.empty()) return 0;
  const auto& sizes = phases.front().block_sizes;
  return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
}

std::size_t PlantedSeriesSpec::length() const {
  std::size_t total = 0;
  for (const auto& p : phases) total += p.duration;
  return total;
}

void PlantedSeriesSpec::validate() const {
  if (phases.empty()) throw std::invalid_argument("spec needs at least one phase");
  const auto n = node_count();
  if (n == 0) throw std::invalid_argument("spec needs at least one node");
  for (const auto& p : phases) {
    if (p.duration < 1) throw std::invalid_argument("phase durations must be at least 1");
    if (std::accumulate(p.block_sizes.begin(), p.block_sizes.end(), std::size_t{0}) != n) {
      throw std::invalid_argument("all phases must share the same node count");
    }
    if (p.Q.size() != p.block_sizes.size()) {
      throw std::invalid_argument("phase Q must be K x K for K block sizes");
    }
    if (!p.Q.symmetric(1e-12)) throw std::invalid_argument("phase Q must be symmetric");
    for (double q : p.Q.values()) {
      if (!(q >= 0.0)) throw std::invalid_argument("phase Q entries must be non-negative");
      if (family == Family::bernoulli && q > 1.0) {
        throw std::invalid_argument("Bernoulli phase Q entries must lie in [0, 1]");
      }
    }
  }
}

PlantedSeries generate_series(const PlantedSeriesSpec& spec) {
  spec.validate();
  PlantedSeries out;
  std::vector<Snapshot> snapshots;
  snapshots.reserve(spec.length());
  for (std::size_t i = 0; i < spec.phases.size(); ++i) {
    const auto& phase = spec.phases[i];
    if (i > 0) out.change_points.push_back(snapshots.size());
    const auto k = phase.block_sizes.size();
    BlockModel model;
    model.family = spec.family;
    model.Q = phase.Q;
    model.n.assign(k, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
      model.n[r] = static_cast<double>(phase.block_sizes[r]) / static_cast<double>(spec.node_count());
    }
    const auto partition = Partition::contiguous(phase.block_sizes);
    for (std::size_t d = 0; d < phase.duration; ++d) {
      auto rng = make_rng({spec.seed, snapshots.size()});
      snapshots.push_back(sample_graph(model, partition, rng));
    }
  }
  out.network = TemporalNetwork(std::move(snapshots));
  return out;
}

const std::map<std::string, PlantedSeriesSpec>& builtin_specs() {
  static const std::map<std::string, PlantedSeriesSpec> specs = [] {
    const BlockMatrix er{{0.1, 0.1}, {0.1, 0.1}};
    const BlockMatrix two_communities{{0.15, 0.05}, {0.05, 0.15}};
    const BlockMatrix strong_communities{{0.2, 0.01}, {0.01, 0.2}};
    const BlockMatrix core_periphery{{0.3, 0.09}, {0.09, 0.01}};
    std::map<std::string, PlantedSeriesSpec> m;
    m.emplace("ER->2C", two_phase("ER->2C", er, two_communities, {22, 28}));
    m.emplace("2C->CP", two_phase("2C->CP", strong_communities, core_periphery, {20, 30}));
    m.emplace("CP->2C", two_phase("CP->2C", core_periphery, strong_communities, {20, 30}));
    return m;
  }();
  return specs;
}

PlantedSeriesSpec builtin_spec(std::string_view name) {
  const auto key = normalize(name);
  for (const auto& [canonical, spec] : builtin_specs()) {
    if (normalize(canonical) == key) return spec;
  }
  throw std::invalid_argument("unknown builtin spec '" + std::string(name) +
                              "' (known: er-2c, 2c-cp, cp-2c)");
}

}  // namespace netshift
