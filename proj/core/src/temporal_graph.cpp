#include "netshift/temporal_graph.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "netshift/errors.hpp"

namespace netshift {

Snapshot::Snapshot(std::size_t node_count, std::vector<Edge> edges, bool directed)
    : node_count_(node_count), directed_(directed) {
  for (auto& e : edges) {
    if (e.u >= node_count || e.v >= node_count) {
      throw DataError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                      ") references a node outside 0.." + std::to_string(node_count));
    }
    if (e.u == e.v) throw DataError("self-loop on node " + std::to_string(e.u));
    if (!directed && e.u > e.v) std::swap(e.u, e.v);
  }
  std::erase_if(edges, [](const Edge& e) { return e.count == 0; });
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  edges_.reserve(edges.size());
  for (const auto& e : edges) {
    if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) {
      edges_.back().count += e.count;
    } else {
      edges_.push_back(e);
    }
    total_ += e.count;
  }
}

Multiplicity Snapshot::multiplicity(NodeId u, NodeId v) const {
  if (!directed_ && u > v) std::swap(u, v);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{u, v, 0},
                             [](const Edge& a, const Edge& b) {
                               return a.u != b.u ? a.u < b.u : a.v < b.v;
                             });
  if (it != edges_.end() && it->u == u && it->v == v) return it->count;
  return 0;
}

std::vector<std::uint64_t> Snapshot::degrees() const {
  std::vector<std::uint64_t> deg(node_count_, 0);
  for (const auto& e : edges_) {
    deg[e.u] += e.count;
    deg[e.v] += e.count;
  }
  return deg;
}

TemporalNetwork::TemporalNetwork(std::vector<Snapshot> snapshots, std::vector<std::string> labels,
                                 std::int64_t first_time)
    : snapshots_(std::move(snapshots)), labels_(std::move(labels)), first_time_(first_time) {
  if (!snapshots_.empty()) {
    node_count_ = snapshots_.front().node_count();
    directed_ = snapshots_.front().directed();
  }
  for (const auto& s : snapshots_) {
    if (s.node_count() != node_count_ || s.directed() != directed_) {
      throw DataError("snapshots disagree on node count or directedness");
    }
  }
  if (!labels_.empty() && labels_.size() != node_count_) {
    throw DataError("label count " + std::to_string(labels_.size()) + " does not match node count " +
                    std::to_string(node_count_));
  }
}

std::span<const Snapshot> TemporalNetwork::window(std::size_t t0, std::size_t w) const {
  if (t0 > snapshots_.size() || w > snapshots_.size() - t0) {
    throw std::out_of_range("window [" + std::to_string(t0) + ", " + std::to_string(t0 + w) +
                            ") exceeds series of length " + std::to_string(snapshots_.size()));
  }
  return std::span<const Snapshot>(snapshots_).subspan(t0, w);
}

namespace {

struct Record {
  std::int64_t t;
  std::string u;
  std::string v;
  Multiplicity count;
};

template <typename T>
bool parse_integer(std::string_view token, T& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> node_order(const std::vector<Record>& records) {
  std::vector<std::string> ids;
  ids.reserve(records.size() * 2);
  for (const auto& r : records) {
    ids.push_back(r.u);
    ids.push_back(r.v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const bool numeric = std::all_of(ids.begin(), ids.end(), [](const std::string& s) {
    std::int64_t x;
    return parse_integer(std::string_view(s), x);
  });
  if (numeric) {
    std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
      std::int64_t x = 0, y = 0;
      parse_integer(std::string_view(a), x);
      parse_integer(std::string_view(b), y);
      return x < y;
    });
  }
  return ids;
}

}  // namespace

TemporalNetwork load_edge_list(std::istream& in, const EdgeListFormat& format,
                               const EdgeListSidecar* sidecar) {
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = format.header;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::string normalized(body);
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::istringstream fields(normalized);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (tokens.size() != 3 && tokens.size() != 4) {
      throw DataError(where + "expected `t u v [count]`, got " + std::to_string(tokens.size()) +
                      " fields");
    }
    Record r{};
    if (!parse_integer(std::string_view(tokens[0]), r.t) || r.t < 0) {
      throw DataError(where + "time must be a non-negative integer, got '" + tokens[0] + "'");
    }
    r.u = tokens[1];
    r.v = tokens[2];
    r.count = 1;
    if (tokens.size() == 4) {
      std::int64_t c = 0;
      if (!parse_integer(std::string_view(tokens[3]), c)) {
        throw DataError(where + "count must be an integer, got '" + tokens[3] + "'");
      }
      if (c < 0) throw DataError(where + "negative count " + tokens[3]);
      r.count = static_cast<Multiplicity>(c);
    }
    if (r.u == r.v) {
      if (format.allow_self_loops) continue;
      throw DataError(where + "self-loop on node '" + r.u + "'");
    }
    records.push_back(std::move(r));
  }

  const bool has_span = sidecar && sidecar->snapshot_count && *sidecar->snapshot_count > 0;
  if (records.empty() && !has_span) throw DataError("no records");

  const bool directed = sidecar && sidecar->directed ? *sidecar->directed : format.directed;
  std::vector<std::string> labels =
      sidecar && !sidecar->labels.empty() ? sidecar->labels : node_order(records);
  std::unordered_map<std::string, NodeId> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!index.emplace(labels[i], static_cast<NodeId>(i)).second) {
      throw DataError("duplicate node label '" + labels[i] + "'");
    }
  }

  std::int64_t t_min = 0, t_max = -1;
  if (!records.empty()) {
    auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                        [](const Record& a, const Record& b) { return a.t < b.t; });
    t_min = lo->t;
    t_max = hi->t;
  }
  if (sidecar && sidecar->first_time) {
    if (!records.empty() && *sidecar->first_time > t_min) {
      throw DataError("record time " + std::to_string(t_min) + " precedes sidecar first_time");
    }
    if (records.empty()) t_max = *sidecar->first_time - 1;
    t_min = *sidecar->first_time;
  }
  std::size_t count = static_cast<std::size_t>(t_max - t_min + 1);
  if (sidecar && sidecar->snapshot_count) {
    if (*sidecar->snapshot_count < count) {
      throw DataError("records extend past the sidecar snapshot_count");
    }
    count = *sidecar->snapshot_count;
  }

  std::vector<std::vector<Edge>> per_time(count);
  for (const auto& r : records) {
    auto iu = index.find(r.u);
    auto iv = index.find(r.v);
    if (iu == index.end() || iv == index.end()) {
      throw DataError("node '" + (iu == index.end() ? r.u : r.v) + "' missing from sidecar labels");
    }
    per_time[static_cast<std::size_t>(r.t - t_min)].push_back({iu->second, iv->second, r.count});
  }
  std::vector<Snapshot> snapshots;
  snapshots.reserve(count);
  for (auto& edges : per_time) snapshots.emplace_back(labels.size(), std::move(edges), directed);
  return TemporalNetwork(std::move(snapshots), std::move(labels), t_min);
}

void save_edge_list(std::ostream& out, const TemporalNetwork& net) {
  const auto& labels = net.labels();
  auto name = [&](NodeId id) { return labels.empty() ? std::to_string(id) : labels[id]; };
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (const auto& e : net[i].edges()) {
      out << net.time_of(i) << ',' << name(e.u) << ',' << name(e.v) << ',' << e.count << '\n';
    }
  }
}

EdgeListSidecar load_sidecar(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("sidecar is not valid JSON: ") + e.what());
  }
  EdgeListSidecar meta;
  try {
    if (j.contains("directed")) meta.directed = j.at("directed").get<bool>();
    if (j.contains("labels")) meta.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("first_time")) meta.first_time = j.at("first_time").get<std::int64_t>();
    if (j.contains("snapshot_count")) meta.snapshot_count = j.at("snapshot_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad sidecar field: ") + e.what());
  }
  return meta;
}

void save_sidecar(std::ostream& out, const TemporalNetwork& net) {
  nlohmann::json j;
  j["directed"] = net.directed();
  if (net.labels().empty()) {
    std::vector<std::string> ids(net.node_count());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = std::to_string(i);
    j["labels"] = ids;
  } else {
    j["labels"] = net.labels();
  }
  j["first_time"] = net.first_time();
  j["snapshot_count"] = net.size();
  out << j.dump(2) << '\n';
}

std::string sidecar_path_for(const std::string& edge_list_path) {
  std::filesystem::path p(edge_list_path);
  p.replace_extension();
  return p.string() + ".meta.json";
}

TemporalNetwork read_temporal_network(const std::string& path, EdgeListFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  const auto meta_path = sidecar_path_for(path);
  if (std::filesystem::exists(meta_path)) {
    std::ifstream meta_in(meta_path);
    const auto meta = load_sidecar(meta_in);
    return load_edge_list(in, format, &meta);
  }
  return load_edge_list(in, format);
}

void write_temporal_network(const std::string& path, const TemporalNetwork& net) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  save_edge_list(out, net);
  std::ofstream meta(sidecar_path_for(path));
  if (!meta) throw DataError("cannot write sidecar for '" + path + "'");
  save_sidecar(meta, net);
}

Snapshot sum_snapshots(std::span<const Snapshot> snapshots) {
  if (snapshots.empty()) throw std::invalid_argument("cannot sum an empty run of snapshots");
  const auto n = snapshots.front().node_count();
  const bool directed = snapshots.front().directed();
  std::size_t total = 0;
  for (const auto& s : snapshots) {
    if (s.node_count() != n || s.directed() != directed) {
      throw DataError("snapshots disagree on node count or directedness");
    }
    total += s.pair_count();
  }
  std::vector<Edge> edges;
  edges.reserve(total);
  for (const auto& s : snapshots) edges.insert(edges.end(), s.edges().begin(), s.edges().end());
  return Snapshot(n, std::move(edges), directed);
}

AggregatedWindow aggregate_window(const TemporalNetwork& net, std::size_t t0, std::size_t w) {
  if (w < 2) throw std::invalid_argument("window width must be at least 2");
  return AggregatedWindow{t0, w, sum_snapshots(net.window(t0, w))};
}

ActiveNodes filter_active_nodes(const TemporalNetwork& net, std::size_t t0, std::size_t w) {
  const auto window = net.window(t0, w);
  std::vector<bool> active(net.node_count(), false);
  for (const auto& s : window) {
    for (const auto& e : s.edges()) active[e.u] = active[e.v] = true;
  }
  ActiveNodes result;
  std::vector<NodeId> remap(net.node_count(), 0);
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i]) {
      remap[i] = static_cast<NodeId>(result.original_ids.size());
      result.original_ids.push_back(static_cast<NodeId>(i));
    }
  }
  if (result.original_ids.empty()) {
    throw DataError("window [" + std::to_string(t0) + ", " + std::to_string(t0 + w) +
                    ") has no active nodes");
  }
  std::vector<Snapshot> restricted;
  restricted.reserve(w);
  for (const auto& s : window) {
    std::vector<Edge> edges;
    edges.reserve(s.pair_count());
    for (const auto& e : s.edges()) edges.push_back({remap[e.u], remap[e.v], e.count});
    restricted.emplace_back(result.original_ids.size(), std::move(edges), s.directed());
  }
  std::vector<std::string> labels;
  if (!net.labels().empty()) {
    for (auto id : result.original_ids) labels.push_back(net.labels()[id]);
  }
  result.window = TemporalNetwork(std::move(restricted), std::move(labels), net.time_of(t0));
  return result;
}

double mean_degree(const Snapshot& s) {
  if (s.node_count() == 0) throw std::invalid_argument("mean degree of a graph without nodes");
  return 2.0 * static_cast<double>(s.total_multiplicity()) / static_cast<double>(s.node_count());
}

std::optional<double> mean_geodesic(const Snapshot& s) {
  const auto n = s.node_count();
  if (n < 2) throw std::invalid_argument("mean geodesic needs at least two nodes");
  std::vector<std::vector<NodeId>> adjacency(n);
  for (const auto& e : s.edges()) {
    adjacency[e.u].push_back(e.v);
    if (!s.directed()) adjacency[e.v].push_back(e.u);
  }
  std::uint64_t total = 0, pairs = 0;
  std::vector<std::int64_t> dist(n);
  std::queue<NodeId> frontier;
  for (NodeId source = 0; source < n; ++source) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
      const auto u = frontier.front();
      frontier.pop();
      for (auto v : adjacency[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          total += static_cast<std::uint64_t>(dist[v]);
          ++pairs;
          frontier.push(v);
        }
      }
    }
  }
  if (pairs == 0) return std::nullopt;
  return static_cast<double>(total) / static_cast<double>(pairs);
}

}  // namespace netshift
