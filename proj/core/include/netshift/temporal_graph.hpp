#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace netshift {

using NodeId = std::uint32_t;
using Multiplicity = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  Multiplicity count = 1;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One network observation: an integer-weighted adjacency over a fixed node set.
///
/// Edges are kept in canonical form: sorted by (u, v), duplicates merged into
/// a single multiplicity, and u < v for undirected graphs. Self-loops are
/// rejected at construction.
class Snapshot {
 public:
  Snapshot() = default;
  Snapshot(std::size_t node_count, std::vector<Edge> edges, bool directed = false);

  std::size_t node_count() const noexcept { return node_count_; }
  bool directed() const noexcept { return directed_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  /// Number of distinct linked pairs (ordered pairs when directed).
  std::size_t pair_count() const noexcept { return edges_.size(); }
  std::uint64_t total_multiplicity() const noexcept { return total_; }
  bool empty() const noexcept { return edges_.empty(); }

  Multiplicity multiplicity(NodeId u, NodeId v) const;

  /// Multiplicity-weighted degree; in + out for directed graphs.
  std::vector<std::uint64_t> degrees() const;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;

 private:
  std::size_t node_count_ = 0;
  bool directed_ = false;
  std::vector<Edge> edges_;
  std::uint64_t total_ = 0;
};

/// Ordered snapshots over one node universe. Snapshot i sits at time
/// first_time() + i, so timestamps increase strictly with position.
class TemporalNetwork {
 public:
  TemporalNetwork() = default;
  TemporalNetwork(std::vector<Snapshot> snapshots, std::vector<std::string> labels = {},
                  std::int64_t first_time = 0);

  std::size_t size() const noexcept { return snapshots_.size(); }
  bool empty() const noexcept { return snapshots_.empty(); }
  std::size_t node_count() const noexcept { return node_count_; }
  bool directed() const noexcept { return directed_; }
  std::int64_t first_time() const noexcept { return first_time_; }
  std::int64_t time_of(std::size_t index) const noexcept {
    return first_time_ + static_cast<std::int64_t>(index);
  }

  const Snapshot& operator[](std::size_t i) const { return snapshots_[i]; }
  const Snapshot& at(std::size_t i) const { return snapshots_.at(i); }
  std::span<const Snapshot> snapshots() const noexcept { return snapshots_; }

  /// Snapshots [t0, t0 + w); throws std::out_of_range past the end.
  std::span<const Snapshot> window(std::size_t t0, std::size_t w) const;

  /// Node labels, one per node id. Empty when the series was built without labels.
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  friend bool operator==(const TemporalNetwork&, const TemporalNetwork&) = default;

 private:
  std::vector<Snapshot> snapshots_;
  std::vector<std::string> labels_;
  std::int64_t first_time_ = 0;
  std::size_t node_count_ = 0;
  bool directed_ = false;
};

struct EdgeListFormat {
  bool directed = false;
  bool allow_self_loops = false;  // when set, loops are accepted and dropped
  bool header = false;            // skip the first non-comment line
};

/// Optional JSON metadata stored next to an edge list.
struct EdgeListSidecar {
  std::optional<bool> directed;
  std::vector<std::string> labels;
  std::optional<std::int64_t> first_time;
  std::optional<std::size_t> snapshot_count;
};

/// Parses `t u v [count]` records (comma or whitespace separated, `#` comments).
/// Node ids are arbitrary tokens mapped to 0..N-1: sidecar order when labels are
/// given, otherwise numeric order for all-integer ids and lexicographic order
/// otherwise. Missing times in [min t, max t] become empty snapshots.
TemporalNetwork load_edge_list(std::istream& in, const EdgeListFormat& format = {},
                               const EdgeListSidecar* sidecar = nullptr);

/// Canonical `t,u,v,count` form sorted by (t, u, v), using node labels.
void save_edge_list(std::ostream& out, const TemporalNetwork& net);

EdgeListSidecar load_sidecar(std::istream& in);
void save_sidecar(std::ostream& out, const TemporalNetwork& net);

/// Loads `path` plus `<stem>.meta.json` next to it when that file exists.
TemporalNetwork read_temporal_network(const std::string& path, EdgeListFormat format = {});
void write_temporal_network(const std::string& path, const TemporalNetwork& net);
std::string sidecar_path_for(const std::string& edge_list_path);

struct AggregatedWindow {
  std::size_t t0 = 0;
  std::size_t width = 0;
  Snapshot adjacency;
};

/// Element-wise sum of any non-empty run of snapshots sharing N and directedness.
Snapshot sum_snapshots(std::span<const Snapshot> snapshots);

AggregatedWindow aggregate_window(const TemporalNetwork& net, std::size_t t0, std::size_t w);

struct ActiveNodes {
  std::vector<NodeId> original_ids;  // restricted id i -> original id
  TemporalNetwork window;            // the w snapshots over the restricted node set
};

/// Keeps nodes with at least one link somewhere in [t0, t0 + w).
ActiveNodes filter_active_nodes(const TemporalNetwork& net, std::size_t t0, std::size_t w);

double mean_degree(const Snapshot& s);

/// Mean unweighted shortest-path length over connected ordered pairs;
/// std::nullopt when no pair is connected.
std::optional<double> mean_geodesic(const Snapshot& s);

}  // namespace netshift
