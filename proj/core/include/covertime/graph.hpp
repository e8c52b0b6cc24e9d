#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace covertime {

/// Dense node index in [0, m).
using NodeId = std::uint32_t;
/// Positional action index, local to its source node: 0..d_i-1.
using ActionId = std::uint32_t;

/// One outgoing action. `direction` is the action's label used by policies
/// that repeat "the same action" across nodes (grid directions, maze
/// arrows). Graphs built without labels use the positional index.
struct Arc {
  NodeId target;
  int direction;
};

/// Immutable finite directed graph with action-labelled out-lists.
///
/// Every node has at least one action and every successor is a valid node.
/// Connectivity is not enforced here (see is_connected); every shipped
/// environment generator checks it.
class Graph {
 public:
  class Builder {
   public:
    explicit Builder(std::size_t node_count);

    /// Appends an action i -> j. Without a label the action's positional
    /// index becomes its direction.
    Builder& add_arc(NodeId from, NodeId to, std::optional<int> direction = std::nullopt);
    /// Appends i -> j and j -> i.
    Builder& add_edge(NodeId u, NodeId v);

    Builder& name(std::string name);
    Builder& param(std::string key, long long value);

    /// Throws std::invalid_argument when a node has no action.
    Graph build() &&;

   private:
    std::size_t node_count_;
    std::vector<std::vector<Arc>> out_;
    std::string name_;
    std::map<std::string, long long> params_;
  };

  Graph() = default;

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t arc_count() const noexcept { return arcs_.size(); }

  std::span<const Arc> actions(NodeId i) const {
    return {arcs_.data() + offsets_[i], arcs_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  NodeId successor(NodeId i, ActionId a) const { return arcs_[offsets_[i] + a].target; }
  /// Flat index of (i, a) into a per-arc table.
  std::size_t arc_index(NodeId i, ActionId a) const { return offsets_[i] + a; }
  std::size_t first_arc(NodeId i) const { return offsets_[i]; }

  std::size_t max_degree() const noexcept { return max_degree_; }

  /// Action at i carrying `direction`, if any.
  std::optional<ActionId> action_with_direction(NodeId i, int direction) const;

  const std::string& name() const noexcept { return name_; }
  const std::map<std::string, long long>& params() const noexcept { return params_; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Arc> arcs_;
  std::size_t max_degree_ = 0;
  std::string name_;
  std::map<std::string, long long> params_;
};

inline std::size_t degree(const Graph& g, NodeId i) { return g.degree(i); }

/// BFS hop distances from `source`; unreachable nodes get SIZE_MAX.
std::vector<std::size_t> bfs_distances(const Graph& g, NodeId source);

/// True iff node 0 reaches every node and every node reaches node 0.
bool is_connected(const Graph& g);

/// Diameter: max over ordered pairs of shortest-path hop distance.
/// Throws std::invalid_argument on a disconnected graph.
std::size_t eccentricity_max(const Graph& g);

/// `m` on the first line, then `i: j1 j2 ...` per node in action order.
std::string to_adjacency_text(const Graph& g);
Graph from_adjacency_text(std::string_view text);

}  // namespace covertime
