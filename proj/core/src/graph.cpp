#include "covertime/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace covertime {

Graph::Builder::Builder(std::size_t node_count) : node_count_(node_count), out_(node_count) {
  if (node_count == 0) throw std::invalid_argument("graph must have at least one node");
  if (node_count > std::numeric_limits<NodeId>::max())
    throw std::invalid_argument("graph too large for 32-bit node ids");
}

Graph::Builder& Graph::Builder::add_arc(NodeId from, NodeId to, std::optional<int> direction) {
  if (from >= node_count_ || to >= node_count_)
    throw std::out_of_range("arc endpoint out of range");
  auto& list = out_[from];
  list.push_back(Arc{to, direction.value_or(static_cast<int>(list.size()))});
  return *this;
}

Graph::Builder& Graph::Builder::add_edge(NodeId u, NodeId v) {
  add_arc(u, v);
  add_arc(v, u);
  return *this;
}

Graph::Builder& Graph::Builder::name(std::string name) {
  name_ = std::move(name);
  return *this;
}

Graph::Builder& Graph::Builder::param(std::string key, long long value) {
  params_[std::move(key)] = value;
  return *this;
}

Graph Graph::Builder::build() && {
  Graph g;
  g.offsets_.reserve(node_count_ + 1);
  g.offsets_.push_back(0);
  for (std::size_t i = 0; i < node_count_; ++i) {
    if (out_[i].empty())
      throw std::invalid_argument("node " + std::to_string(i) + " has no outgoing action");
    g.max_degree_ = std::max(g.max_degree_, out_[i].size());
    g.arcs_.insert(g.arcs_.end(), out_[i].begin(), out_[i].end());
    g.offsets_.push_back(g.arcs_.size());
  }
  g.name_ = std::move(name_);
  g.params_ = std::move(params_);
  return g;
}

std::optional<ActionId> Graph::action_with_direction(NodeId i, int direction) const {
  const auto acts = actions(i);
  for (std::size_t a = 0; a < acts.size(); ++a)
    if (acts[a].direction == direction) return static_cast<ActionId>(a);
  return std::nullopt;
}

std::vector<std::size_t> bfs_distances(const Graph& g, NodeId source) {
  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.node_count(), kUnreached);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (const Arc& arc : g.actions(u)) {
      if (dist[arc.target] == kUnreached) {
        dist[arc.target] = dist[u] + 1;
        queue.push_back(arc.target);
      }
    }
  }
  return dist;
}

namespace {

Graph reversed(const Graph& g) {
  Graph::Builder b(g.node_count());
  for (NodeId i = 0; i < g.node_count(); ++i)
    for (const Arc& arc : g.actions(i)) b.add_arc(arc.target, i);
  // A node with no incoming arc would fail build(); give it a self-loop so
  // the reverse BFS still reports it as unreachable from others.
  for (NodeId i = 0; i < g.node_count(); ++i) b.add_arc(i, i);
  return std::move(b).build();
}

}  // namespace

bool is_connected(const Graph& g) {
  if (g.node_count() == 0) return false;
  const auto unreached = [](const std::vector<std::size_t>& d) {
    return std::ranges::any_of(d, [](std::size_t x) { return x == std::numeric_limits<std::size_t>::max(); });
  };
  if (unreached(bfs_distances(g, 0))) return false;
  return !unreached(bfs_distances(reversed(g), 0));
}

std::size_t eccentricity_max(const Graph& g) {
  std::size_t diameter = 0;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    for (std::size_t d : bfs_distances(g, s)) {
      if (d == std::numeric_limits<std::size_t>::max())
        throw std::invalid_argument("eccentricity_max: graph is disconnected");
      diameter = std::max(diameter, d);
    }
  }
  return diameter;
}

std::string to_adjacency_text(const Graph& g) {
  std::ostringstream os;
  os << g.node_count() << '\n';
  for (NodeId i = 0; i < g.node_count(); ++i) {
    os << i << ':';
    for (const Arc& arc : g.actions(i)) os << ' ' << arc.target;
    os << '\n';
  }
  return os.str();
}

Graph from_adjacency_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::size_t m = 0;
  if (!(is >> m) || m == 0) throw std::invalid_argument("adjacency text: bad node count");
  Graph::Builder b(m);
  std::string line;
  std::getline(is, line);
  std::size_t seen = 0;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("adjacency text: missing ':'");
    const auto node = static_cast<NodeId>(std::stoul(line.substr(0, colon)));
    std::istringstream targets(line.substr(colon + 1));
    long long j = 0;
    while (targets >> j) {
      if (j < 0) throw std::invalid_argument("adjacency text: negative node id");
      b.add_arc(node, static_cast<NodeId>(j));
    }
    ++seen;
  }
  if (seen != m) throw std::invalid_argument("adjacency text: expected one line per node");
  return std::move(b).build();
}

}  // namespace covertime
