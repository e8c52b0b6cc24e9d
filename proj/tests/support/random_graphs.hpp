#pragma once

#include <random>
#include <set>
#include <utility>

#include "covertime/graph.hpp"

namespace covertime::oracle {

// Connected simple undirected graph: a random recursive tree plus extra edges.
inline Graph random_connected_graph(std::mt19937_64& gen, std::size_t m, double extra_edge_prob) {
  std::set<std::pair<NodeId, NodeId>> edges;
  for (NodeId v = 1; v < m; ++v) {
    std::uniform_int_distribution<NodeId> pick(0, v - 1);
    const NodeId u = pick(gen);
    edges.insert({u, v});
  }
  std::bernoulli_distribution extra(extra_edge_prob);
  for (NodeId u = 0; u < m; ++u)
    for (NodeId v = u + 1; v < m; ++v)
      if (extra(gen)) edges.insert({u, v});
  Graph::Builder b(m);
  b.name("random");
  for (const auto& [u, v] : edges) b.add_edge(u, v);
  return std::move(b).build();
}

}  // namespace covertime::oracle
