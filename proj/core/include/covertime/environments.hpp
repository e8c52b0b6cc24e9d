#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covertime/graph.hpp"
#include "covertime/rng.hpp"

namespace covertime {

enum class EnvKind {
  star,
  path,
  circle,
  clique,
  barbell,
  btree,
  grid1d,
  grid2d,
  grid3d,
  multiroom,
  toy_maze,
  hanoi,
};

std::string_view to_string(EnvKind kind);
/// Throws std::invalid_argument for an unknown name.
EnvKind env_kind_from_string(std::string_view name);

enum class StartRule { fixed, uniform };

/// Grid and maze direction labels carried on Arc::direction.
namespace dir {
inline constexpr int up = 0;
inline constexpr int down = 1;
inline constexpr int left = 2;
inline constexpr int right = 3;
inline constexpr int forward = 4;
inline constexpr int back = 5;
inline constexpr int portal = 6;
}  // namespace dir

struct EnvSpec {
  EnvKind kind = EnvKind::star;
  std::map<std::string, long long> params;
  StartRule start_rule = StartRule::fixed;
  NodeId start = 0;
  std::optional<NodeId> target;

  long long param(const std::string& key) const;
  /// "k1=v1;k2=v2" in key order.
  std::string params_string() const;
};

struct Environment {
  Graph graph;
  EnvSpec spec;

  /// Start node for one run; draws from `rng` only for StartRule::uniform.
  NodeId choose_start(Rng& rng) const;
};

Environment make_star(long long n);
Environment make_path(long long n);
Environment make_circle(long long n);
Environment make_clique(long long n);
Environment make_barbell(long long n);
Environment make_btree(long long b, long long height);
Environment make_grid1d(long long n);
Environment make_grid2d(long long rows, long long cols);
Environment make_grid3d(long long n1, long long n2, long long n3);
Environment make_multiroom(long long rooms);
Environment make_toy_maze();
Environment make_hanoi(long long discs);

/// Restricted toy maze used by the path-enumeration table: states {0,3,4,5,6}
/// only. Node ids are dense 0..4; `labels` maps them back to maze states.
struct RestrictedMaze {
  Graph graph;
  std::vector<NodeId> labels;
  NodeId start;
  NodeId target;
};
RestrictedMaze make_restricted_toy_maze();

/// MultiRoom room template (row-major, '#' = wall).
inline constexpr int kRoomSize = 5;
inline constexpr std::string_view kRoomTemplate[kRoomSize] = {
    ".....",
    ".##..",
    "...#.",
    ".#...",
    ".....",
};

/// Dispatch by kind with named parameters:
///   star/path/circle/clique/barbell/grid1d: n
///   btree: b, H     grid2d: n1, n2 (or grid)     grid3d: n1, n2, n3 (or grid)
///   multiroom: rooms     hanoi: discs     toy_maze: none
/// Optional overrides: start=<node> fixes the start node, target=<node>.
/// Throws std::invalid_argument on a missing or out-of-range parameter.
Environment make_environment(EnvKind kind, const std::map<std::string, long long>& params);

}  // namespace covertime
