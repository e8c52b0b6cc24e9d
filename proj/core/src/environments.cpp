#include "covertime/environments.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

namespace covertime {

namespace {

constexpr std::array<std::pair<EnvKind, std::string_view>, 12> kKindNames{{
    {EnvKind::star, "star"},
    {EnvKind::path, "path"},
    {EnvKind::circle, "circle"},
    {EnvKind::clique, "clique"},
    {EnvKind::barbell, "barbell"},
    {EnvKind::btree, "btree"},
    {EnvKind::grid1d, "grid1d"},
    {EnvKind::grid2d, "grid2d"},
    {EnvKind::grid3d, "grid3d"},
    {EnvKind::multiroom, "multiroom"},
    {EnvKind::toy_maze, "toy_maze"},
    {EnvKind::hanoi, "hanoi"},
}};

// Node-count ceiling for generators; keeps dense per-node tables sane.
constexpr long long kMaxNodes = 1'000'000;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

Environment finish(Graph::Builder&& builder, EnvKind kind, std::map<std::string, long long> params,
                   StartRule rule, NodeId start, std::optional<NodeId> target) {
  builder.name(std::string(to_string(kind)));
  for (const auto& [k, v] : params) builder.param(k, v);
  Environment env{std::move(builder).build(), EnvSpec{kind, std::move(params), rule, start, target}};
  if (!is_connected(env.graph))
    throw std::logic_error("generator produced a disconnected graph: " + std::string(to_string(kind)));
  return env;
}

void add_clique(Graph::Builder& b, NodeId first, NodeId count) {
  for (NodeId u = first; u < first + count; ++u)
    for (NodeId v = first; v < first + count; ++v)
      if (u != v) b.add_arc(u, v);
}

}  // namespace

std::string_view to_string(EnvKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

EnvKind env_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw std::invalid_argument("unknown environment kind: " + std::string(name));
}

long long EnvSpec::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw std::invalid_argument("missing environment parameter: " + key);
  return it->second;
}

std::string EnvSpec::params_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : params) {
    if (!first) os << ';';
    os << k << '=' << v;
    first = false;
  }
  return os.str();
}

NodeId Environment::choose_start(Rng& rng) const {
  if (spec.start_rule == StartRule::uniform)
    return static_cast<NodeId>(rng.uniform_index(graph.node_count()));
  return spec.start;
}

Environment make_star(long long n) {
  require(n >= 2, "star: n must be >= 2");
  require(n < kMaxNodes, "star: n too large");
  Graph::Builder b(static_cast<std::size_t>(n) + 1);
  for (NodeId leaf = 1; leaf <= n; ++leaf) b.add_arc(0, leaf);
  for (NodeId leaf = 1; leaf <= n; ++leaf) b.add_arc(leaf, 0);
  return finish(std::move(b), EnvKind::star, {{"n", n}}, StartRule::fixed, 0, std::nullopt);
}

Environment make_path(long long n) {
  require(n >= 2, "path: n must be >= 2");
  require(n < kMaxNodes, "path: n too large");
  Graph::Builder b(static_cast<std::size_t>(n) + 1);
  for (NodeId i = 0; i <= n; ++i) {
    if (i > 0) b.add_arc(i, i - 1);
    if (i < n) b.add_arc(i, i + 1);
  }
  return finish(std::move(b), EnvKind::path, {{"n", n}}, StartRule::fixed, 0,
                static_cast<NodeId>(n));
}

Environment make_circle(long long n) {
  require(n >= 2, "circle: n must be >= 2");
  require(n < kMaxNodes, "circle: n too large");
  const auto m = static_cast<NodeId>(n + 1);
  Graph::Builder b(m);
  for (NodeId i = 0; i < m; ++i) {
    b.add_arc(i, (i + m - 1) % m);
    b.add_arc(i, (i + 1) % m);
  }
  return finish(std::move(b), EnvKind::circle, {{"n", n}}, StartRule::fixed, 0, std::nullopt);
}

Environment make_clique(long long n) {
  require(n >= 2, "clique: n must be >= 2");
  require(n <= 5000, "clique: n too large");
  Graph::Builder b(static_cast<std::size_t>(n));
  add_clique(b, 0, static_cast<NodeId>(n));
  return finish(std::move(b), EnvKind::clique, {{"n", n}}, StartRule::fixed, 0, std::nullopt);
}

Environment make_barbell(long long n) {
  require(n >= 2, "barbell: n must be >= 2");
  require(n <= 5000, "barbell: n too large");
  const auto half = static_cast<NodeId>(n);
  Graph::Builder b(2 * static_cast<std::size_t>(n));
  add_clique(b, 0, half);
  add_clique(b, half, half);
  b.add_edge(half - 1, half);
  return finish(std::move(b), EnvKind::barbell, {{"n", n}}, StartRule::uniform, 0, std::nullopt);
}

Environment make_btree(long long b, long long height) {
  require(b >= 2, "btree: b must be >= 2");
  require(height >= 1, "btree: H must be >= 1");
  long long nodes = 1, level = 1;
  for (long long h = 1; h <= height; ++h) {
    require(level <= kMaxNodes / b, "btree: too many nodes");
    level *= b;
    nodes += level;
    require(nodes < kMaxNodes, "btree: too many nodes");
  }
  const long long internal = nodes - level;
  Graph::Builder builder(static_cast<std::size_t>(nodes));
  for (long long i = 0; i < nodes; ++i) {
    const auto u = static_cast<NodeId>(i);
    if (i > 0) builder.add_arc(u, static_cast<NodeId>((i - 1) / b));
    if (i < internal)
      for (long long c = 1; c <= b; ++c) builder.add_arc(u, static_cast<NodeId>(i * b + c));
  }
  return finish(std::move(builder), EnvKind::btree, {{"H", height}, {"b", b}}, StartRule::fixed, 0,
                std::nullopt);
}

Environment make_grid1d(long long n) {
  require(n >= 2, "grid1d: n must be >= 2");
  require(n < kMaxNodes, "grid1d: n too large");
  Graph::Builder b(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) {
    b.add_arc(i, i > 0 ? i - 1 : i, dir::left);
    b.add_arc(i, i + 1 < n ? i + 1 : i, dir::right);
  }
  return finish(std::move(b), EnvKind::grid1d, {{"n", n}}, StartRule::uniform, 0, std::nullopt);
}

Environment make_grid2d(long long rows, long long cols) {
  require(rows >= 2 && cols >= 2, "grid2d: n1, n2 must be >= 2");
  require(rows * cols < kMaxNodes, "grid2d: too many nodes");
  const auto id = [cols](long long r, long long c) { return static_cast<NodeId>(r * cols + c); };
  Graph::Builder b(static_cast<std::size_t>(rows * cols));
  for (long long r = 0; r < rows; ++r) {
    for (long long c = 0; c < cols; ++c) {
      const NodeId u = id(r, c);
      b.add_arc(u, r > 0 ? id(r - 1, c) : u, dir::up);
      b.add_arc(u, r + 1 < rows ? id(r + 1, c) : u, dir::down);
      b.add_arc(u, c > 0 ? id(r, c - 1) : u, dir::left);
      b.add_arc(u, c + 1 < cols ? id(r, c + 1) : u, dir::right);
    }
  }
  return finish(std::move(b), EnvKind::grid2d, {{"n1", rows}, {"n2", cols}}, StartRule::uniform, 0,
                std::nullopt);
}

Environment make_grid3d(long long n1, long long n2, long long n3) {
  require(n1 >= 2 && n2 >= 2 && n3 >= 2, "grid3d: n1, n2, n3 must be >= 2");
  require(n1 * n2 * n3 < kMaxNodes, "grid3d: too many nodes");
  const auto id = [n2, n3](long long i, long long j, long long k) {
    return static_cast<NodeId>((i * n2 + j) * n3 + k);
  };
  Graph::Builder b(static_cast<std::size_t>(n1 * n2 * n3));
  for (long long i = 0; i < n1; ++i) {
    for (long long j = 0; j < n2; ++j) {
      for (long long k = 0; k < n3; ++k) {
        const NodeId u = id(i, j, k);
        b.add_arc(u, i > 0 ? id(i - 1, j, k) : u, dir::up);
        b.add_arc(u, i + 1 < n1 ? id(i + 1, j, k) : u, dir::down);
        b.add_arc(u, j > 0 ? id(i, j - 1, k) : u, dir::left);
        b.add_arc(u, j + 1 < n2 ? id(i, j + 1, k) : u, dir::right);
        b.add_arc(u, k > 0 ? id(i, j, k - 1) : u, dir::forward);
        b.add_arc(u, k + 1 < n3 ? id(i, j, k + 1) : u, dir::back);
      }
    }
  }
  return finish(std::move(b), EnvKind::grid3d, {{"n1", n1}, {"n2", n2}, {"n3", n3}},
                StartRule::uniform, 0, std::nullopt);
}

Environment make_multiroom(long long rooms) {
  require(rooms >= 1, "multiroom: rooms must be >= 1");
  require(rooms <= 10'000, "multiroom: too many rooms");
  constexpr int S = kRoomSize;
  // Per-room cell -> local node id (or -1 for walls).
  std::array<std::array<int, S>, S> local{};
  int open = 0;
  for (int r = 0; r < S; ++r)
    for (int c = 0; c < S; ++c) local[r][c] = kRoomTemplate[r][c] == '#' ? -1 : open++;
  const auto node = [&](long long room, int r, int c) {
    return static_cast<NodeId>(room * open + local[r][c]);
  };
  const auto open_cell = [&](int r, int c) {
    return r >= 0 && r < S && c >= 0 && c < S && local[r][c] >= 0;
  };
  Graph::Builder b(static_cast<std::size_t>(rooms * open));
  constexpr std::array<std::tuple<int, int, int>, 4> kMoves{{
      {dir::up, -1, 0}, {dir::down, 1, 0}, {dir::left, 0, -1}, {dir::right, 0, 1}}};
  for (long long room = 0; room < rooms; ++room) {
    for (int r = 0; r < S; ++r) {
      for (int c = 0; c < S; ++c) {
        if (local[r][c] < 0) continue;
        const NodeId u = node(room, r, c);
        for (const auto& [d, dr, dc] : kMoves)
          b.add_arc(u, open_cell(r + dr, c + dc) ? node(room, r + dr, c + dc) : u, d);
        if (r == S - 1 && c == S - 1 && room + 1 < rooms) b.add_arc(u, node(room + 1, 0, 0), dir::portal);
        if (r == 0 && c == 0 && room > 0) b.add_arc(u, node(room - 1, S - 1, S - 1), dir::portal);
      }
    }
  }
  return finish(std::move(b), EnvKind::multiroom, {{"rooms", rooms}}, StartRule::fixed,
                node(0, 0, 0), node(rooms - 1, S - 1, S - 1));
}

// 3x3 maze, two blocked cells:
//   1 # 5
//   0 3 4        0 = Start, 6 = End
//   2 # 6
// Each state exposes only its arrow actions.
Environment make_toy_maze() {
  Graph::Builder b(7);
  b.add_arc(0, 1, dir::up).add_arc(0, 2, dir::down).add_arc(0, 3, dir::right);
  b.add_arc(1, 0, dir::down);
  b.add_arc(2, 0, dir::up);
  b.add_arc(3, 0, dir::left).add_arc(3, 4, dir::right);
  b.add_arc(4, 5, dir::up).add_arc(4, 3, dir::left).add_arc(4, 6, dir::down);
  b.add_arc(5, 4, dir::down);
  b.add_arc(6, 4, dir::up);
  return finish(std::move(b), EnvKind::toy_maze, {}, StartRule::fixed, 0, NodeId{6});
}

RestrictedMaze make_restricted_toy_maze() {
  // dense ids: 0->0, 1->3, 2->4, 3->5, 4->6
  Graph::Builder b(5);
  b.add_arc(0, 1, dir::right);
  b.add_arc(1, 0, dir::left).add_arc(1, 2, dir::right);
  b.add_arc(2, 3, dir::up).add_arc(2, 1, dir::left).add_arc(2, 4, dir::down);
  b.add_arc(3, 2, dir::down);
  b.add_arc(4, 2, dir::up);
  b.name("toy_maze_restricted");
  return RestrictedMaze{std::move(b).build(), {0, 3, 4, 5, 6}, 0, 4};
}

Environment make_hanoi(long long discs) {
  require(discs >= 1 && discs <= 8, "hanoi: discs must be in [1, 8]");
  const int n = static_cast<int>(discs);
  NodeId count = 1;
  for (int d = 0; d < n; ++d) count *= 3;
  std::vector<NodeId> pow3(n, 1);
  for (int d = 1; d < n; ++d) pow3[d] = pow3[d - 1] * 3;

  Graph::Builder b(count);
  for (NodeId state = 0; state < count; ++state) {
    std::array<int, 3> top{n, n, n};  // smallest disc on each peg; n = empty
    for (int d = n - 1; d >= 0; --d) top[(state / pow3[d]) % 3] = d;
    for (int from = 0; from < 3; ++from) {
      if (top[from] == n) continue;
      for (int to = 0; to < 3; ++to) {
        if (to == from || top[to] < top[from]) continue;
        const int d = top[from];
        const NodeId next = state + static_cast<NodeId>(to - from) * pow3[d];
        b.add_arc(state, next, from * 3 + to);
      }
    }
  }
  return finish(std::move(b), EnvKind::hanoi, {{"discs", discs}}, StartRule::fixed, 0, count - 1);
}

Environment make_environment(EnvKind kind, const std::map<std::string, long long>& params) {
  const auto get = [&](const std::string& key) -> long long {
    const auto it = params.find(key);
    if (it == params.end())
      throw std::invalid_argument(std::string(to_string(kind)) + ": missing parameter '" + key + "'");
    return it->second;
  };
  const auto get_or = [&](const std::string& key, const std::string& fallback) {
    return params.contains(key) ? get(key) : get(fallback);
  };
  Environment env;
  switch (kind) {
    case EnvKind::star: env = make_star(get("n")); break;
    case EnvKind::path: env = make_path(get("n")); break;
    case EnvKind::circle: env = make_circle(get("n")); break;
    case EnvKind::clique: env = make_clique(get("n")); break;
    case EnvKind::barbell: env = make_barbell(get("n")); break;
    case EnvKind::btree: env = make_btree(get("b"), get("H")); break;
    case EnvKind::grid1d: env = make_grid1d(get_or("n", "grid")); break;
    case EnvKind::grid2d: env = make_grid2d(get_or("n1", "grid"), get_or("n2", "grid")); break;
    case EnvKind::grid3d:
      env = make_grid3d(get_or("n1", "grid"), get_or("n2", "grid"), get_or("n3", "grid"));
      break;
    case EnvKind::multiroom: env = make_multiroom(get("rooms")); break;
    case EnvKind::toy_maze: env = make_toy_maze(); break;
    case EnvKind::hanoi: env = make_hanoi(get("discs")); break;
  }
  const auto m = static_cast<long long>(env.graph.node_count());
  if (const auto it = params.find("start"); it != params.end()) {
    require(it->second >= 0 && it->second < m, "start node out of range");
    env.spec.start_rule = StartRule::fixed;
    env.spec.start = static_cast<NodeId>(it->second);
    env.spec.params["start"] = it->second;
  }
  if (const auto it = params.find("target"); it != params.end()) {
    require(it->second >= 0 && it->second < m, "target node out of range");
    env.spec.target = static_cast<NodeId>(it->second);
    env.spec.params["target"] = it->second;
  }
  return env;
}

}  // namespace covertime
