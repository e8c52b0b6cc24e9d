#include "covertime/exact_analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace covertime {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Sparse LU solve with one step of iterative refinement.
Eigen::VectorXd sparse_solve(const SparseMatrix& a, const Eigen::VectorXd& b, double tolerance,
                             const char* what) {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw NumericalError(std::string(what) + ": singular system");
  Eigen::VectorXd x = lu.solve(b);
  Eigen::VectorXd r = b - a * x;
  if (max_abs(r) > 0.0) {
    x += lu.solve(r);
    r = b - a * x;
  }
  const double res = max_abs(r);
  if (!(res <= tolerance))
    throw NumericalError(std::string(what) + ": residual " + std::to_string(res) + " exceeds tolerance");
  return x;
}

// Unknown index for every node except the excluded ones (-1).
std::vector<int> compact_index(std::size_t m, std::initializer_list<NodeId> excluded, int& count) {
  std::vector<int> idx(m, 0);
  for (NodeId e : excluded) idx[e] = -1;
  count = 0;
  for (auto& v : idx)
    if (v == 0) v = count++;
  return idx;
}

}  // namespace

std::vector<double> LinearSystem::solve() const {
  if (n == 0) return {};
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mat(
      a.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n));
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(mat);
  Eigen::VectorXd x = lu.solve(rhs);
  Eigen::VectorXd r = rhs - mat * x;
  x += lu.solve(r);
  std::vector<double> out(x.data(), x.data() + x.size());
  const double res = residual(*this, out);
  if (!(res <= tolerance))
    throw NumericalError("LinearSystem: residual " + std::to_string(res) + " exceeds tolerance");
  return out;
}

double residual(const LinearSystem& sys, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sys.n; ++i) {
    double r = sys.b[i];
    for (std::size_t j = 0; j < sys.n; ++j) r -= sys.at(i, j) * x[j];
    if (std::isnan(r)) return r;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

std::vector<double> hitting_times_rw(const Graph& g, NodeId target, double tolerance) {
  const std::size_t m = g.node_count();
  if (target >= m) throw std::invalid_argument("hitting_times_rw: target out of range");
  std::vector<double> h(m, 0.0);
  if (m == 1) return h;
  int unknowns = 0;
  const auto idx = compact_index(m, {target}, unknowns);

  Triplets trips;
  trips.reserve(g.arc_count() + m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(unknowns);
  for (NodeId v = 0; v < m; ++v) {
    if (idx[v] < 0) continue;
    trips.emplace_back(idx[v], idx[v], 1.0);
    const double w = 1.0 / static_cast<double>(g.degree(v));
    for (const Arc& arc : g.actions(v))
      if (idx[arc.target] >= 0) trips.emplace_back(idx[v], idx[arc.target], -w);
  }
  SparseMatrix a(unknowns, unknowns);
  a.setFromTriplets(trips.begin(), trips.end());
  const Eigen::VectorXd x = sparse_solve(a, rhs, tolerance, "hitting_times_rw");
  for (NodeId v = 0; v < m; ++v)
    if (idx[v] >= 0) h[v] = x[idx[v]];
  return h;
}

std::vector<double> hitting_prob_before_return(const Graph& g, NodeId i, NodeId j) {
  const std::size_t m = g.node_count();
  if (i >= m || j >= m) throw std::invalid_argument("hitting_prob_before_return: node out of range");
  if (i == j) throw std::invalid_argument("hitting_prob_before_return: i must differ from j");

  std::vector<double> f(m, 0.0);
  f[j] = 1.0;
  int unknowns = 0;
  const auto idx = compact_index(m, {i, j}, unknowns);
  if (unknowns > 0) {
    Triplets trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
    for (NodeId v = 0; v < m; ++v) {
      if (idx[v] < 0) continue;
      trips.emplace_back(idx[v], idx[v], 1.0);
      const double w = 1.0 / static_cast<double>(g.degree(v));
      for (const Arc& arc : g.actions(v)) {
        if (arc.target == j)
          rhs[idx[v]] += w;
        else if (idx[arc.target] >= 0)
          trips.emplace_back(idx[v], idx[arc.target], -w);
      }
    }
    SparseMatrix a(unknowns, unknowns);
    a.setFromTriplets(trips.begin(), trips.end());
    const Eigen::VectorXd x = sparse_solve(a, rhs, 1e-10, "hitting_prob_before_return");
    for (NodeId v = 0; v < m; ++v)
      if (idx[v] >= 0) f[v] = std::clamp(x[idx[v]], 0.0, 1.0);
  }
  std::vector<double> p;
  p.reserve(g.degree(i));
  for (const Arc& arc : g.actions(i)) p.push_back(f[arc.target]);
  return p;
}

double expected_excursions_rw(std::span<const double> p) {
  if (p.empty()) throw std::invalid_argument("expected_excursions_rw: empty p");
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (total <= 0.0) return kInf;
  return static_cast<double>(p.size()) / total;
}

double expected_excursions_local_nf(std::span<const double> p) {
  if (p.empty()) throw std::invalid_argument("expected_excursions_local_nf: empty p");
  std::vector<double> x(p.size());
  double product = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] >= 0.0 && p[k] <= 1.0))
      throw std::invalid_argument("expected_excursions_local_nf: p must lie in [0, 1]");
    x[k] = 1.0 - p[k];
    product *= x[k];
  }
  const double denominator = 1.0 - product;
  if (denominator <= 0.0) return kInf;
  const auto means = symmetric_means(x);
  double numerator = 1.0;
  for (std::size_t k = 0; k + 1 < means.s.size(); ++k) numerator += means.s[k];
  return numerator / denominator;
}

LocalImprovement local_improvement_check(const Graph& g, NodeId i, NodeId j) {
  LocalImprovement out;
  out.p = hitting_prob_before_return(g, i, j);
  out.e_rw = expected_excursions_rw(out.p);
  out.e_loc = expected_excursions_local_nf(out.p);
  if (std::isinf(out.e_rw) && std::isinf(out.e_loc)) {
    out.vacuous = true;
    out.holds = true;
  } else {
    out.holds = out.e_loc <= out.e_rw + 1e-9;
  }
  return out;
}

std::vector<double> elementary_symmetric(std::span<const double> x) {
  std::vector<double> e(x.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t t = 0; t < x.size(); ++t)
    for (std::size_t k = t + 1; k >= 1; --k) e[k] += x[t] * e[k - 1];
  return e;
}

SymmetricMeans symmetric_means(std::span<const double> x) {
  SymmetricMeans out;
  out.x.assign(x.begin(), x.end());
  const auto e = elementary_symmetric(x);
  const std::size_t K = x.size();
  out.s.resize(K);
  double binom = 1.0;
  for (std::size_t k = 1; k <= K; ++k) {
    binom = binom * static_cast<double>(K - k + 1) / static_cast<double>(k);
    out.s[k - 1] = e[k] / binom;
  }
  return out;
}

bool SymmetricMeans::maclaurin_chain_holds(double tol) const {
  double previous = s.empty() ? 0.0 : s[0];
  for (std::size_t k = 2; k <= s.size(); ++k) {
    const double root = std::pow(std::max(s[k - 1], 0.0), 1.0 / static_cast<double>(k));
    if (root > previous + tol) return false;
    previous = root;
  }
  return true;
}

double harmonic(std::uint64_t k) {
  double h = 0.0;
  // Summing small terms first keeps the rounding error down.
  for (std::uint64_t i = k; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

MatthewsBounds matthews_bounds(const Graph& g) {
  const std::size_t m = g.node_count();
  MatthewsBounds out;
  if (m < 2) return out;
  out.mu_minus = kInf;
  out.mu_plus = 0.0;
  for (NodeId j = 0; j < m; ++j) {
    const auto h = hitting_times_rw(g, j);
    for (NodeId i = 0; i < m; ++i) {
      if (i == j) continue;
      out.mu_minus = std::min(out.mu_minus, h[i]);
      out.mu_plus = std::max(out.mu_plus, h[i]);
    }
  }
  const double H = harmonic(m - 1);
  out.lower = out.mu_minus * H;
  out.upper = out.mu_plus * H;
  return out;
}

double exact_cover_time_rw(const Graph& g, NodeId start) {
  const std::size_t m = g.node_count();
  if (m > 16) throw std::invalid_argument("exact_cover_time_rw: limited to 16 nodes");
  if (start >= m) throw std::invalid_argument("exact_cover_time_rw: start out of range");
  if (m == 1) return 0.0;
  const std::uint32_t full = (1u << m) - 1;
  // remaining[mask * m + v]: expected steps to cover from v with `mask` seen.
  std::vector<double> remaining(static_cast<std::size_t>(full + 1) * m, 0.0);
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 1; mask < full; ++mask)
    if (mask & (1u << start)) masks.push_back(mask);
  std::ranges::sort(masks, [](std::uint32_t a, std::uint32_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa > pb : a < b;
  });

  for (const std::uint32_t mask : masks) {
    std::vector<NodeId> members;
    std::vector<int> pos(m, -1);
    for (NodeId v = 0; v < m; ++v)
      if (mask & (1u << v)) {
        pos[v] = static_cast<int>(members.size());
        members.push_back(v);
      }
    LinearSystem sys(members.size(), 1e-9);
    for (std::size_t r = 0; r < members.size(); ++r) {
      const NodeId v = members[r];
      const double w = 1.0 / static_cast<double>(g.degree(v));
      sys.at(r, r) += 1.0;
      sys.b[r] = 1.0;
      for (const Arc& arc : g.actions(v)) {
        if (pos[arc.target] >= 0) {
          sys.at(r, static_cast<std::size_t>(pos[arc.target])) -= w;
        } else {
          const std::uint32_t next = mask | (1u << arc.target);
          sys.b[r] += w * remaining[static_cast<std::size_t>(next) * m + arc.target];
        }
      }
    }
    // Scale the tolerance with the magnitude of the right-hand side.
    sys.tolerance = 1e-10 * std::max(1.0, *std::ranges::max_element(sys.b));
    const auto x = sys.solve();
    for (std::size_t r = 0; r < members.size(); ++r)
      remaining[static_cast<std::size_t>(mask) * m + members[r]] = x[r];
  }
  return remaining[(static_cast<std::size_t>(1u << start)) * m + start];
}

std::string_view to_string(FormKind kind) {
  switch (kind) {
    case FormKind::exact: return "exact";
    case FormKind::asymptotic: return "asymptotic";
    case FormKind::upper_bound: return "upper-bound";
  }
  return "unknown";
}

ClosedForm closed_form(const EnvSpec& env, PolicyKind policy) {
  const bool rw = policy == PolicyKind::random_walk;
  const bool nf = policy == PolicyKind::negative_feedback;
  if (!rw && !nf)
    throw std::invalid_argument("closed_form: only rw and nf have closed forms, got " +
                                std::string(to_string(policy)));
  const std::string quantity = std::string(rw ? "rw" : "nf") + "-cover";
  switch (env.kind) {
    case EnvKind::star: {
      const auto n = static_cast<double>(env.param("n"));
      if (rw) return {quantity, FormKind::exact, 2.0 * n * harmonic(env.param("n")) - 1.0};
      return {quantity, FormKind::exact, 2.0 * n - 1.0};
    }
    case EnvKind::path: {
      const auto n = static_cast<double>(env.param("n"));
      return {quantity, rw ? FormKind::exact : FormKind::upper_bound, n * n};
    }
    case EnvKind::circle: {
      const auto n = static_cast<double>(env.param("n"));
      return {quantity, rw ? FormKind::exact : FormKind::upper_bound, 0.5 * (n + 1.0) * n};
    }
    case EnvKind::clique: {
      // sum_{i=1}^{n-1} (n-1)/(n-i): coupon collection of the n-1 other nodes.
      const long long n = env.param("n");
      const double value = static_cast<double>(n - 1) * harmonic(n - 1);
      return {quantity, rw ? FormKind::exact : FormKind::upper_bound, value};
    }
    case EnvKind::btree: {
      const auto b = static_cast<double>(env.param("b"));
      const auto H = static_cast<double>(env.param("H"));
      if (rw) return {quantity, FormKind::asymptotic, 2.0 * H * H * std::pow(b, H + 1.0) * std::log(b) / (b - 1.0)};
      return {quantity, FormKind::upper_bound, 4.0 * H * (b + 1.0) / (b - 1.0) * std::pow(b, H)};
    }
    default:
      throw std::invalid_argument("closed_form: no closed form for environment " +
                                  std::string(to_string(env.kind)));
  }
}

namespace {

double persistent_toy_formula(double a) {
  const double b = 1.0 - a;
  const double c = a + 2.0 * b;
  const double numerator = 2.0 * c / (3.0 * (1.0 - b)) +
                           c * (3.0 * a - 2.0 * a * a / 3.0 + 2.0 * a * b / 3.0 + 2.0 * b + 1.0 / 3.0) /
                               (3.0 * (2.0 - a)) +
                           c;
  const double denominator = 1.0 - 2.0 * a / (3.0 * (1.0 - b)) -
                             (a - a * a / 3.0 + 2.0 * a * b / 3.0 + 2.0 * b * b / 3.0) / (3.0 * (2.0 - a));
  if (!(denominator > 0.0)) throw NumericalError("persistent_toy_T0: non-positive denominator");
  return numerator / denominator;
}

}  // namespace

double persistent_toy_T0(double a) {
  static std::once_flag guard;
  std::call_once(guard, [] {
    if (std::abs(persistent_toy_formula(1.0) - 23.0) > 1e-9)
      throw NumericalError("persistent_toy_T0: transcription check failed at a = 1");
  });
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("persistent_toy_T0: a must be in [0, 1]");
  if (a == 0.0) return kInf;
  return persistent_toy_formula(a);
}

MazeEnumeration enumerate_nf_paths(const Graph& g, NodeId start, NodeId target, std::size_t max_steps) {
  if (start == target) throw std::invalid_argument("enumerate_nf_paths: start equals target");
  MazeEnumeration out;
  out.total_probability = 0;
  out.expected_steps = 0;
  PolicyState state(g);
  std::vector<NodeId> path{start};

  const auto visit = [&](auto&& self, NodeId at, Rational prob) -> void {
    if (at == target) {
      out.paths.push_back({path, prob});
      out.total_probability += prob;
      out.expected_steps += prob * static_cast<std::int64_t>(path.size() - 1);
      return;
    }
    if (path.size() > max_steps) throw std::runtime_error("enumerate_nf_paths: branch exceeds max_steps");
    const auto ties = argmin_set(state, g, at);
    const Rational share = prob / static_cast<std::int64_t>(ties.size());
    for (const ActionId a : ties) {
      state.counts.increment(g, at, a);
      path.push_back(g.successor(at, a));
      self(self, path.back(), share);
      path.pop_back();
      state.counts.decrement(g, at, a);
    }
  };
  visit(visit, start, Rational(1));
  return out;
}

MazeEnumeration enumerate_restricted_maze() {
  const auto maze = make_restricted_toy_maze();
  auto out = enumerate_nf_paths(maze.graph, maze.start, maze.target);
  for (auto& p : out.paths)
    for (auto& v : p.nodes) v = maze.labels[v];
  return out;
}

}  // namespace covertime
