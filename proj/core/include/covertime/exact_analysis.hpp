#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "covertime/environments.hpp"
#include "covertime/graph.hpp"
#include "covertime/policies.hpp"

namespace covertime {

/// Raised when a solve misses its residual tolerance or a formula leaves
/// its domain.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense square system A x = b, row-major.
struct LinearSystem {
  std::size_t n = 0;
  std::vector<double> a;
  std::vector<double> b;
  double tolerance = 1e-10;

  explicit LinearSystem(std::size_t size, double tol = 1e-10)
      : n(size), a(size * size, 0.0), b(size, 0.0), tolerance(tol) {}

  double& at(std::size_t row, std::size_t col) { return a[row * n + col]; }
  double at(std::size_t row, std::size_t col) const { return a[row * n + col]; }

  /// LU with partial pivoting plus one refinement step. Throws
  /// NumericalError if the max-norm residual exceeds `tolerance`.
  std::vector<double> solve() const;
};

/// Max-norm residual ||b - A x||_inf.
double residual(const LinearSystem& sys, std::span<const double> x);

/// E[T_target | X_0 = i] for the random walk, every i; entry `target` is 0.
/// Throws NumericalError if the residual exceeds `tolerance`.
std::vector<double> hitting_times_rw(const Graph& g, NodeId target, double tolerance = 1e-10);

/// For each action a_k at i: probability that the random walk started at
/// the successor of a_k enters j before returning to i. Requires i != j.
std::vector<double> hitting_prob_before_return(const Graph& g, NodeId i, NodeId j);

/// K / sum(p). +infinity when sum(p) == 0.
double expected_excursions_rw(std::span<const double> p);

/// Local negative feedback at the start node:
///   (1 + sum_{k=1}^{K-1} S_k) / (1 - prod_j x_j),  x_j = 1 - p_j,
/// with S_k the normalised elementary symmetric means of x.
/// +infinity when every p is 0.
double expected_excursions_local_nf(std::span<const double> p);

struct LocalImprovement {
  double e_rw = 0.0;
  double e_loc = 0.0;
  bool holds = false;
  /// Both expectations infinite; `holds` is then true vacuously.
  bool vacuous = false;
  std::vector<double> p;
};

LocalImprovement local_improvement_check(const Graph& g, NodeId i, NodeId j);

struct SymmetricMeans {
  std::vector<double> x;
  /// s[k-1] = e_k(x) / C(K, k), k = 1..K.
  std::vector<double> s;

  /// S_1 >= S_2^{1/2} >= ... >= S_K^{1/K}, up to `tol`.
  bool maclaurin_chain_holds(double tol = 1e-12) const;
};

/// e_0..e_K of x by the prefix recurrence e_k <- e_k + x_t e_{k-1}.
std::vector<double> elementary_symmetric(std::span<const double> x);

SymmetricMeans symmetric_means(std::span<const double> x);

double harmonic(std::uint64_t k);

struct MatthewsBounds {
  double mu_minus = 0.0;
  double mu_plus = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// mu-/mu+ over ordered pairs i != j of random-walk hitting times, times
/// H_{m-1}.
MatthewsBounds matthews_bounds(const Graph& g);

/// Exact random-walk cover time from `start` by dynamic programming over
/// visited sets. Limited to m <= 16.
double exact_cover_time_rw(const Graph& g, NodeId start);

enum class FormKind { exact, asymptotic, upper_bound };

std::string_view to_string(FormKind kind);

struct ClosedForm {
  std::string quantity;
  FormKind kind = FormKind::exact;
  double value = 0.0;
};

/// Closed-form cover time (or bound) for star, path, circle, clique and
/// btree under rw or nf. Throws std::invalid_argument otherwise.
ClosedForm closed_form(const EnvSpec& env, PolicyKind policy);

/// Expected steps from Start to End in the toy maze for the persistent
/// policy with p(1) = a, p(2) = 1 - a. +infinity at a = 0.
double persistent_toy_T0(double a);

using Rational = boost::rational<std::int64_t>;

struct MazePath {
  std::vector<NodeId> nodes;
  Rational probability;
  std::size_t steps() const { return nodes.size() - 1; }
};

struct MazeEnumeration {
  std::vector<MazePath> paths;
  Rational total_probability;
  Rational expected_steps;
};

/// Every negative-feedback trajectory from `start` until `target`, with its
/// exact probability, branching on every tie. Throws if a branch exceeds
/// `max_steps`.
MazeEnumeration enumerate_nf_paths(const Graph& g, NodeId start, NodeId target,
                                   std::size_t max_steps = 64);

/// enumerate_nf_paths on the restricted toy maze, node labels mapped back to
/// the maze's state numbers.
MazeEnumeration enumerate_restricted_maze();

}  // namespace covertime
