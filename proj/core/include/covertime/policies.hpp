#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covertime/graph.hpp"
#include "covertime/rng.hpp"

namespace covertime {

/// Per-(node, action) selection counters N_ij, laid out along the graph's
/// flat arc order.
class CountTable {
 public:
  CountTable() = default;
  explicit CountTable(const Graph& g) : counts_(g.arc_count(), 0) {}

  std::uint64_t get(const Graph& g, NodeId i, ActionId a) const { return counts_[g.arc_index(i, a)]; }
  void increment(const Graph& g, NodeId i, ActionId a) {
    ++counts_[g.arc_index(i, a)];
    ++total_;
  }
  /// Undo one increment (used by exhaustive enumeration when backtracking).
  void decrement(const Graph& g, NodeId i, ActionId a) {
    --counts_[g.arc_index(i, a)];
    --total_;
  }
  std::uint64_t total() const noexcept { return total_; }
  /// max_a N(i,a) - min_a N(i,a).
  std::uint64_t spread(const Graph& g, NodeId i) const;
  void clear();

  const std::vector<std::uint64_t>& raw() const noexcept { return counts_; }
  std::vector<std::uint64_t>& raw() noexcept { return counts_; }

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Distribution of the repetition count z for the persistent policy.
struct RepetitionDist {
  std::vector<std::uint32_t> support;
  std::vector<double> probs;

  /// p(z) proportional to 1/z on {1..z_max}.
  static RepetitionDist inverse_z(std::uint32_t z_max);
  /// p(1) = a, p(2) = 1 - a.
  static RepetitionDist one_or_two(double a);
  /// p(z) = probs[z-1]; must sum to 1 within 1e-12.
  static RepetitionDist from_probs(std::vector<double> probs);

  /// Throws std::invalid_argument on a malformed distribution.
  void validate() const;
  std::uint32_t sample(Rng& rng) const;
};

enum class PolicyKind { random_walk, negative_feedback, local_negative_feedback, temporally_persistent };

std::string_view to_string(PolicyKind kind);

struct PolicySpec {
  PolicyKind kind = PolicyKind::random_walk;
  NodeId anchor = 0;
  RepetitionDist dist;

  static PolicySpec random_walk() { return {}; }
  static PolicySpec negative_feedback() { return {PolicyKind::negative_feedback, 0, {}}; }
  static PolicySpec local_negative_feedback(NodeId anchor) {
    return {PolicyKind::local_negative_feedback, anchor, {}};
  }
  static PolicySpec persistent(RepetitionDist dist) {
    return {PolicyKind::temporally_persistent, 0, std::move(dist)};
  }

  /// Short label used in CSV output: rw, nf, local-nf, persistent.
  std::string label() const;
  bool uses_counts() const noexcept {
    return kind == PolicyKind::negative_feedback || kind == PolicyKind::local_negative_feedback;
  }
};

/// Mutable per-run policy memory.
struct PolicyState {
  struct Pending {
    int direction = 0;
    std::uint32_t remaining = 0;
  };

  CountTable counts;
  std::optional<Pending> pending;

  PolicyState() = default;
  explicit PolicyState(const Graph& g) : counts(g) {}

  void reset();
};

/// Actions at i whose count equals the minimum count at i (Smin_i).
std::vector<ActionId> argmin_set(const PolicyState& state, const Graph& g, NodeId i);

/// Picks the next action at i and updates `state`.
///
/// Returns nullopt only for the persistent policy, when the repeated
/// direction has no action at the current node; the walker then stays in
/// place for that step.
std::optional<ActionId> next_action(const PolicySpec& spec, PolicyState& state, const Graph& g, NodeId i,
                                    Rng& rng);

/// Clears counts and any pending repetition.
PolicyState reset(PolicyState state);

}  // namespace covertime
