#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covertime/environments.hpp"
#include "covertime/graph.hpp"
#include "covertime/policies.hpp"
#include "covertime/rng.hpp"

namespace covertime {

inline constexpr std::uint64_t kDefaultStepCap = 10'000'000;

struct RunOptions {
  std::uint64_t step_cap = kDefaultStepCap;
  bool record_trajectory = false;
  /// Track the favor-least spread invariant after every step (counting
  /// policies only).
  bool check_spread = false;
};

/// Outcome of one walk.
struct WalkRecord {
  NodeId start = 0;
  std::uint64_t steps = 0;
  std::optional<std::uint64_t> t_cover;
  std::optional<std::uint64_t> t_hit;
  bool cap_hit = false;
  /// Visits per node up to the stopping step; X_0 counts for the start.
  std::vector<std::uint64_t> visits;
  std::vector<NodeId> trajectory;
  /// False if some step left max_a N(i,a) - min_a N(i,a) > 1 at some node.
  bool spread_ok = true;
};

/// Walks until every node has been visited or the cap is reached.
/// T_C is the index of the first step at which all nodes have been seen.
WalkRecord run_cover(const Graph& g, const PolicySpec& spec, NodeId start, Rng& rng,
                     const RunOptions& options = {});

/// Walks until `target` is first entered (n >= 1) or the cap is reached.
/// Throws std::invalid_argument when target == start.
WalkRecord run_hitting(const Graph& g, const PolicySpec& spec, NodeId start, NodeId target, Rng& rng,
                       const RunOptions& options = {});

/// N_j for every node: index of the excursion away from `start` during which
/// j is first entered. Absent for `start` and for unreached nodes.
/// Throws std::invalid_argument if the record carries no trajectory.
std::vector<std::optional<std::uint64_t>> count_excursions(const WalkRecord& record, NodeId start);

struct McStats {
  std::uint64_t n_runs = 0;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  std::uint64_t seed_base = 0;
  std::uint64_t cap_hits = 0;
};

/// Mean / unbiased variance / standard error over finite samples.
McStats summarize(const std::vector<double>& samples, std::uint64_t seed_base, std::uint64_t cap_hits);

/// z-score of mean(a) - mean(b) under independence.
double z_score(const McStats& a, const McStats& b);

enum class SimMode { cover, hitting };

struct SimConfig {
  Environment env;
  PolicySpec policy;
  SimMode mode = SimMode::cover;
  std::uint64_t n_runs = 1;
  std::uint64_t seed_base = 0;
  /// 0 selects default_step_cap(env.graph).
  std::uint64_t step_cap = 0;
  bool record_trajectory = false;
  bool bound_checks = false;
  unsigned workers = 1;
  /// Keep each run's WalkRecord (visits, trajectory) in the result.
  bool keep_records = false;
};

struct BoundResult {
  std::string name;
  bool applicable = true;
  bool passed = true;
  double observed = 0.0;
  double bound = 0.0;
  std::string reason;
};

struct RunSummary {
  std::uint64_t run_id = 0;
  NodeId start = 0;
  std::optional<std::uint64_t> t_cover;
  std::optional<std::uint64_t> t_hit;
  bool cap_hit = false;
  bool bounds_ok = true;
  std::vector<BoundResult> failed_bounds;
};

struct McResult {
  McStats stats;
  std::vector<RunSummary> runs;
  std::vector<WalkRecord> records;
};

/// Saturating 1 + (m-1) * d_max^diameter; nullopt when it overflows 64 bits.
std::optional<std::uint64_t> general_cover_bound(const Graph& g);

/// max(10^7, 2G) when G is representable, else 10^7.
std::uint64_t default_step_cap(const Graph& g);

/// Seeded replications. Run r uses Rng(derive_seed(seed_base, r)); the
/// result is identical for any worker count.
McResult monte_carlo(const SimConfig& config);

/// Worst-case checks for a negative-feedback cover record: the general
/// bound (all graphs), per-node visits and total time (btree), and returns
/// to node 0 before reaching n (path, needs a trajectory). Inapplicable
/// checks come back with applicable = false and a reason.
std::vector<BoundResult> check_bounds(const WalkRecord& record, const Graph& g, const EnvSpec& env);

}  // namespace covertime
