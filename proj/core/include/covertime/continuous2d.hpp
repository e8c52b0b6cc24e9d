#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "covertime/rng.hpp"
#include "covertime/simulator.hpp"

namespace covertime::continuous {

/// A point of [0, D]^2.
struct State {
  double x = 0.0;
  double y = 0.0;
};

enum class Direction : std::uint8_t { plus_x, minus_x, plus_y, minus_y };
inline constexpr std::array<Direction, 4> kDirections{Direction::plus_x, Direction::minus_x, Direction::plus_y,
                                                      Direction::minus_y};

/// Indicator box kernel: 1 iff |dx| <= delta and |dy| <= delta.
struct KernelSpec {
  double delta = 0.0;
  double operator()(const State& a, const State& b) const;
};

/// (state, action) pairs for steps 1..n-1, append-only within a run.
class History {
 public:
  void append(const State& s, Direction a) { entries_.push_back({s, a}); }
  std::size_t size() const noexcept { return entries_.size(); }
  void clear() { entries_.clear(); }

  struct Entry {
    State state;
    Direction action;
  };
  const std::vector<Entry>& entries() const noexcept { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// sum over history of kernel(s_t, s) * 1{a_t = a}, by linear scan.
double n_approx(const History& hist, const KernelSpec& kernel, const State& s, Direction a);

/// Output-equivalent index for n_approx: history bucketed on a grid with
/// cells slightly wider than delta, so a query only visits 3x3 buckets.
class BucketedHistory {
 public:
  BucketedHistory(double side, KernelSpec kernel);

  void append(const State& s, Direction a);
  void clear();
  std::size_t size() const noexcept { return size_; }
  /// n_approx for all four directions at once.
  std::array<double, 4> counts(const State& s) const;

 private:
  std::size_t bucket(double coord) const;

  KernelSpec kernel_;
  double width_ = 0.0;
  std::size_t per_side_ = 1;
  std::size_t size_ = 0;
  bool linear_ = false;
  std::vector<std::vector<History::Entry>> buckets_;
};

enum class Motion { brownian, levy };
enum class ContinuousPolicy { uniform, approx_nf };

std::string_view to_string(Motion m);
std::string_view to_string(ContinuousPolicy p);

/// Brownian: |N(0,1)|. Levy: Pareto(shape 2, scale 1).
double step_length(Motion motion, Rng& rng);

/// Moves along `dir` by a motion-model length and clips to [0, side].
State step(Motion motion, Direction dir, const State& s, double side, Rng& rng);

/// Cell (col, row) of s for an M x M partition of [0, side]^2; the far
/// boundary belongs to cell M-1.
std::pair<std::size_t, std::size_t> cell_of(const State& s, double side, std::size_t cells);

struct ContinuousConfig {
  double side = 5.0;          // D
  std::size_t cells = 10;     // M
  ContinuousPolicy policy = ContinuousPolicy::uniform;
  Motion motion = Motion::brownian;
  /// Kernel half-width; unset selects the cell width D/M. Zero is the
  /// degenerate kernel that only matches exact revisits.
  std::optional<double> delta;
  std::uint64_t step_cap = 10'000'000;

  double kernel_delta() const { return delta ? *delta : side / static_cast<double>(cells); }
};

struct ContinuousRecord {
  std::uint64_t steps = 0;
  std::optional<std::uint64_t> t_cover;
  bool cap_hit = false;
  State start;
  std::array<std::uint64_t, 4> direction_counts{};
};

/// Starts uniformly in the square and walks until all M^2 cells are seen.
ContinuousRecord run_cover_continuous(const ContinuousConfig& config, Rng& rng);

struct ContinuousMcResult {
  McStats stats;
  std::vector<ContinuousRecord> runs;
};

/// Seeded replications; run r uses Rng(derive_seed(seed_base, r)).
ContinuousMcResult monte_carlo_continuous(const ContinuousConfig& config, std::uint64_t n_runs,
                                          std::uint64_t seed_base, unsigned workers = 1);

}  // namespace covertime::continuous
