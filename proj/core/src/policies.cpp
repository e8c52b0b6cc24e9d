#include "covertime/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace covertime {

std::uint64_t CountTable::spread(const Graph& g, NodeId i) const {
  const std::size_t first = g.first_arc(i);
  const auto begin = counts_.begin() + static_cast<std::ptrdiff_t>(first);
  const auto [lo, hi] = std::minmax_element(begin, begin + static_cast<std::ptrdiff_t>(g.degree(i)));
  return *hi - *lo;
}

void CountTable::clear() {
  std::ranges::fill(counts_, 0);
  total_ = 0;
}

RepetitionDist RepetitionDist::inverse_z(std::uint32_t z_max) {
  if (z_max == 0) throw std::invalid_argument("inverse_z: z_max must be >= 1");
  RepetitionDist d;
  double norm = 0.0;
  for (std::uint32_t z = 1; z <= z_max; ++z) norm += 1.0 / z;
  for (std::uint32_t z = 1; z <= z_max; ++z) {
    d.support.push_back(z);
    d.probs.push_back(1.0 / z / norm);
  }
  return d;
}

RepetitionDist RepetitionDist::one_or_two(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("one_or_two: a must be in [0, 1]");
  return RepetitionDist{{1, 2}, {a, 1.0 - a}};
}

RepetitionDist RepetitionDist::from_probs(std::vector<double> probs) {
  RepetitionDist d;
  for (std::size_t z = 1; z <= probs.size(); ++z) d.support.push_back(static_cast<std::uint32_t>(z));
  d.probs = std::move(probs);
  d.validate();
  return d;
}

void RepetitionDist::validate() const {
  if (support.empty() || support.size() != probs.size())
    throw std::invalid_argument("repetition distribution: support/probs mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (support[k] == 0) throw std::invalid_argument("repetition distribution: z must be >= 1");
    if (!(probs[k] >= 0.0)) throw std::invalid_argument("repetition distribution: negative probability");
    total += probs[k];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("repetition distribution: probabilities must sum to 1");
}

std::uint32_t RepetitionDist::sample(Rng& rng) const {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return support[k];
  }
  // Rounding left u above the cumulative sum: last support point with mass.
  for (std::size_t k = probs.size(); k-- > 0;)
    if (probs[k] > 0.0) return support[k];
  return support.back();
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::random_walk: return "rw";
    case PolicyKind::negative_feedback: return "nf";
    case PolicyKind::local_negative_feedback: return "local-nf";
    case PolicyKind::temporally_persistent: return "persistent";
  }
  return "unknown";
}

std::string PolicySpec::label() const { return std::string(to_string(kind)); }

void PolicyState::reset() {
  counts.clear();
  pending.reset();
}

PolicyState reset(PolicyState state) {
  state.reset();
  return state;
}

std::vector<ActionId> argmin_set(const PolicyState& state, const Graph& g, NodeId i) {
  const std::size_t d = g.degree(i);
  const std::size_t first = g.first_arc(i);
  const auto& raw = state.counts.raw();
  std::vector<ActionId> out;
  if (raw.empty()) {  // no table yet: every count is zero
    out.resize(d);
    std::iota(out.begin(), out.end(), ActionId{0});
    return out;
  }
  std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t a = 0; a < d; ++a) lo = std::min(lo, raw[first + a]);
  for (std::size_t a = 0; a < d; ++a)
    if (raw[first + a] == lo) out.push_back(static_cast<ActionId>(a));
  return out;
}

namespace {

// Uniform pick among the least-selected actions at i; bumps its count.
ActionId favor_least(PolicyState& state, const Graph& g, NodeId i, Rng& rng) {
  const std::size_t d = g.degree(i);
  const std::size_t first = g.first_arc(i);
  auto& raw = state.counts.raw();
  std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
  std::size_t ties = 0;
  for (std::size_t a = 0; a < d; ++a) {
    const auto c = raw[first + a];
    if (c < lo) {
      lo = c;
      ties = 1;
    } else if (c == lo) {
      ++ties;
    }
  }
  auto pick = rng.uniform_index(ties);
  ActionId chosen = 0;
  for (std::size_t a = 0; a < d; ++a) {
    if (raw[first + a] == lo && pick-- == 0) {
      chosen = static_cast<ActionId>(a);
      break;
    }
  }
  state.counts.increment(g, i, chosen);
  return chosen;
}

}  // namespace

std::optional<ActionId> next_action(const PolicySpec& spec, PolicyState& state, const Graph& g, NodeId i,
                                    Rng& rng) {
  switch (spec.kind) {
    case PolicyKind::random_walk:
      return static_cast<ActionId>(rng.uniform_index(g.degree(i)));
    case PolicyKind::negative_feedback:
      return favor_least(state, g, i, rng);
    case PolicyKind::local_negative_feedback:
      if (i == spec.anchor) return favor_least(state, g, i, rng);
      return static_cast<ActionId>(rng.uniform_index(g.degree(i)));
    case PolicyKind::temporally_persistent: {
      if (state.pending && state.pending->remaining > 0) {
        const int direction = state.pending->direction;
        if (--state.pending->remaining == 0) state.pending.reset();
        return g.action_with_direction(i, direction);
      }
      const auto a = static_cast<ActionId>(rng.uniform_index(g.degree(i)));
      const std::uint32_t z = spec.dist.sample(rng);
      if (z > 1) state.pending = PolicyState::Pending{g.actions(i)[a].direction, z - 1};
      else state.pending.reset();
      return a;
    }
  }
  return std::nullopt;
}

}  // namespace covertime
