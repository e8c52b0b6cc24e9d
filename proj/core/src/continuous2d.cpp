#include "covertime/continuous2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace covertime::continuous {

namespace {

constexpr std::size_t kMaxBucketsPerSide = 2048;

std::size_t index_of(Direction d) { return static_cast<std::size_t>(d); }

}  // namespace

double KernelSpec::operator()(const State& a, const State& b) const {
  return (std::abs(a.x - b.x) <= delta && std::abs(a.y - b.y) <= delta) ? 1.0 : 0.0;
}

double n_approx(const History& hist, const KernelSpec& kernel, const State& s, Direction a) {
  double total = 0.0;
  for (const auto& e : hist.entries())
    if (e.action == a) total += kernel(e.state, s);
  return total;
}

BucketedHistory::BucketedHistory(double side, KernelSpec kernel) : kernel_(kernel) {
  if (!(side > 0.0)) throw std::invalid_argument("BucketedHistory: side must be positive");
  if (!(kernel.delta > 0.0) || side / kernel.delta > static_cast<double>(kMaxBucketsPerSide)) {
    linear_ = true;
    buckets_.resize(1);
    return;
  }
  width_ = kernel.delta * (1.0 + 1e-9);
  per_side_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(side / width_)));
  buckets_.resize(per_side_ * per_side_);
}

std::size_t BucketedHistory::bucket(double coord) const {
  const double scaled = std::floor(coord / width_);
  if (scaled <= 0.0) return 0;
  return std::min(per_side_ - 1, static_cast<std::size_t>(scaled));
}

void BucketedHistory::append(const State& s, Direction a) {
  ++size_;
  if (linear_) {
    buckets_[0].push_back({s, a});
    return;
  }
  buckets_[bucket(s.y) * per_side_ + bucket(s.x)].push_back({s, a});
}

void BucketedHistory::clear() {
  for (auto& b : buckets_) b.clear();
  size_ = 0;
}

std::array<double, 4> BucketedHistory::counts(const State& s) const {
  std::array<double, 4> out{};
  const auto scan = [&](const std::vector<History::Entry>& entries) {
    for (const auto& e : entries) out[index_of(e.action)] += kernel_(e.state, s);
  };
  if (linear_) {
    scan(buckets_[0]);
    return out;
  }
  const std::size_t bx = bucket(s.x), by = bucket(s.y);
  const std::size_t x0 = bx > 0 ? bx - 1 : 0, x1 = std::min(per_side_ - 1, bx + 1);
  const std::size_t y0 = by > 0 ? by - 1 : 0, y1 = std::min(per_side_ - 1, by + 1);
  for (std::size_t y = y0; y <= y1; ++y)
    for (std::size_t x = x0; x <= x1; ++x) scan(buckets_[y * per_side_ + x]);
  return out;
}

std::string_view to_string(Motion m) { return m == Motion::brownian ? "brownian" : "levy"; }

std::string_view to_string(ContinuousPolicy p) {
  return p == ContinuousPolicy::uniform ? "uniform" : "approx-nf";
}

double step_length(Motion motion, Rng& rng) {
  if (motion == Motion::brownian) return std::abs(rng.standard_normal());
  return rng.pareto(2.0, 1.0);
}

State step(Motion motion, Direction dir, const State& s, double side, Rng& rng) {
  const double len = step_length(motion, rng);
  State next = s;
  switch (dir) {
    case Direction::plus_x: next.x += len; break;
    case Direction::minus_x: next.x -= len; break;
    case Direction::plus_y: next.y += len; break;
    case Direction::minus_y: next.y -= len; break;
  }
  next.x = std::clamp(next.x, 0.0, side);
  next.y = std::clamp(next.y, 0.0, side);
  return next;
}

std::pair<std::size_t, std::size_t> cell_of(const State& s, double side, std::size_t cells) {
  const double width = side / static_cast<double>(cells);
  const auto index = [&](double v) {
    const double f = std::floor(v / width);
    if (f <= 0.0) return std::size_t{0};
    return std::min(cells - 1, static_cast<std::size_t>(f));
  };
  return {index(s.x), index(s.y)};
}

ContinuousRecord run_cover_continuous(const ContinuousConfig& config, Rng& rng) {
  if (!(config.side > 0.0)) throw std::invalid_argument("run_cover_continuous: D must be positive");
  if (config.cells == 0) throw std::invalid_argument("run_cover_continuous: M must be >= 1");
  if (config.step_cap == 0) throw std::invalid_argument("run_cover_continuous: step_cap must be positive");

  ContinuousRecord rec;
  State s{config.side * rng.uniform01(), config.side * rng.uniform01()};
  rec.start = s;

  const std::size_t M = config.cells;
  std::vector<char> seen(M * M, 0);
  std::size_t unseen = M * M;
  const auto mark = [&](const State& p) {
    const auto [cx, cy] = cell_of(p, config.side, M);
    if (!seen[cy * M + cx]) {
      seen[cy * M + cx] = 1;
      --unseen;
    }
  };
  mark(s);
  if (unseen == 0) {
    rec.t_cover = 0;
    return rec;
  }

  const bool approx = config.policy == ContinuousPolicy::approx_nf;
  BucketedHistory history(config.side, KernelSpec{approx ? config.kernel_delta() : 1.0});

  while (rec.steps < config.step_cap) {
    Direction d = Direction::plus_x;
    if (approx) {
      const auto c = history.counts(s);
      const double lo = *std::ranges::min_element(c);
      std::size_t ties = 0;
      for (double v : c) ties += v == lo ? 1 : 0;
      auto pick = rng.uniform_index(ties);
      for (std::size_t k = 0; k < 4; ++k) {
        if (c[k] == lo && pick-- == 0) {
          d = kDirections[k];
          break;
        }
      }
      history.append(s, d);
    } else {
      d = kDirections[rng.uniform_index(4)];
    }
    ++rec.direction_counts[index_of(d)];
    s = step(config.motion, d, s, config.side, rng);
    ++rec.steps;
    mark(s);
    if (unseen == 0) {
      rec.t_cover = rec.steps;
      return rec;
    }
  }
  rec.cap_hit = true;
  return rec;
}

ContinuousMcResult monte_carlo_continuous(const ContinuousConfig& config, std::uint64_t n_runs,
                                          std::uint64_t seed_base, unsigned workers) {
  if (n_runs == 0) throw std::invalid_argument("monte_carlo_continuous: n_runs must be >= 1");
  ContinuousMcResult result;
  result.runs.resize(n_runs);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(n_runs, 1024))));
  std::vector<std::exception_ptr> errors(workers);
  const auto work = [&](unsigned w) {
    try {
      for (std::uint64_t r = w; r < n_runs; r += workers) {
        Rng rng(derive_seed(seed_base, r));
        result.runs[r] = run_cover_continuous(config, rng);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> samples;
  std::uint64_t caps = 0;
  for (const auto& r : result.runs) {
    if (r.cap_hit)
      ++caps;
    else
      samples.push_back(static_cast<double>(*r.t_cover));
  }
  result.stats = summarize(samples, seed_base, caps);
  return result;
}

}  // namespace covertime::continuous
