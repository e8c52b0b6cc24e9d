#include "covertime/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace covertime {

namespace {

enum class StopRule { cover, hit };

WalkRecord walk(const Graph& g, const PolicySpec& spec, NodeId start, std::optional<NodeId> target, Rng& rng,
                const RunOptions& options, PolicyState& state) {
  const std::size_t m = g.node_count();
  if (start >= m) throw std::invalid_argument("start node out of range");
  if (spec.kind == PolicyKind::local_negative_feedback && spec.anchor >= m)
    throw std::invalid_argument("local negative feedback anchor out of range");
  if (options.step_cap == 0) throw std::invalid_argument("step_cap must be positive");
  if (spec.uses_counts() && state.counts.raw().size() != g.arc_count()) state.counts = CountTable(g);

  const StopRule rule = target ? StopRule::hit : StopRule::cover;
  WalkRecord rec;
  rec.start = start;
  rec.visits.assign(m, 0);
  rec.visits[start] = 1;
  if (options.record_trajectory) rec.trajectory.push_back(start);

  std::size_t unseen = m - 1;
  if (rule == StopRule::cover && unseen == 0) {
    rec.t_cover = 0;
    return rec;
  }
  const bool track_spread = options.check_spread && spec.uses_counts();

  NodeId at = start;
  while (rec.steps < options.step_cap) {
    const auto action = next_action(spec, state, g, at, rng);
    if (action) {
      if (track_spread && g.degree(at) >= 2 && state.counts.spread(g, at) > 1) rec.spread_ok = false;
      at = g.successor(at, *action);
    }
    ++rec.steps;
    if (rec.visits[at]++ == 0) --unseen;
    if (options.record_trajectory) rec.trajectory.push_back(at);

    if (rule == StopRule::cover) {
      if (unseen == 0) {
        rec.t_cover = rec.steps;
        return rec;
      }
    } else if (at == *target) {
      rec.t_hit = rec.steps;
      return rec;
    }
  }
  rec.cap_hit = true;
  return rec;
}

double to_double_saturating(std::uint64_t x) { return static_cast<double>(x); }

}  // namespace

WalkRecord run_cover(const Graph& g, const PolicySpec& spec, NodeId start, Rng& rng, const RunOptions& options) {
  PolicyState state(g);
  return walk(g, spec, start, std::nullopt, rng, options, state);
}

WalkRecord run_hitting(const Graph& g, const PolicySpec& spec, NodeId start, NodeId target, Rng& rng,
                       const RunOptions& options) {
  if (target == start) throw std::invalid_argument("run_hitting: target must differ from start");
  if (target >= g.node_count()) throw std::invalid_argument("run_hitting: target out of range");
  PolicyState state(g);
  return walk(g, spec, start, target, rng, options, state);
}

std::vector<std::optional<std::uint64_t>> count_excursions(const WalkRecord& record, NodeId start) {
  if (record.trajectory.empty())
    throw std::invalid_argument("count_excursions: record has no trajectory");
  std::vector<std::optional<std::uint64_t>> n(record.visits.size());
  std::uint64_t excursion = 1;
  for (std::size_t t = 1; t < record.trajectory.size(); ++t) {
    const NodeId v = record.trajectory[t];
    if (v == start) {
      ++excursion;
    } else if (!n[v]) {
      n[v] = excursion;
    }
  }
  return n;
}

McStats summarize(const std::vector<double>& samples, std::uint64_t seed_base, std::uint64_t cap_hits) {
  McStats s;
  s.seed_base = seed_base;
  s.cap_hits = cap_hits;
  s.n_runs = samples.size();
  if (samples.empty()) return s;
  // Welford keeps the variance stable for long runs.
  double mean = 0.0, m2 = 0.0;
  std::uint64_t k = 0;
  for (double x : samples) {
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  s.mean = mean;
  s.variance = k > 1 ? m2 / static_cast<double>(k - 1) : 0.0;
  s.std_error = std::sqrt(s.variance / static_cast<double>(k));
  return s;
}

double z_score(const McStats& a, const McStats& b) {
  const double diff = a.mean - b.mean;
  const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  if (se == 0.0) {
    if (diff == 0.0) return 0.0;
    return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  }
  return diff / se;
}

std::optional<std::uint64_t> general_cover_bound(const Graph& g) {
  const std::uint64_t m = g.node_count();
  if (m <= 1) return 1;
  const std::uint64_t d = g.max_degree();
  const std::size_t diam = eccentricity_max(g);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t power = 1;
  for (std::size_t k = 0; k < diam; ++k) {
    if (power > kMax / d) return std::nullopt;
    power *= d;
  }
  if (power > (kMax - 1) / (m - 1)) return std::nullopt;
  return 1 + (m - 1) * power;
}

std::uint64_t default_step_cap(const Graph& g) {
  const auto bound = general_cover_bound(g);
  if (bound && *bound <= std::numeric_limits<std::uint64_t>::max() / 2)
    return std::max<std::uint64_t>(kDefaultStepCap, 2 * *bound);
  return kDefaultStepCap;
}

namespace {

BoundResult named_bound(std::string name) {
  BoundResult r;
  r.name = std::move(name);
  return r;
}

}  // namespace

std::vector<BoundResult> check_bounds(const WalkRecord& record, const Graph& g, const EnvSpec& env) {
  std::vector<BoundResult> out;

  auto spread = named_bound("favor-least-spread");
  spread.observed = record.spread_ok ? 1.0 : 0.0;
  spread.bound = 1.0;
  spread.passed = record.spread_ok;
  out.push_back(spread);

  auto general = named_bound("general");
  if (!record.t_cover) {
    general.applicable = false;
    general.reason = "run did not cover the graph";
  } else if (const auto G = general_cover_bound(g)) {
    general.observed = to_double_saturating(*record.t_cover);
    general.bound = to_double_saturating(*G);
    general.passed = *record.t_cover <= *G;
  } else {
    general.applicable = false;
    general.reason = "1 + (m-1) d_max^diam overflows 64 bits";
  }
  out.push_back(general);

  if (env.kind == EnvKind::btree) {
    const double b = static_cast<double>(env.param("b"));
    const double H = static_cast<double>(env.param("H"));
    auto visits = named_bound("btree-node-visits");
    auto total = named_bound("btree-cover");
    if (record.start != 0) {
      visits.applicable = total.applicable = false;
      visits.reason = total.reason = "start is not the root";
    } else if (!record.t_cover) {
      visits.applicable = total.applicable = false;
      visits.reason = total.reason = "run did not cover the graph";
    } else {
      visits.observed = static_cast<double>(*std::ranges::max_element(record.visits));
      visits.bound = 2.0 * (b + 1.0) * H;
      visits.passed = visits.observed <= visits.bound;
      total.observed = static_cast<double>(*record.t_cover);
      total.bound = 4.0 * H * (b + 1.0) / (b - 1.0) * std::pow(b, H);
      total.passed = total.observed <= total.bound;
    }
    out.push_back(visits);
    out.push_back(total);
  }

  if (env.kind == EnvKind::path) {
    const auto n = static_cast<NodeId>(env.param("n"));
    auto returns = named_bound("path-returns-to-0");
    if (record.start != 0) {
      returns.applicable = false;
      returns.reason = "start is not node 0";
    } else if (record.trajectory.empty()) {
      returns.applicable = false;
      returns.reason = "trajectory not recorded";
    } else {
      std::uint64_t count = 0;
      bool reached = false;
      for (std::size_t t = 1; t < record.trajectory.size(); ++t) {
        if (record.trajectory[t] == n) {
          reached = true;
          break;
        }
        if (record.trajectory[t] == 0) ++count;
      }
      if (!reached) {
        returns.applicable = false;
        returns.reason = "node n never reached";
      } else {
        returns.observed = static_cast<double>(count);
        returns.bound = static_cast<double>(n - 1);
        returns.passed = count <= n - 1;
      }
    }
    out.push_back(returns);
  }
  return out;
}

McResult monte_carlo(const SimConfig& config) {
  if (config.n_runs == 0) throw std::invalid_argument("monte_carlo: n_runs must be >= 1");
  const Graph& g = config.env.graph;
  std::optional<NodeId> target;
  if (config.mode == SimMode::hitting) {
    if (!config.env.spec.target) throw std::invalid_argument("monte_carlo: hitting mode needs a target");
    target = config.env.spec.target;
  }
  if (config.policy.kind == PolicyKind::temporally_persistent) config.policy.dist.validate();

  RunOptions options;
  options.step_cap = config.step_cap ? config.step_cap : default_step_cap(g);
  const bool bounds = config.bound_checks && config.mode == SimMode::cover &&
                      config.policy.kind == PolicyKind::negative_feedback;
  options.record_trajectory = config.record_trajectory || (bounds && config.env.spec.kind == EnvKind::path);
  options.check_spread = bounds;

  McResult result;
  result.runs.resize(config.n_runs);
  if (config.keep_records) result.records.resize(config.n_runs);

  const unsigned workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(
                                                                               std::min<std::uint64_t>(config.n_runs, 1024))));
  std::vector<std::exception_ptr> errors(workers);
  const auto work = [&](unsigned w) {
    try {
      PolicyState state(g);
      for (std::uint64_t r = w; r < config.n_runs; r += workers) {
        Rng rng(derive_seed(config.seed_base, r));
        const NodeId start = config.env.choose_start(rng);
        state.reset();
        // With a uniform start equal to the target this measures the first return.
        WalkRecord rec = walk(g, config.policy, start, target, rng, options, state);
        RunSummary& s = result.runs[r];
        s.run_id = r;
        s.start = start;
        s.t_cover = rec.t_cover;
        s.t_hit = rec.t_hit;
        s.cap_hit = rec.cap_hit;
        if (bounds) {
          for (auto& br : check_bounds(rec, g, config.env.spec)) {
            if (br.applicable && !br.passed) {
              s.bounds_ok = false;
              s.failed_bounds.push_back(std::move(br));
            }
          }
        }
        if (config.keep_records) result.records[r] = std::move(rec);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> samples;
  samples.reserve(config.n_runs);
  std::uint64_t caps = 0;
  for (const auto& s : result.runs) {
    if (s.cap_hit) {
      ++caps;
      continue;
    }
    const auto v = config.mode == SimMode::cover ? s.t_cover : s.t_hit;
    samples.push_back(static_cast<double>(*v));
  }
  result.stats = summarize(samples, config.seed_base, caps);
  return result;
}

}  // namespace covertime
