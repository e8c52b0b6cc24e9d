// Acceptance gate. One PASS/FAIL line per criterion; detail lines are indented.
// Usage: covertime_acceptance [--list] [criterion ...]

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <bit>
#include <functional>
#include <map>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "covertime/covertime.hpp"
#include "random_graphs.hpp"

namespace {

using namespace covertime;

// Pinned tolerances.
constexpr double kExactTol = 1e-9;
constexpr double kZ = 3.0;
constexpr double kMatthewsZ = 4.0;
constexpr double kSymmetricTol = 1e-12;
constexpr double kLocalTol = 1e-9;
constexpr double kHalfNormalTol = 0.02;
constexpr double kTreeBandLow = 0.5;
constexpr double kTreeBandHigh = 2.0;

constexpr std::uint64_t kSeed = 0x5eed0001;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

class Report {
 public:
  void check(bool ok, const std::string& what) {
    std::cout << "    [" << (ok ? "ok" : "FAIL") << "] " << what << "\n";
    all_ok_ = all_ok_ && ok;
  }
  void note(const std::string& what) { std::cout << "    [info] " << what << "\n"; }
  bool ok() const { return all_ok_; }

 private:
  bool all_ok_ = true;
};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

McResult simulate(const Environment& env, const PolicySpec& policy, SimMode mode, std::uint64_t runs,
                  std::uint64_t seed, bool bound_checks = false, bool keep_records = false) {
  SimConfig cfg;
  cfg.env = env;
  cfg.policy = policy;
  cfg.mode = mode;
  cfg.n_runs = runs;
  cfg.seed_base = seed;
  cfg.bound_checks = bound_checks;
  cfg.keep_records = keep_records;
  cfg.workers = workers();
  return monte_carlo(cfg);
}

double harmonic_oracle(int n) {
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  return h;
}

std::string describe(const McStats& s) {
  return fmt("mean %.4f, stderr %.4f, runs %llu, cap hits %llu", s.mean, s.std_error,
             static_cast<unsigned long long>(s.n_runs), static_cast<unsigned long long>(s.cap_hits));
}

void check_within(Report& r, const std::string& label, const McStats& s, double expected, double z_tol) {
  const double z = s.std_error > 0 ? (s.mean - expected) / s.std_error : (s.mean == expected ? 0.0 : INFINITY);
  r.check(s.cap_hits == 0 && std::abs(z) <= z_tol,
          fmt("%s: %s vs %.4f (z = %.2f, |z| <= %.0f)", label.c_str(), describe(s).c_str(), expected, z, z_tol));
}

void check_below(Report& r, const std::string& label, const McStats& lower, const McStats& upper) {
  const double z = z_score(upper, lower);
  r.check(lower.cap_hits == 0 && upper.cap_hits == 0 && lower.mean < upper.mean && z > kZ,
          fmt("%s: %.4f < %.4f with z = %.2f > %.0f", label.c_str(), lower.mean, upper.mean, z, kZ));
}

void check_below_value(Report& r, const std::string& label, const McStats& s, double value) {
  const double z = s.std_error > 0 ? (value - s.mean) / s.std_error : (s.mean < value ? INFINITY : 0.0);
  r.check(s.cap_hits == 0 && s.mean < value && z > kZ,
          fmt("%s: %s < %.4f with z = %.2f > %.0f", label.c_str(), describe(s).c_str(), value, z, kZ));
}

std::size_t count_bound_failures(const McResult& res, std::string* first = nullptr) {
  std::size_t failures = 0;
  for (const auto& run : res.runs) {
    if (run.bounds_ok) continue;
    if (failures++ == 0 && first && !run.failed_bounds.empty()) {
      const auto& b = run.failed_bounds.front();
      *first = fmt("run %llu: %s observed %.0f > bound %.0f", static_cast<unsigned long long>(run.run_id),
                   b.name.c_str(), b.observed, b.bound);
    }
  }
  return failures;
}

// ---------------------------------------------------------------------------

void star(Report& r) {
  const auto env = make_star(10);
  const auto nf = simulate(env, PolicySpec::negative_feedback(), SimMode::cover, 1000, kSeed + 1);
  std::size_t off = 0;
  for (const auto& run : nf.runs) off += (run.t_cover && *run.t_cover == 19) ? 0 : 1;
  r.check(off == 0, fmt("NF star(10): %zu of 1000 runs differ from T_C = 19", off));
  r.check(nf.stats.variance == 0.0 && nf.stats.mean == 19.0, "NF star(10): mean 19, variance 0");

  const double expected = 20.0 * harmonic_oracle(10) - 1.0;
  const auto rw = simulate(env, PolicySpec::random_walk(), SimMode::cover, 40000, kSeed + 2);
  check_within(r, "RW star(10) vs 20 H_10 - 1", rw.stats, expected, kZ);
}

void path(Report& r) {
  const auto env = make_path(10);
  const auto h = hitting_times_rw(env.graph, 10);
  r.check(std::abs(h[0] - 100.0) <= kExactTol, fmt("hitting_times_rw path(10) h[0] = %.12f, expected 100", h[0]));

  const auto nf = simulate(env, PolicySpec::negative_feedback(), SimMode::cover, 40000, kSeed + 3, true);
  check_below_value(r, "NF path(10) cover", nf.stats, 100.0);

  // Returns to node 0 before first reaching n, counted independently from the trajectory.
  SimConfig cfg;
  cfg.env = env;
  cfg.policy = PolicySpec::negative_feedback();
  cfg.n_runs = 40000;
  cfg.seed_base = kSeed + 3;
  cfg.record_trajectory = true;
  cfg.keep_records = true;
  cfg.workers = workers();
  const auto traced = monte_carlo(cfg);
  std::size_t violations = 0;
  std::uint64_t worst = 0;
  for (const auto& rec : traced.records) {
    std::uint64_t returns = 0;
    for (std::size_t t = 1; t < rec.trajectory.size() && rec.trajectory[t] != 10; ++t)
      returns += rec.trajectory[t] == 0 ? 1 : 0;
    worst = std::max(worst, returns);
    violations += returns > 9 ? 1 : 0;
  }
  std::string first;
  const auto flagged = count_bound_failures(nf, &first);
  r.check(violations == 0 && flagged == 0,
          fmt("returns to 0 before n <= n-1 = 9 in all 40000 NF runs (max observed %llu, check_bounds failures %zu)",
              static_cast<unsigned long long>(worst), flagged));

  const auto small = simulate(make_path(2), PolicySpec::negative_feedback(), SimMode::cover, 40000, kSeed + 4);
  check_within(r, "NF path(2) cover vs 3", small.stats, 3.0, kZ);
}

void circle(Report& r) {
  const auto env = make_circle(10);
  const auto rw = simulate(env, PolicySpec::random_walk(), SimMode::cover, 40000, kSeed + 5);
  check_within(r, "RW circle(10) vs 55", rw.stats, 55.0, kZ);
  const auto nf = simulate(env, PolicySpec::negative_feedback(), SimMode::cover, 40000, kSeed + 6);
  check_below_value(r, "NF circle(10)", nf.stats, 55.0);
}

void clique(Report& r) {
  const auto env = make_clique(10);
  const double literal = 1.0 + 9.0 * harmonic_oracle(9);
  const auto form = closed_form(env.spec, PolicyKind::random_walk);
  r.note(fmt("literal 1 + 9 H_9 = %.4f; closed_form(clique, rw) = %.4f", literal, form.value));
  const auto rw = simulate(env, PolicySpec::random_walk(), SimMode::cover, 40000, kSeed + 7);
  check_within(r, "RW clique(10) vs 1 + 9 H_9", rw.stats, literal, kZ);
  const double exact = exact_cover_time_rw(env.graph, 0);
  r.note(fmt("subset-DP exact cover time from node 0 = %.6f", exact));
  const auto nf = simulate(env, PolicySpec::negative_feedback(), SimMode::cover, 40000, kSeed + 8);
  check_below(r, "NF clique(10) below RW", nf.stats, rw.stats);
}

void toy_maze(Report& r) {
  const auto env = make_toy_maze();
  const auto h = hitting_times_rw(env.graph, 6);
  r.check(std::abs(h[0] - 23.0) <= kExactTol, fmt("exact RW hitting 0 -> 6 = %.12f, expected 23", h[0]));

  const auto en = enumerate_restricted_maze();
  Rational expected_probability(0);
  for (const auto& p : en.paths) expected_probability += p.probability;
  r.check(en.paths.size() == 15, fmt("restricted maze: %zu paths, expected 15", en.paths.size()));
  r.check(expected_probability == Rational(1) && en.total_probability == Rational(1),
          fmt("restricted maze: probabilities sum to %lld/%lld", static_cast<long long>(expected_probability.numerator()),
              static_cast<long long>(expected_probability.denominator())));
  r.check(en.expected_steps == Rational(95, 12),
          fmt("restricted maze: expectation %lld/%lld, expected 95/12",
              static_cast<long long>(en.expected_steps.numerator()),
              static_cast<long long>(en.expected_steps.denominator())));

  const auto nf = simulate(env, PolicySpec::negative_feedback(), SimMode::hitting, 40000, kSeed + 9);
  check_below_value(r, "NF toy maze hitting", nf.stats, 23.0);

  r.check(std::abs(persistent_toy_T0(1.0) - 23.0) <= kExactTol,
          fmt("persistent_toy_T0(1) = %.12f, expected 23", persistent_toy_T0(1.0)));
  bool decreasing = true;
  std::string values;
  double prev = persistent_toy_T0(0.0);
  values += fmt("%.4g", prev);
  for (int k = 1; k <= 10; ++k) {
    const double v = persistent_toy_T0(k / 10.0);
    decreasing = decreasing && v < prev;
    values += fmt(" %.4g", v);
    prev = v;
  }
  r.check(decreasing, "persistent_toy_T0 strictly decreasing on a = 0, 0.1, ..., 1: " + values);

  const auto persistent = simulate(env, PolicySpec::persistent(RepetitionDist::one_or_two(0.5)), SimMode::hitting,
                                   40000, kSeed + 10);
  check_within(r, "persistent(a = 0.5) hitting vs T0(0.5)", persistent.stats, persistent_toy_T0(0.5), kZ);
}

// Excursion index of the first visit to j, simulated from i.
McStats excursion_stats(const Graph& g, const PolicySpec& spec, NodeId i, NodeId j, std::uint64_t runs,
                        std::uint64_t seed) {
  std::vector<double> samples;
  samples.reserve(runs);
  std::uint64_t caps = 0;
  RunOptions opts;
  opts.record_trajectory = true;
  for (std::uint64_t k = 0; k < runs; ++k) {
    Rng rng(derive_seed(seed, k));
    const auto rec = run_hitting(g, spec, i, j, rng, opts);
    if (rec.cap_hit) {
      ++caps;
      continue;
    }
    samples.push_back(static_cast<double>(*count_excursions(rec, i)[j]));
  }
  return summarize(samples, seed, caps);
}

void local_improvement(Report& r) {
  std::mt19937_64 gen(kSeed + 11);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  std::vector<Graph> graphs;
  std::size_t pairs = 0, violations = 0, k1_mismatch = 0;
  for (int k = 0; k < 50; ++k) {
    graphs.push_back(oracle::random_connected_graph(gen, size(gen), 0.3));
    const Graph& g = graphs.back();
    for (NodeId i = 0; i < g.node_count(); ++i) {
      for (NodeId j = 0; j < g.node_count(); ++j) {
        if (i == j) continue;
        ++pairs;
        const auto p = hitting_prob_before_return(g, i, j);
        const double e_rw = expected_excursions_rw(p);
        const double e_loc = expected_excursions_local_nf(p);
        if (!(e_loc <= e_rw + kLocalTol)) ++violations;
        if (p.size() == 1 && std::abs(e_loc - e_rw) > kLocalTol) ++k1_mismatch;
      }
    }
  }
  r.check(violations == 0, fmt("local <= rw + 1e-9 on %zu ordered pairs over 50 graphs (%zu violations)", pairs,
                               violations));
  r.check(k1_mismatch == 0, fmt("equality when the start has one action (%zu mismatches)", k1_mismatch));

  // Five triples where the start has at least two actions.
  std::uniform_int_distribution<std::size_t> which(0, graphs.size() - 1);
  int found = 0;
  for (int attempt = 0; found < 5 && attempt < 10000; ++attempt) {
    const Graph& g = graphs[which(gen)];
    std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(g.node_count() - 1));
    const NodeId i = node(gen), j = node(gen);
    if (i == j || g.degree(i) < 2) continue;
    ++found;
    const auto check = local_improvement_check(g, i, j);
    const auto seed = kSeed + 100 + static_cast<std::uint64_t>(found);
    const auto rw = excursion_stats(g, PolicySpec::random_walk(), i, j, 40000, seed);
    const auto loc = excursion_stats(g, PolicySpec::local_negative_feedback(i), i, j, 40000, seed + 50);
    const std::string tag = fmt("triple %d (m = %zu, i = %u, j = %u, K = %zu)", found, g.node_count(), i, j, g.degree(i));
    check_within(r, tag + " rw excursions", rw, check.e_rw, kZ);
    check_within(r, tag + " local-nf excursions", loc, check.e_loc, kZ);
  }
  r.check(found == 5, fmt("sampled %d triples with K >= 2", found));
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int t = 1; t <= k; ++t) c = c * (n - k + t) / t;
  return c;
}

void maclaurin(Report& r) {
  std::mt19937_64 gen(kSeed + 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kSamples = 10000;
  std::size_t chain_failures = 0, oracle_failures = 0, total = 0;
  double worst = 0.0;
  for (int K = 2; K <= 12; ++K) {
    std::vector<double> prod(std::size_t{1} << K);
    for (int sample = 0; sample < kSamples; ++sample) {
      std::vector<double> x(K);
      for (auto& v : x) v = unit(gen);
      const auto sm = symmetric_means(x);
      ++total;
      if (!sm.maclaurin_chain_holds(kSymmetricTol)) ++chain_failures;
      // Independent chain check with pow.
      for (int k = 1; k < K; ++k)
        if (std::pow(sm.s[k - 1], 1.0 / k) + kSymmetricTol < std::pow(sm.s[k], 1.0 / (k + 1))) {
          ++chain_failures;
          break;
        }
      // 2^K subset oracle.
      std::vector<double> e(K + 1, 0.0);
      prod[0] = 1.0;
      e[0] = 1.0;
      for (std::size_t mask = 1; mask < prod.size(); ++mask) {
        const int low = std::countr_zero(mask);
        prod[mask] = prod[mask & (mask - 1)] * x[low];
        e[std::popcount(mask)] += prod[mask];
      }
      bool ok = true;
      for (int k = 1; k <= K; ++k) {
        const double diff = std::abs(sm.s[k - 1] - e[k] / binomial(K, k));
        worst = std::max(worst, diff);
        ok = ok && diff <= kSymmetricTol;
      }
      if (!ok) ++oracle_failures;
    }
  }
  r.check(chain_failures == 0, fmt("Maclaurin chain on %zu random vectors, K = 2..12 (%zu failures)", total,
                                   chain_failures));
  r.check(oracle_failures == 0, fmt("symmetric means vs subset oracle within 1e-12 (worst %.2e)", worst));
}

void matthews(Report& r) {
  struct Case {
    std::string name;
    Graph graph;
  };
  std::vector<Case> cases{{"path(5)", make_path(5).graph},
                          {"circle(6)", make_circle(6).graph},
                          {"clique(6)", make_clique(6).graph},
                          {"barbell(4)", make_barbell(4).graph}};
  std::mt19937_64 gen(kSeed + 13);
  std::uniform_int_distribution<std::size_t> size(3, 12);
  for (int k = 0; k < 10; ++k)
    cases.push_back({fmt("random #%d", k), oracle::random_connected_graph(gen, size(gen), 0.25)});

  std::uint64_t seed = kSeed + 1000;
  for (const auto& c : cases) {
    const auto mb = matthews_bounds(c.graph);
    std::size_t outside = 0, exact_outside = 0;
    double worst_low = INFINITY, worst_high = INFINITY;
    for (NodeId s = 0; s < c.graph.node_count(); ++s) {
      Environment env{c.graph, {}};
      env.spec.start = s;
      const auto rw = simulate(env, PolicySpec::random_walk(), SimMode::cover, 20000, seed++);
      const double lo = mb.lower - kMatthewsZ * rw.stats.std_error;
      const double hi = mb.upper + kMatthewsZ * rw.stats.std_error;
      if (rw.stats.cap_hits > 0 || rw.stats.mean < lo || rw.stats.mean > hi) ++outside;
      worst_low = std::min(worst_low, rw.stats.mean - lo);
      worst_high = std::min(worst_high, hi - rw.stats.mean);
      const double exact = exact_cover_time_rw(c.graph, s);
      if (exact < mb.lower - 1e-9 || exact > mb.upper + 1e-9) ++exact_outside;
    }
    r.check(outside == 0, fmt("%s (m = %zu): bounds [%.3f, %.3f], %zu of %zu starts outside (margins %.3f / %.3f)",
                              c.name.c_str(), c.graph.node_count(), mb.lower, mb.upper, outside,
                              c.graph.node_count(), worst_low, worst_high));
    if (exact_outside) r.note(fmt("%s: exact cover time outside bounds at %zu starts", c.name.c_str(), exact_outside));
  }
}

void tree(Report& r) {
  constexpr double kCoverBound = 4608.0;  // 4 H (b+1)/(b-1) b^H, b = 2, H = 6
  constexpr std::uint64_t kVisitBound = 36;  // 2 (b+1) H
  const auto env = make_btree(2, 6);
  const auto nf = simulate(env, PolicySpec::negative_feedback(), SimMode::cover, 2000, kSeed + 14, true, true);
  std::size_t cover_fail = 0, visit_fail = 0;
  std::uint64_t max_cover = 0, max_visits = 0;
  for (const auto& rec : nf.records) {
    const auto t = rec.t_cover.value_or(std::numeric_limits<std::uint64_t>::max());
    max_cover = std::max(max_cover, t);
    if (static_cast<double>(t) > kCoverBound) ++cover_fail;
    const auto v = *std::ranges::max_element(rec.visits);
    max_visits = std::max(max_visits, v);
    if (v > kVisitBound) ++visit_fail;
  }
  std::string first;
  const auto flagged = count_bound_failures(nf, &first);
  r.check(cover_fail == 0, fmt("NF btree(2,6): T_C <= 4608 in all 2000 runs (max %llu)",
                               static_cast<unsigned long long>(max_cover)));
  r.check(visit_fail == 0, fmt("NF btree(2,6): per-node visits <= 36 in all runs (max %llu)",
                               static_cast<unsigned long long>(max_visits)));
  r.check(flagged == 0, fmt("check_bounds agrees (%zu flagged runs) %s", flagged, first.c_str()));

  const auto rw = simulate(env, PolicySpec::random_walk(), SimMode::cover, 2000, kSeed + 15);
  check_below(r, "NF below RW on btree(2,6)", nf.stats, rw.stats);
  const double asymptote = 2.0 * 36.0 * std::pow(2.0, 7.0) * std::log(2.0);
  r.check(rw.stats.mean >= kTreeBandLow * asymptote && rw.stats.mean <= kTreeBandHigh * asymptote,
          fmt("RW mean %.1f within [0.5, 2] x asymptote %.1f (band check only)", rw.stats.mean, asymptote));
}

std::optional<std::uint64_t> general_bound_oracle(const Graph& g) {
  // All-pairs BFS diameter, then 1 + (m-1) d^diam in 128-bit arithmetic.
  std::size_t diam = 0;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    std::vector<std::size_t> dist(g.node_count(), SIZE_MAX);
    std::vector<NodeId> queue{s};
    dist[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      for (const auto& arc : g.actions(u))
        if (dist[arc.target] == SIZE_MAX) {
          dist[arc.target] = dist[u] + 1;
          queue.push_back(arc.target);
        }
    }
    diam = std::max(diam, *std::ranges::max_element(dist));
  }
  std::size_t dmax = 0;
  for (NodeId i = 0; i < g.node_count(); ++i) dmax = std::max(dmax, g.degree(i));
  unsigned __int128 power = 1;
  const unsigned __int128 limit = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t k = 0; k < diam; ++k) {
    power *= dmax;
    if (power > limit) return std::nullopt;
  }
  const unsigned __int128 G = 1 + static_cast<unsigned __int128>(g.node_count() - 1) * power;
  if (G > limit) return std::nullopt;
  return static_cast<std::uint64_t>(G);
}

void general_bound(Report& r) {
  const std::vector<std::pair<EnvKind, std::map<std::string, long long>>> shipped{
      {EnvKind::star, {{"n", 10}}},          {EnvKind::path, {{"n", 10}}},
      {EnvKind::circle, {{"n", 10}}},        {EnvKind::clique, {{"n", 10}}},
      {EnvKind::barbell, {{"n", 5}}},        {EnvKind::btree, {{"b", 2}, {"H", 6}}},
      {EnvKind::btree, {{"b", 3}, {"H", 3}}}, {EnvKind::grid1d, {{"n", 10}}},
      {EnvKind::grid2d, {{"grid", 5}}},      {EnvKind::grid2d, {{"grid", 10}}},
      {EnvKind::grid3d, {{"grid", 4}}},      {EnvKind::multiroom, {{"rooms", 4}}},
      {EnvKind::toy_maze, {}},               {EnvKind::hanoi, {{"discs", 3}}},
      {EnvKind::hanoi, {{"discs", 4}}},
  };
  std::uint64_t seed = kSeed + 2000;
  for (const auto& [kind, params] : shipped) {
    const auto env = make_environment(kind, params);
    const std::string name = std::string(to_string(kind)) + "(" + env.spec.params_string() + ")";
    if (env.graph.node_count() > 200) {
      r.note(name + ": more than 200 nodes, skipped");
      continue;
    }
    const auto G = general_bound_oracle(env.graph);
    const auto lib = general_cover_bound(env.graph);
    r.check(G == lib, name + ": library bound agrees with the oracle");
    const auto nf = simulate(env, PolicySpec::negative_feedback(), SimMode::cover, 300, seed++, true);
    std::uint64_t worst = 0;
    std::size_t above = 0;
    for (const auto& run : nf.runs) {
      const auto t = run.t_cover.value_or(std::numeric_limits<std::uint64_t>::max());
      worst = std::max(worst, t);
      if (G && t > *G) ++above;
    }
    std::string first;
    const auto flagged = count_bound_failures(nf, &first);
    if (!G) {
      r.check(nf.stats.cap_hits == 0 && flagged == 0,
              fmt("%s: bound overflows 64 bits, skipped (max T_C %llu, spread/other checks %zu failures)",
                  name.c_str(), static_cast<unsigned long long>(worst), flagged));
      continue;
    }
    r.check(above == 0 && flagged == 0 && nf.stats.cap_hits == 0,
            fmt("%s: max T_C %llu <= G = %llu over 300 NF runs (%zu flagged) %s", name.c_str(),
                static_cast<unsigned long long>(worst), static_cast<unsigned long long>(*G), flagged, first.c_str()));
  }
}

void continuous_2d(Report& r) {
  continuous::ContinuousConfig cfg;
  cfg.side = 5.0;
  cfg.cells = 10;
  cfg.motion = continuous::Motion::brownian;
  cfg.policy = continuous::ContinuousPolicy::uniform;
  const auto uniform = continuous::monte_carlo_continuous(cfg, 5000, kSeed + 16, workers());
  cfg.policy = continuous::ContinuousPolicy::approx_nf;
  const auto approx = continuous::monte_carlo_continuous(cfg, 5000, kSeed + 17, workers());
  check_below(r, "approx-nf below uniform, D = 5, M = 10, Brownian", approx.stats, uniform.stats);

  Rng rng(kSeed + 18);
  constexpr int kDraws = 100000;
  double min_levy = INFINITY;
  for (int k = 0; k < kDraws; ++k) min_levy = std::min(min_levy, continuous::step_length(continuous::Motion::levy, rng));
  r.check(min_levy >= 1.0, fmt("Levy lengths: minimum of %d draws = %.6f >= 1", kDraws, min_levy));
  double sum = 0.0;
  for (int k = 0; k < kDraws; ++k) sum += continuous::step_length(continuous::Motion::brownian, rng);
  const double mean = sum / kDraws;
  const double target = std::sqrt(2.0 / std::numbers::pi);
  r.check(std::abs(mean - target) <= kHalfNormalTol,
          fmt("half-normal mean %.5f vs sqrt(2/pi) = %.5f (tol %.2f)", mean, target, kHalfNormalTol));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void reproducibility(Report& r) {
  const auto dir = std::filesystem::temp_directory_path() / fmt("covertime_repro_%llu", static_cast<unsigned long long>(
                                                                                         kSeed ^ ::getpid()));
  std::filesystem::remove_all(dir);
  const std::vector<std::vector<std::string>> invocations{
      {"simulate", "--env", "star", "--param", "n=10", "--policy", "rw", "--runs", "3000", "--seed", "7"},
      {"simulate", "--env", "btree", "--param", "b=2", "--param", "H=5", "--policy", "nf", "--runs", "500", "--seed", "8"},
      {"simulate", "--env", "toy_maze", "--mode", "hitting", "--policy", "persistent", "--pdist", "one-or-two:0.5",
       "--runs", "2000", "--seed", "9"},
      {"simulate", "--env", "grid2d", "--param", "grid=6", "--policy", "local-nf", "--anchor", "3", "--runs", "500",
       "--seed", "10"},
      {"simulate", "--env", "cont2d", "--D", "5", "--M", "5", "--policy", "approx-nf", "--runs", "300", "--seed", "11"},
      {"compare", "--env", "circle", "--param", "n=10", "--policy", "rw,nf", "--runs", "2000", "--seed", "12"},
      {"sweep", "--env", "grid2d", "--sweep", "grid=3,5", "--policy", "rw,nf", "--runs", "300", "--seed", "13"},
      {"sweep", "--env", "cont2d", "--sweep", "M=3,5", "--policy", "uniform,approx-nf", "--runs", "200", "--seed", "14"},
  };
  int index = 0;
  for (const auto& base : invocations) {
    std::string contents[2];
    bool ran = true;
    for (int pass = 0; pass < 2; ++pass) {
      auto args = base;
      const auto prefix = dir / fmt("inv%d_w%d", index, pass == 0 ? 1 : 8);
      args.insert(args.end(), {"--workers", pass == 0 ? "1" : "8", "--out", prefix.string()});
      std::ostringstream out, err;
      ran = ran && cli::run(args, out, err) == 0;
      contents[pass] = slurp(prefix.string() + ".csv");
    }
    std::string line;
    for (const auto& a : base) line += a + " ";
    r.check(ran && !contents[0].empty() && contents[0] == contents[1],
            fmt("byte-identical CSV at 1 and 8 workers (%zu bytes): %s", contents[0].size(), line.c_str()));
    ++index;
  }
  std::filesystem::remove_all(dir);
}

struct Criterion {
  const char* name;
  std::function<void(Report&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"star", star},
      {"path", path},
      {"circle", circle},
      {"clique", clique},
      {"toy_maze", toy_maze},
      {"local_improvement", local_improvement},
      {"maclaurin", maclaurin},
      {"matthews", matthews},
      {"tree", tree},
      {"general_bound", general_bound},
      {"continuous_2d", continuous_2d},
      {"reproducibility", reproducibility},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  if (!wanted.empty() && wanted.front() == "--list") {
    for (const auto& c : criteria()) std::cout << c.name << "\n";
    return 0;
  }
  for (const auto& w : wanted) {
    if (std::ranges::none_of(criteria(), [&](const Criterion& c) { return w == c.name; })) {
      std::cerr << "unknown criterion '" << w << "'\n";
      return 2;
    }
  }
  int failed = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::ranges::find(wanted, c.name) == wanted.end()) continue;
    std::cout << "--- " << c.name << "\n";
    Report report;
    try {
      c.run(report);
    } catch (const std::exception& e) {
      report.check(false, std::string("exception: ") + e.what());
    }
    std::cout << (report.ok() ? "PASS " : "FAIL ") << c.name << std::endl;
    failed += report.ok() ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
