#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "covertime/covertime.hpp"

#ifndef COVERTIME_VERSION
#define COVERTIME_VERSION "unknown"
#endif

namespace covertime::cli {

namespace {

using json = nlohmann::ordered_json;
namespace cont = covertime::continuous;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr std::string_view kCont2d = "cont2d";

struct Options {
  std::string env;
  std::vector<std::string> params;
  std::vector<std::string> policies;
  NodeId anchor = 0;
  std::string pdist = "one-or-two:0.5";
  std::uint64_t runs = 1000;
  std::optional<std::uint64_t> seed;
  std::uint64_t step_cap = 0;
  std::string out;
  unsigned workers = 1;
  std::string mode = "cover";
  double side = 5.0;
  long long cells = 10;
  std::string motion = "brownian";
  std::optional<double> delta;
  std::string quantity;
  double a = 0.5;
  std::string sweep;
};

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

long long parse_int(const std::string& text, const std::string& what) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) throw UsageError(what + ": expected an integer, got '" + text + "'");
  return v;
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(what + ": expected a number, got '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::pair<std::string, std::string> split_kv(const std::string& text, const std::string& flag) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw UsageError(flag + " expects key=value, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

std::map<std::string, long long> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, long long> params;
  for (const auto& p : raw) {
    const auto [k, v] = split_kv(p, "--param");
    params[k] = parse_int(v, "--param " + k);
  }
  return params;
}

bool ci_mode() {
  const char* v = std::getenv("CI");
  if (v == nullptr) return false;
  const std::string s(v);
  return !s.empty() && s != "0" && s != "false";
}

std::uint64_t resolve_seed(const Options& o, std::ostream& err) {
  if (o.seed) return *o.seed;
  if (ci_mode()) throw UsageError("--seed is required when CI is set");
  err << "warning: no --seed given, using 0\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Policies

RepetitionDist parse_pdist(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--pdist expects kind:value, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  try {
    if (kind == "one-or-two") return RepetitionDist::one_or_two(parse_real(arg, "--pdist"));
    if (kind == "inverse-z") {
      const long long z = parse_int(arg, "--pdist");
      if (z < 1) throw UsageError("--pdist inverse-z needs z_max >= 1");
      return RepetitionDist::inverse_z(static_cast<std::uint32_t>(z));
    }
    if (kind == "probs") {
      std::vector<double> probs;
      for (const auto& p : split(arg, '/')) probs.push_back(parse_real(p, "--pdist"));
      return RepetitionDist::from_probs(std::move(probs));
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("--pdist: unknown kind '" + kind + "' (one-or-two, inverse-z, probs)");
}

struct PolicyChoice {
  std::string label;
  PolicySpec discrete;
  cont::ContinuousPolicy continuous = cont::ContinuousPolicy::uniform;
};

PolicyChoice parse_policy(const std::string& name, const Options& o, bool continuous) {
  PolicyChoice c;
  if (continuous) {
    if (name == "uniform" || name == "rw") {
      c.continuous = cont::ContinuousPolicy::uniform;
      c.label = "uniform";
    } else if (name == "approx-nf" || name == "nf") {
      c.continuous = cont::ContinuousPolicy::approx_nf;
      c.label = "approx-nf";
    } else {
      throw UsageError("policy '" + name + "' is not available for cont2d (uniform, approx-nf)");
    }
    return c;
  }
  if (name == "rw") {
    c.discrete = PolicySpec::random_walk();
    c.label = "rw";
  } else if (name == "nf") {
    c.discrete = PolicySpec::negative_feedback();
    c.label = "nf";
  } else if (name == "local-nf") {
    c.discrete = PolicySpec::local_negative_feedback(o.anchor);
    c.label = "local-nf(anchor=" + std::to_string(o.anchor) + ")";
  } else if (name == "persistent") {
    c.discrete = PolicySpec::persistent(parse_pdist(o.pdist));
    c.label = "persistent(" + o.pdist + ")";
  } else {
    throw UsageError("unknown policy '" + name + "' (rw, nf, local-nf, persistent)");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Jobs

struct Job {
  bool continuous = false;
  std::string env_name;
  std::string params;
  Environment env;
  cont::ContinuousConfig cont_config;
  PolicyChoice policy;
  SimMode mode = SimMode::cover;
  std::uint64_t runs = 0;
  std::uint64_t seed = 0;
  std::uint64_t step_cap = 0;
  unsigned workers = 1;
};

struct Row {
  std::optional<std::uint64_t> t_cover;
  std::optional<std::uint64_t> t_hit;
  bool cap_hit = false;
};

struct JobResult {
  McStats stats;
  std::vector<Row> rows;
};

Environment build_env(const std::string& name, const std::map<std::string, long long>& params) {
  EnvKind kind;
  try {
    kind = env_kind_from_string(name);
  } catch (const std::invalid_argument&) {
    throw UsageError("unknown environment '" + name + "'");
  }
  try {
    return make_environment(kind, params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

SimMode parse_mode(const std::string& mode) {
  if (mode == "cover") return SimMode::cover;
  if (mode == "hitting") return SimMode::hitting;
  throw UsageError("--mode must be cover or hitting");
}

cont::ContinuousConfig make_cont_config(const Options& o, const std::map<std::string, double>& overrides) {
  cont::ContinuousConfig c;
  c.side = o.side;
  c.delta = o.delta;
  double cells = static_cast<double>(o.cells);
  for (const auto& [k, v] : overrides) {
    if (k == "D") c.side = v;
    else if (k == "M") cells = v;
    else if (k == "delta") c.delta = v;
    else throw UsageError("cont2d has no parameter '" + k + "' (D, M, delta)");
  }
  if (!(c.side > 0.0)) throw UsageError("--D must be positive");
  if (!(cells >= 1.0) || cells != static_cast<double>(static_cast<long long>(cells)))
    throw UsageError("--M must be a positive integer");
  c.cells = static_cast<std::size_t>(cells);
  if (c.delta && !(*c.delta >= 0.0)) throw UsageError("--delta must be non-negative");
  if (o.motion == "brownian") c.motion = cont::Motion::brownian;
  else if (o.motion == "levy") c.motion = cont::Motion::levy;
  else throw UsageError("--motion must be brownian or levy");
  if (o.step_cap) c.step_cap = o.step_cap;
  return c;
}

std::string cont_params_string(const cont::ContinuousConfig& c) {
  return "D=" + format_double(c.side) + ";M=" + std::to_string(c.cells) + ";motion=" +
         std::string(cont::to_string(c.motion)) + ";delta=" + format_double(c.kernel_delta());
}

Job make_job(const Options& o, const std::string& policy, std::uint64_t seed,
             const std::map<std::string, double>& overrides = {}) {
  Job job;
  job.env_name = o.env;
  job.continuous = o.env == kCont2d;
  job.mode = parse_mode(o.mode);
  job.runs = o.runs;
  job.seed = seed;
  job.workers = o.workers;
  job.policy = parse_policy(policy, o, job.continuous);
  if (o.runs == 0) throw UsageError("--runs must be >= 1");
  if (job.continuous) {
    if (!o.params.empty()) throw UsageError("cont2d takes --D/--M/--motion/--delta instead of --param");
    if (job.mode != SimMode::cover) throw UsageError("cont2d supports only --mode cover");
    job.cont_config = make_cont_config(o, overrides);
    job.cont_config.policy = job.policy.continuous;
    job.step_cap = job.cont_config.step_cap;
    job.params = cont_params_string(job.cont_config);
    return job;
  }
  auto params = parse_params(o.params);
  for (const auto& [k, v] : overrides) params[k] = static_cast<long long>(v);
  job.env = build_env(o.env, params);
  if (job.mode == SimMode::hitting && !job.env.spec.target)
    throw UsageError(o.env + " has no default target; pass --param target=K");
  if (job.policy.discrete.kind == PolicyKind::local_negative_feedback &&
      o.anchor >= job.env.graph.node_count())
    throw UsageError("--anchor is out of range");
  job.step_cap = o.step_cap ? o.step_cap : default_step_cap(job.env.graph);
  job.params = job.env.spec.params_string();
  return job;
}

JobResult run_job(const Job& job) {
  JobResult out;
  out.rows.reserve(job.runs);
  if (job.continuous) {
    const auto mc = cont::monte_carlo_continuous(job.cont_config, job.runs, job.seed, job.workers);
    out.stats = mc.stats;
    for (const auto& r : mc.runs) out.rows.push_back({r.t_cover, std::nullopt, r.cap_hit});
    return out;
  }
  SimConfig cfg;
  cfg.env = job.env;
  cfg.policy = job.policy.discrete;
  cfg.mode = job.mode;
  cfg.n_runs = job.runs;
  cfg.seed_base = job.seed;
  cfg.step_cap = job.step_cap;
  cfg.workers = job.workers;
  const auto mc = monte_carlo(cfg);
  out.stats = mc.stats;
  for (const auto& r : mc.runs) out.rows.push_back({r.t_cover, r.t_hit, r.cap_hit});
  return out;
}

json job_config(const Job& job) {
  json j;
  j["env"] = job.env_name;
  j["params"] = job.params;
  j["policy"] = job.policy.label;
  j["mode"] = job.mode == SimMode::cover ? "cover" : "hitting";
  j["n_runs"] = job.runs;
  j["seed_base"] = job.seed;
  j["step_cap"] = job.step_cap;
  j["workers"] = job.workers;
  return j;
}

// ---------------------------------------------------------------------------
// Output

struct Output {
  std::string prefix;  // empty: write to stdout
  std::vector<std::string> written;
};

std::string strip_extension(const std::string& path) {
  const std::filesystem::path p(path);
  const auto ext = p.extension().string();
  if (ext == ".csv" || ext == ".json" || ext == ".txt") return (p.parent_path() / p.stem()).string();
  return path;
}

void write_file(Output& out, const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
  out.written.push_back(path);
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(Output& out, const std::string& command, const std::vector<std::string>& argv,
                    json config, std::optional<std::uint64_t> seed) {
  if (out.prefix.empty()) return;
  json m;
  m["tool"] = "covertime";
  m["version"] = COVERTIME_VERSION;
  m["command"] = command;
  m["argv"] = argv;
  m["config"] = std::move(config);
  if (seed) m["seed_base"] = *seed;
  else m["seed_base"] = nullptr;
  m["timestamp"] = timestamp_utc();
  m["outputs"] = out.written;
  write_file(out, out.prefix + ".manifest.json", m.dump(2) + "\n");
}

std::string opt_str(const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); }

std::string runs_csv(const Job& job, const JobResult& res) {
  std::string csv = "env,params,policy,seed_base,run_id,t_cover,t_hit,cap_hit\n";
  const std::string lead = job.env_name + "," + job.params + "," + job.policy.label + "," + std::to_string(job.seed) + ",";
  for (std::size_t r = 0; r < res.rows.size(); ++r) {
    const auto& row = res.rows[r];
    csv += lead + std::to_string(r) + "," + opt_str(row.t_cover) + "," + opt_str(row.t_hit) + "," +
           (row.cap_hit ? "1" : "0") + "\n";
  }
  return csv;
}

json summary_json(const Job& job, const McStats& s) {
  json j;
  j["env"] = job.env_name;
  j["params"] = job.params;
  j["policy"] = job.policy.label;
  j["mode"] = job.mode == SimMode::cover ? "cover" : "hitting";
  j["n_runs"] = s.n_runs;
  j["mean"] = s.mean;
  j["stderr"] = s.std_error;
  j["variance"] = s.variance;
  j["seed_base"] = s.seed_base;
  j["cap_hits"] = s.cap_hits;
  if (s.cap_hits > 0)
    j["warning"] = std::to_string(s.cap_hits) + " run(s) hit the step cap and are excluded from the mean";
  return j;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_generate(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
  if (o.env == kCont2d) throw UsageError("generate works on graph environments only");
  const auto env = build_env(o.env, parse_params(o.params));
  const Graph& g = env.graph;
  json meta;
  meta["env"] = o.env;
  meta["params"] = env.spec.params_string();
  meta["node_count"] = g.node_count();
  meta["arc_count"] = g.arc_count();
  meta["max_degree"] = g.max_degree();
  meta["diameter"] = eccentricity_max(g);
  meta["start_rule"] = env.spec.start_rule == StartRule::fixed ? "fixed" : "uniform";
  meta["start"] = env.spec.start;
  if (env.spec.target) meta["target"] = *env.spec.target;
  else meta["target"] = nullptr;
  const std::string adjacency = to_adjacency_text(g);
  Output files{o.out.empty() ? "" : strip_extension(o.out), {}};
  if (files.prefix.empty()) {
    out << adjacency;
    return kExitOk;
  }
  write_file(files, files.prefix + ".txt", adjacency);
  write_file(files, files.prefix + ".json", meta.dump(2) + "\n");
  write_manifest(files, "generate", argv, meta, std::nullopt);
  out << meta.dump(2) << "\n";
  return kExitOk;
}

int cmd_simulate(const Options& o, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  if (o.policies.size() != 1) throw UsageError("simulate takes exactly one --policy");
  const auto seed = resolve_seed(o, err);
  const Job job = make_job(o, o.policies.front(), seed);
  const JobResult res = run_job(job);
  const json summary = summary_json(job, res.stats);
  if (res.stats.cap_hits > 0) err << "warning: " << summary["warning"].get<std::string>() << "\n";
  Output files{o.out.empty() ? "" : strip_extension(o.out), {}};
  if (!files.prefix.empty()) {
    write_file(files, files.prefix + ".csv", runs_csv(job, res));
    write_file(files, files.prefix + ".summary.json", summary.dump(2) + "\n");
    write_manifest(files, "simulate", argv, job_config(job), seed);
  }
  out << summary.dump(2) << "\n";
  return kExitOk;
}

json exact_quantity(const Options& o) {
  if (o.env == kCont2d) throw UsageError("exact works on graph environments only");
  const auto env = build_env(o.env, parse_params(o.params));
  const Graph& g = env.graph;
  json j;
  j["env"] = o.env;
  j["params"] = env.spec.params_string();
  j["quantity"] = o.quantity;
  const auto emit = [&](FormKind kind, double value) {
    j["kind"] = to_string(kind);
    j["value"] = value;
  };
  const auto unsupported = [&](const std::string& why) {
    return UsageError("quantity '" + o.quantity + "' is not supported for " + o.env + ": " + why);
  };
  const bool default_start = !env.spec.params.contains("start");

  if (o.quantity == "rw-hitting") {
    if (!env.spec.target) throw unsupported("no target (pass --param target=K)");
    if (env.spec.start_rule != StartRule::fixed) throw unsupported("start is uniform (pass --param start=K)");
    const auto h = hitting_times_rw(g, *env.spec.target);
    j["start"] = env.spec.start;
    j["target"] = *env.spec.target;
    emit(FormKind::exact, h[env.spec.start]);
  } else if (o.quantity == "rw-cover" || o.quantity == "nf-cover") {
    const auto policy = o.quantity == "rw-cover" ? PolicyKind::random_walk : PolicyKind::negative_feedback;
    std::optional<ClosedForm> form;
    if (default_start) {
      try {
        form = closed_form(env.spec, policy);
      } catch (const std::invalid_argument&) {
      }
    }
    if (form) {
      emit(form->kind, form->value);
    } else if (policy == PolicyKind::random_walk && g.node_count() <= 16) {
      double value = 0.0;
      if (env.spec.start_rule == StartRule::fixed) {
        value = exact_cover_time_rw(g, env.spec.start);
        j["start"] = env.spec.start;
      } else {
        for (NodeId s = 0; s < g.node_count(); ++s) value += exact_cover_time_rw(g, s);
        value /= static_cast<double>(g.node_count());
        j["start"] = "uniform";
      }
      emit(FormKind::exact, value);
    } else {
      throw unsupported("no closed form and the graph is too large for the exact subset solve");
    }
  } else if (o.quantity == "matthews") {
    const auto mb = matthews_bounds(g);
    emit(FormKind::upper_bound, mb.upper);
    j["lower"] = mb.lower;
    j["mu_minus"] = mb.mu_minus;
    j["mu_plus"] = mb.mu_plus;
  } else if (o.quantity == "general-bound") {
    j["kind"] = to_string(FormKind::upper_bound);
    if (const auto G = general_cover_bound(g)) {
      j["value"] = *G;
    } else {
      j["value"] = nullptr;
      j["reason"] = "1 + (m-1) d_max^diam overflows 64 bits";
    }
  } else if (o.quantity == "persistent-T0") {
    if (env.spec.kind != EnvKind::toy_maze) throw unsupported("defined on toy_maze only");
    if (!(o.a >= 0.0 && o.a <= 1.0)) throw UsageError("--a must lie in [0, 1]");
    j["a"] = o.a;
    emit(FormKind::exact, persistent_toy_T0(o.a));
  } else if (o.quantity == "restricted-maze") {
    if (env.spec.kind != EnvKind::toy_maze) throw unsupported("defined on toy_maze only");
    const auto en = enumerate_restricted_maze();
    const auto rational = [](const Rational& r) {
      return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
    };
    emit(FormKind::exact, boost::rational_cast<double>(en.expected_steps));
    j["expected_steps"] = rational(en.expected_steps);
    j["total_probability"] = rational(en.total_probability);
    j["paths"] = en.paths.size();
  } else {
    throw UsageError("unknown quantity '" + o.quantity +
                     "' (rw-hitting, rw-cover, nf-cover, matthews, general-bound, persistent-T0, restricted-maze)");
  }
  return j;
}

int cmd_exact(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
  const json j = exact_quantity(o);
  Output files{o.out.empty() ? "" : strip_extension(o.out), {}};
  if (!files.prefix.empty()) {
    write_file(files, files.prefix + ".json", j.dump(2) + "\n");
    write_manifest(files, "exact", argv, j, std::nullopt);
  }
  out << j.dump(2) << "\n";
  return kExitOk;
}

std::vector<std::string> unique_labels(const std::vector<Job>& jobs) {
  std::vector<std::string> labels;
  std::map<std::string, int> seen;
  for (const auto& job : jobs) {
    const int k = ++seen[job.policy.label];
    labels.push_back(k == 1 ? job.policy.label : job.policy.label + "#" + std::to_string(k));
  }
  return labels;
}

int cmd_compare(const Options& o, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  if (o.policies.size() < 2) throw UsageError("compare needs at least two policies");
  const auto seed = resolve_seed(o, err);
  std::vector<Job> jobs;
  for (const auto& p : o.policies) jobs.push_back(make_job(o, p, seed));
  std::vector<McStats> stats;
  for (const auto& job : jobs) stats.push_back(run_job(job).stats);
  const auto labels = unique_labels(jobs);

  std::string csv = "env,params,policy,n_runs,mean,stderr,cap_hits";
  for (const auto& l : labels) csv += ",z_vs_" + l;
  csv += "\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    csv += jobs[i].env_name + "," + jobs[i].params + "," + labels[i] + "," + std::to_string(stats[i].n_runs) + "," +
           format_double(stats[i].mean) + "," + format_double(stats[i].std_error) + "," +
           std::to_string(stats[i].cap_hits);
    for (std::size_t k = 0; k < jobs.size(); ++k) csv += "," + format_double(z_score(stats[i], stats[k]));
    csv += "\n";
  }
  Output files{o.out.empty() ? "" : strip_extension(o.out), {}};
  if (files.prefix.empty()) {
    out << csv;
    return kExitOk;
  }
  write_file(files, files.prefix + ".csv", csv);
  json config = json::array();
  for (const auto& job : jobs) config.push_back(job_config(job));
  write_manifest(files, "compare", argv, config, seed);
  out << csv;
  return kExitOk;
}

int cmd_sweep(const Options& o, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  if (o.policies.empty()) throw UsageError("sweep needs at least one --policy");
  const auto [key, list] = split_kv(o.sweep, "--sweep");
  std::vector<std::string> values = split(list, ',');
  if (values.empty()) throw UsageError("--sweep needs at least one value");
  const bool continuous = o.env == kCont2d;
  const auto seed = resolve_seed(o, err);

  std::string csv = "env,param,param_value,policy,n_runs,mean,stderr,cap_hits\n";
  json config = json::array();
  for (const auto& text : values) {
    const double v = continuous ? parse_real(text, "--sweep " + key)
                                : static_cast<double>(parse_int(text, "--sweep " + key));
    for (const auto& p : o.policies) {
      const Job job = make_job(o, p, seed, {{key, v}});
      const auto s = run_job(job).stats;
      csv += job.env_name + "," + key + "," + text + "," + job.policy.label + "," + std::to_string(s.n_runs) + "," +
             format_double(s.mean) + "," + format_double(s.std_error) + "," + std::to_string(s.cap_hits) + "\n";
      config.push_back(job_config(job));
    }
  }
  Output files{o.out.empty() ? "" : strip_extension(o.out), {}};
  if (files.prefix.empty()) {
    out << csv;
    return kExitOk;
  }
  write_file(files, files.prefix + ".csv", csv);
  write_manifest(files, "sweep", argv, config, seed);
  out << csv;
  return kExitOk;
}

int cmd_replay(const std::string& manifest_path, const std::string& out_override, std::ostream& out,
               std::ostream& err) {
  std::ifstream f(manifest_path);
  if (!f) throw UsageError("cannot read manifest '" + manifest_path + "'");
  json m;
  try {
    m = json::parse(f);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array()) throw UsageError("manifest has no argv array");
  auto argv = m["argv"].get<std::vector<std::string>>();
  if (!argv.empty() && argv.front() == "replay") throw UsageError("manifest records a replay");
  if (!out_override.empty()) {
    bool replaced = false;
    for (std::size_t k = 0; k + 1 < argv.size(); ++k) {
      if (argv[k] == "--out") {
        argv[k + 1] = out_override;
        replaced = true;
      }
    }
    if (!replaced) {
      argv.push_back("--out");
      argv.push_back(out_override);
    }
  }
  return run(argv, out, err);
}

void add_env_options(CLI::App& sub, Options& o, bool with_cont) {
  sub.add_option("--env", o.env, "environment kind")->required();
  sub.add_option("--param", o.params, "environment parameter k=v (repeatable)");
  if (with_cont) {
    sub.add_option("--D", o.side, "cont2d: side length");
    sub.add_option("--M", o.cells, "cont2d: cells per side");
    sub.add_option("--motion", o.motion, "cont2d: brownian or levy");
    sub.add_option("--delta", o.delta, "cont2d: kernel half-width (default D/M)");
  }
}

void add_mc_options(CLI::App& sub, Options& o) {
  sub.add_option("--anchor", o.anchor, "anchor node for local-nf");
  sub.add_option("--pdist", o.pdist, "repetition distribution: one-or-two:A, inverse-z:N, probs:p1/p2/...");
  sub.add_option("--runs", o.runs, "number of runs");
  sub.add_option("--seed", o.seed, "base seed");
  sub.add_option("--step-cap", o.step_cap, "per-run step cap (0 selects the default)");
  sub.add_option("--workers", o.workers, "worker threads")->check(CLI::Range(1u, 1024u));
  sub.add_option("--mode", o.mode, "cover or hitting");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cover-time experiments on graphs and in the continuous square"};
  app.name("covertime");
  app.require_subcommand(1);
  Options o;
  std::string manifest_path;

  auto* generate = app.add_subcommand("generate", "write an environment's adjacency list");
  add_env_options(*generate, o, false);
  generate->add_option("--out", o.out, "output prefix");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo runs of one policy");
  add_env_options(*simulate, o, true);
  simulate->add_option("--policy", o.policies, "policy")->required();
  add_mc_options(*simulate, o);
  simulate->add_option("--out", o.out, "output prefix");

  auto* exact = app.add_subcommand("exact", "exact or closed-form quantities");
  add_env_options(*exact, o, false);
  exact->add_option("--quantity", o.quantity, "quantity")->required();
  exact->add_option("--a", o.a, "persistent-T0: probability of a single repeat");
  exact->add_option("--out", o.out, "output prefix");

  auto* compare = app.add_subcommand("compare", "several policies on one environment");
  add_env_options(*compare, o, true);
  compare->add_option("--policy", o.policies, "policies (comma separated or repeated)")->required()->delimiter(',');
  add_mc_options(*compare, o);
  compare->add_option("--out", o.out, "output prefix");

  auto* sweep = app.add_subcommand("sweep", "policies over a parameter grid");
  add_env_options(*sweep, o, true);
  sweep->add_option("--policy", o.policies, "policies (comma separated or repeated)")->required()->delimiter(',');
  sweep->add_option("--sweep", o.sweep, "k=v1,v2,...")->required();
  add_mc_options(*sweep, o);
  sweep->add_option("--out", o.out, "output prefix");

  auto* replay = app.add_subcommand("replay", "re-run a manifest");
  replay->add_option("manifest", manifest_path, "manifest JSON")->required();
  replay->add_option("--out", o.out, "override the output prefix");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(o, args, out);
    if (simulate->parsed()) return cmd_simulate(o, args, out, err);
    if (exact->parsed()) return cmd_exact(o, args, out);
    if (compare->parsed()) return cmd_compare(o, args, out, err);
    if (sweep->parsed()) return cmd_sweep(o, args, out, err);
    if (replay->parsed()) return cmd_replay(manifest_path, o.out, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace covertime::cli
