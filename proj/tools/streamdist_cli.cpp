// Command-line front end: distribution and stream generation, estimator and
// tester execution, parameter sweeps, machine-readable reports.
//
// Exit codes: 0 success, 1 unreadable or unwritable file, 2 violated
// parameter or algorithm contract (including bad command lines).

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "streamdist/distribution.hpp"
#include "streamdist/divergence.hpp"
#include "streamdist/errors.hpp"
#include "streamdist/f0_entropy.hpp"
#include "streamdist/large_small.hpp"
#include "streamdist/oracle.hpp"
#include "streamdist/oracle_sim.hpp"
#include "streamdist/random_order.hpp"
#include "streamdist/rng.hpp"
#include "streamdist/stream.hpp"
#include "streamdist/testers.hpp"

namespace sd = streamdist;
using nlohmann::ordered_json;

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

double pick(double flag, double dflt) { return std::isnan(flag) ? dflt : flag; }

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Everything `run` and `sweep` need to execute one trial. Numeric fields
// hold NaN until resolved against the per-algorithm defaults.
struct TrialSpec {
  std::string algo;
  std::string kind;  // divergence name; empty means the per-algo default
  bool order_random = false;
  uint64_t m = 0;
  double eps = kUnset;
  double eps0 = kUnset;
  double alpha = kUnset;
  double delta = kUnset;
  double lb = 0.0;
  bool tight_tau = false;
};

struct TrialInputs {
  const sd::Distribution* p = nullptr;
  const sd::Distribution* q = nullptr;
  sd::StreamSource* stream = nullptr;
};

sd::DivergenceKind resolve_kind(const TrialSpec& spec, const char* dflt) {
  return sd::divergence_from_name(spec.kind.empty() ? dflt : spec.kind);
}

ordered_json calls_json(const sd::CallTrace& t) {
  return ordered_json{{"samples_p", t.samples_p},
                      {"samples_q", t.samples_q},
                      {"probes_p", t.probes_p},
                      {"probes_q", t.probes_q},
                      {"total", t.total()}};
}

void require(bool ok, const std::string& what) {
  if (!ok) throw sd::ContractError(what);
}

void add_accuracy(ordered_json& report, double estimate, double exact) {
  report["estimate"] = estimate;
  report["exact_value"] = exact;
  if (exact != 0.0) report["rel_error"] = std::fabs(estimate - exact) / std::fabs(exact);
}

sd::Distribution empirical_dist(const std::vector<uint64_t>& counts, uint64_t m) {
  std::vector<double> probs(counts.size());
  for (size_t i = 0; i < counts.size(); ++i)
    probs[i] = static_cast<double>(counts[i]) / static_cast<double>(m);
  return sd::Distribution(std::move(probs));
}

// Sampling estimators and testers against the exact oracle.

ordered_json run_exact(const TrialSpec& spec, const TrialInputs& in) {
  ordered_json r;
  if (in.q) {
    sd::DivergenceKind kind = resolve_kind(spec, "triangle");
    r["params"] = {{"kind", sd::divergence_name(kind)}, {"n", in.p->n()}};
    double v = sd::divergence_exact(kind, *in.p, *in.q);
    add_accuracy(r, v, v);
    r["space_words"] = 2 * in.p->n();
  } else {
    r["params"] = {{"kind", "entropy"}, {"n", in.p->n()}};
    double v = sd::entropy_exact(*in.p);
    add_accuracy(r, v, v);
    r["space_words"] = in.p->n();
  }
  r["calls"] = calls_json(sd::CallTrace{});
  return r;
}

ordered_json run_combined(const TrialSpec& spec, const TrialInputs& in, uint64_t seed) {
  sd::CombinedParams cp;
  cp.epsilon = pick(spec.eps, 0.1);
  cp.delta = pick(spec.delta, 0.05);
  cp.lower_bound = spec.lb;
  cp.m_override = spec.m;
  cp.use_tight_tau = spec.tight_tau;

  ordered_json r;
  ordered_json params{{"n", in.p->n()},     {"eps", cp.epsilon},
                      {"delta", cp.delta},  {"lb", cp.lower_bound},
                      {"m", cp.m_override}, {"tight_tau", cp.use_tight_tau}};
  sd::EstimateReport er;
  double exact = 0.0;
  ordered_json calls;
  if (spec.algo == "combined-entropy") {
    require(in.q == nullptr, "combined-entropy takes a single distribution");
    sd::OracleSession oracle(*in.p, seed);
    er = sd::combined_entropy_estimate(oracle, cp);
    exact = sd::entropy_exact(*in.p);
    calls = calls_json(oracle.trace());
  } else if (spec.algo == "combined-l2") {
    require(in.q != nullptr, "combined-l2 takes two distributions");
    sd::OracleSession oracle(*in.p, *in.q, seed);
    er = sd::combined_l2_estimate(oracle, cp);
    exact = sd::l2_squared(*in.p, *in.q);
    calls = calls_json(oracle.trace());
  } else {
    require(in.q != nullptr, "combined-distance takes two distributions");
    sd::DivergenceKind kind = resolve_kind(spec, "triangle");
    params["kind"] = sd::divergence_name(kind);
    sd::OracleSession oracle(*in.p, *in.q, seed);
    er = sd::combined_distance_estimate(oracle, kind, cp);
    exact = sd::divergence_exact(kind, *in.p, *in.q);
    calls = calls_json(oracle.trace());
  }
  r["params"] = std::move(params);
  add_accuracy(r, er.estimate, exact);
  r["calls"] = std::move(calls);
  r["space_words"] = 0;
  r["detail"] = {{"iterations", er.iterations}};
  return r;
}

ordered_json run_delta_test(const TrialSpec& spec, const TrialInputs& in, uint64_t seed) {
  require(in.q != nullptr, "delta-test takes two distributions");
  sd::DeltaTestParams dp;
  dp.epsilon = pick(spec.eps, 0.1);
  dp.alpha = pick(spec.alpha, 2.0 / 3.0);
  dp.delta = pick(spec.delta, 0.05);
  dp.m = spec.m;

  sd::OracleSession oracle(*in.p, *in.q, seed);
  sd::SplitMix64 remap_rng(sd::hash3(seed, 0xde17a, 1));
  bool close = sd::delta_test(oracle, dp, remap_rng);

  ordered_json r;
  r["params"] = {{"n", in.p->n()},   {"eps", dp.epsilon}, {"alpha", dp.alpha},
                 {"delta", dp.delta}, {"m", dp.m}};
  r["verdict"] = close ? "close" : "far";
  r["exact_value"] = sd::divergence_exact(sd::DivergenceKind::kTriangle, *in.p, *in.q);
  r["calls"] = calls_json(oracle.trace());
  r["space_words"] = 0;
  uint64_t m_heavy = dp.m ? dp.m
                          : sd::heavy_phase_sample_count(in.p->n(), dp.epsilon,
                                                         dp.alpha, dp.delta);
  r["detail"] = {{"m_heavy", m_heavy}};
  return r;
}

// Streaming estimators; the source is counted first for ground truth and
// the ladder length, then rewound and fed.

sd::StreamCounts count_single_target(sd::StreamSource& src, const char* algo) {
  sd::StreamCounts counts = sd::count_stream(src);
  require(counts.m_q == 0, std::string(algo) + " expects a single-target stream");
  require(counts.m_p > 0, std::string(algo) + ": empty stream");
  src.rewind();
  return counts;
}

ordered_json run_f0_entropy(const TrialSpec& spec, sd::StreamSource& src, uint64_t seed) {
  sd::StreamCounts counts = count_single_target(src, "f0-entropy");
  sd::F0EntropyParams fp;
  fp.n = counts.n;
  fp.max_len = counts.m_p;
  fp.eps = pick(spec.eps, 0.1);
  fp.eps0 = pick(spec.eps0, 0.05);
  fp.sketch_delta = pick(spec.delta, 0.05);
  fp.seed = seed;

  sd::F0EntropyEstimator est(fp);
  sd::StreamToken tok;
  while (src.next(tok)) est.feed(tok.item);
  sd::F0EntropyReport rep = est.report();
  double exact = sd::empirical_entropy_bits(counts.p, counts.m_p);
  auto window = sd::F0EntropyEstimator::raw_sum_window(exact, fp.eps);

  ordered_json r;
  r["params"] = {{"n", fp.n},     {"m", fp.max_len},           {"eps", fp.eps},
                 {"eps0", fp.eps0}, {"sketch_delta", fp.sketch_delta}};
  add_accuracy(r, rep.bias_adjusted, exact);
  r["calls"] = calls_json(sd::CallTrace{});
  r["space_words"] = rep.peak_space_words;
  r["detail"] = {{"raw", rep.raw},
                 {"raw_window_lo", window.first},
                 {"raw_window_hi", window.second},
                 {"levels", rep.levels},
                 {"chosen_rung", rep.chosen_rung},
                 {"live_space_words", rep.live_space_words}};
  return r;
}

ordered_json run_large_small(const TrialSpec& spec, sd::StreamSource& src, uint64_t seed) {
  sd::StreamCounts counts = count_single_target(src, "large-small");
  sd::LargeSmallParams lp;
  lp.n = counts.n;
  lp.max_len = counts.m_p;
  lp.alpha = pick(spec.alpha, 0.5);
  lp.eps = pick(spec.eps, 0.05);
  lp.seed = seed;

  sd::LargeSmallEstimator est(lp);
  sd::StreamToken tok;
  while (src.next(tok)) est.feed(tok.item);
  sd::LargeSmallReport rep = est.report();
  double exact = sd::empirical_entropy_bits(counts.p, counts.m_p);
  sd::LargeSmallBound bound = sd::large_small_error_bound(lp.alpha, lp.eps, lp.n);

  ordered_json r;
  r["params"] = {{"n", lp.n}, {"m", lp.max_len}, {"alpha", lp.alpha}, {"eps", lp.eps}};
  add_accuracy(r, rep.estimate, exact);
  r["calls"] = calls_json(sd::CallTrace{});
  r["space_words"] = rep.peak_space_words;
  r["detail"] = {{"w_hat", rep.w_hat},
                 {"tracked_items", rep.tracked_items},
                 {"heavy_items", rep.heavy_items},
                 {"cap_hits", rep.cap_hits},
                 {"bound_factor", bound.factor},
                 {"bound_additive", bound.additive},
                 {"live_space_words", rep.live_space_words}};
  return r;
}

ordered_json run_random_ptas(const TrialSpec& spec, sd::StreamSource& src, uint64_t seed) {
  require(spec.order_random,
          "random-ptas is only correct on shuffled streams; pass --order shuffled");
  sd::StreamCounts counts = count_single_target(src, "random-ptas");
  sd::RandomOrderParams rp;
  rp.n = counts.n;
  rp.eps = pick(spec.eps, 0.2);
  rp.seed = seed;
  rp.input_random_order = true;

  sd::RandomOrderEstimator est(rp);
  sd::StreamToken tok;
  while (src.next(tok)) est.feed(tok.item);
  sd::RandomOrderReport rep = est.report();
  double exact = sd::empirical_entropy_bits(counts.p, counts.m_p);

  ordered_json r;
  r["params"] = {{"n", rp.n}, {"m", counts.m_p}, {"eps", rp.eps}};
  add_accuracy(r, rep.estimate, exact);
  r["calls"] = calls_json(sd::CallTrace{});
  r["space_words"] = rep.peak_space_words;
  r["detail"] = {{"exact_path", rep.exact_path},
                 {"m_proj", rep.m_proj},
                 {"w", rep.w},
                 {"queries", rep.queries},
                 {"live_space_words", rep.live_space_words}};
  return r;
}

// Runs the matching sampling estimator on top of a stream-backed oracle:
// entropy for single-target streams, a divergence for two-target ones.
ordered_json run_oracle_sim(const TrialSpec& spec, sd::StreamSource& src, uint64_t seed) {
  bool one_pass = spec.algo == "oracle-sim-1p";
  require(spec.m > 0, spec.algo + ": --m sets the per-target generative call budget");
  if (one_pass)
    require(spec.order_random,
            "oracle-sim-1p is only correct on shuffled streams; pass --order shuffled");

  sd::StreamCounts counts = sd::count_stream(src);
  require(counts.m_p > 0, spec.algo + ": empty stream");
  src.rewind();
  bool two = counts.m_q > 0;

  sd::StreamOracleParams op;
  op.t = spec.m;
  op.seed = sd::hash3(seed, 0x0a51, 1);

  sd::CombinedParams cp;
  cp.epsilon = pick(spec.eps, 0.1);
  cp.delta = pick(spec.delta, 0.05);
  cp.m_override = spec.m;

  ordered_json r;
  ordered_json params{{"n", counts.n}, {"m", spec.m}, {"order",
                      spec.order_random ? "shuffled" : "as-given"}};
  sd::EstimateReport er;
  double exact = 0.0;
  uint64_t space = 0;
  std::unique_ptr<sd::Oracle> oracle;
  if (one_pass) {
    auto op1 = std::make_unique<sd::OnePassStreamOracle>(counts.n, two, op);
    sd::StreamToken tok;
    while (src.next(tok)) op1->feed(tok);
    op1->finish();
    space = op1->peak_space_words();
    oracle = std::move(op1);
  } else {
    auto op2 = std::make_unique<sd::TwoPassStreamOracle>(counts.n, two, op);
    op2->consume(src);
    space = op2->live_space_words();
    oracle = std::move(op2);
  }
  if (two) {
    sd::DivergenceKind kind = resolve_kind(spec, "triangle");
    params["kind"] = sd::divergence_name(kind);
    er = sd::combined_distance_estimate(*oracle, kind, cp);
    exact = sd::divergence_exact(kind, empirical_dist(counts.p, counts.m_p),
                                 empirical_dist(counts.q, counts.m_q));
  } else {
    er = sd::combined_entropy_estimate(*oracle, cp);
    exact = sd::empirical_entropy_bits(counts.p, counts.m_p);
  }
  r["params"] = std::move(params);
  add_accuracy(r, er.estimate, exact);
  r["calls"] = calls_json(oracle->trace());
  r["space_words"] = space;
  r["detail"] = {{"iterations", er.iterations}, {"stream_m_p", counts.m_p},
                 {"stream_m_q", counts.m_q}};
  return r;
}

ordered_json execute_trial(const TrialSpec& spec, const TrialInputs& in, uint64_t seed) {
  auto start = std::chrono::steady_clock::now();
  ordered_json body;
  if (spec.algo == "exact") {
    require(in.p != nullptr, "exact takes distribution input");
    body = run_exact(spec, in);
  } else if (spec.algo == "combined-distance" || spec.algo == "combined-l2" ||
             spec.algo == "combined-entropy") {
    require(in.p != nullptr, spec.algo + " takes distribution input");
    body = run_combined(spec, in, seed);
  } else if (spec.algo == "delta-test") {
    require(in.p != nullptr, "delta-test takes distribution input");
    body = run_delta_test(spec, in, seed);
  } else if (spec.algo == "f0-entropy") {
    require(in.stream != nullptr, "f0-entropy takes stream input");
    body = run_f0_entropy(spec, *in.stream, seed);
  } else if (spec.algo == "large-small") {
    require(in.stream != nullptr, "large-small takes stream input");
    body = run_large_small(spec, *in.stream, seed);
  } else if (spec.algo == "random-ptas") {
    require(in.stream != nullptr, "random-ptas takes stream input");
    body = run_random_ptas(spec, *in.stream, seed);
  } else if (spec.algo == "oracle-sim-1p" || spec.algo == "oracle-sim-2p") {
    require(in.stream != nullptr, spec.algo + " takes stream input");
    body = run_oracle_sim(spec, *in.stream, seed);
  } else {
    throw sd::ContractError("unknown algo: " + spec.algo);
  }

  ordered_json report;
  report["algo"] = spec.algo;
  for (auto& [key, value] : body.items()) report[key] = std::move(value);
  report["seed"] = seed;
  std::chrono::duration<double, std::milli> wall = std::chrono::steady_clock::now() - start;
  report["wall_ms"] = wall.count();
  return report;
}

uint64_t trial_seed(uint64_t base, uint64_t trial) {
  return trial == 0 ? base : sd::hash3(base, 0x5eed, trial);
}

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw sd::IoError("cannot open for writing: " + out_path);
  out << text;
  if (!out) throw sd::IoError("write failed: " + out_path);
}

// gen-dist

struct GenDistFlags {
  std::string kind;
  uint64_t n = 0;
  uint64_t seed = 0;
  std::string out;
  double s = 1.0;
  double head_mass = 0.9;
  uint64_t item = 0;
  uint64_t hard_k = 12;
  double hard_a = 1.0 / 3.0;
  double eps = kUnset;
  bool far = false;
};

sd::Distribution make_dist(const std::string& kind, uint64_t n, double s,
                           double head_mass, uint64_t item) {
  if (kind == "uniform") return sd::Distribution::uniform(n);
  if (kind == "pointmass") return sd::Distribution::point_mass(n, item);
  if (kind == "dyadic") return sd::Distribution::dyadic(n);
  if (kind == "zipf") return sd::Distribution::zipf(n, s);
  if (kind == "two-block") return sd::Distribution::two_block(n, head_mass);
  throw sd::ContractError("unknown distribution kind: " + kind);
}

uint64_t hard_l1_min_n(uint64_t k, double eps) {
  double blocks = k / eps + k / (3.0 * eps) + k;
  return 1 + static_cast<uint64_t>(std::llround(blocks));
}

int cmd_gen_dist(const GenDistFlags& f) {
  ordered_json summary;
  if (f.kind == "hard-l1") {
    double eps = pick(f.eps, 1.0 / 12.0);
    uint64_t n = f.n ? f.n : hard_l1_min_n(f.hard_k, eps);
    sd::HardInstance inst =
        sd::hard_l1_instance(f.hard_k, eps, f.hard_a, f.far, n, f.seed);
    std::string q_path = f.out + ".q";
    inst.p.save(f.out);
    inst.q.save(q_path);
    summary = {{"wrote", {f.out, q_path}},
               {"n", n},
               {"l1_exact", sd::l1_distance(inst.p, inst.q)},
               {"far", f.far}};
  } else {
    require(f.n >= 1, "gen-dist: --n must be at least 1");
    sd::Distribution d = make_dist(f.kind, f.n, f.s, f.head_mass, f.item);
    d.save(f.out);
    summary = {{"wrote", {f.out}}, {"n", f.n}, {"kind", f.kind}};
  }
  std::cout << summary.dump() << "\n";
  return 0;
}

// gen-stream

struct GenStreamFlags {
  std::string dist_path, dist_q_path;
  uint64_t m = 0;
  uint64_t m_q = 0;
  std::string order = "as-given";
  uint64_t seed = 0;
  std::string out;
};

int cmd_gen_stream(const GenStreamFlags& f) {
  require(f.m >= 1, "gen-stream: --m must be at least 1");
  sd::StreamGenSpec spec{.p = sd::Distribution::load(f.dist_path)};
  if (!f.dist_q_path.empty()) {
    spec.q = sd::Distribution::load(f.dist_q_path);
    require(spec.q->n() == spec.p.n(), "gen-stream: base sizes differ");
    spec.m_q = f.m_q ? f.m_q : f.m;
  }
  spec.m_p = f.m;
  spec.seed = f.seed;
  spec.shuffled = f.order == "shuffled";
  std::vector<sd::StreamToken> tokens = sd::generate_stream(spec);
  sd::write_stream_file(f.out, spec.p.n(), tokens);
  ordered_json summary{{"wrote", f.out},
                       {"n", spec.p.n()},
                       {"m_p", spec.m_p},
                       {"m_q", spec.m_q},
                       {"order", f.order}};
  std::cout << summary.dump() << "\n";
  return 0;
}

// run and exact

struct RunFlags {
  std::string algo;
  std::string dist_path, dist_q_path, stream_path;
  std::string kind;
  std::string order = "as-given";
  uint64_t m = 0;
  double eps = kUnset, eps0 = kUnset, alpha = kUnset, delta = kUnset;
  double lb = 0.0;
  bool tight_tau = false;
  uint64_t seed = 0;
  uint64_t trials = 1;
  std::string out;
};

int cmd_run(const RunFlags& f) {
  require(f.trials >= 1, "run: --trials must be at least 1");
  require(f.stream_path.empty() || f.dist_path.empty(),
          "run: pass either --stream or --dist, not both");

  TrialSpec spec;
  spec.algo = f.algo;
  spec.kind = f.kind;
  spec.order_random = f.order == "shuffled";
  spec.m = f.m;
  spec.eps = f.eps;
  spec.eps0 = f.eps0;
  spec.alpha = f.alpha;
  spec.delta = f.delta;
  spec.lb = f.lb;
  spec.tight_tau = f.tight_tau;

  std::unique_ptr<sd::Distribution> p, q;
  std::unique_ptr<sd::FileStreamSource> stream;
  TrialInputs in;
  if (!f.dist_path.empty()) {
    p = std::make_unique<sd::Distribution>(sd::Distribution::load(f.dist_path));
    in.p = p.get();
    if (!f.dist_q_path.empty()) {
      q = std::make_unique<sd::Distribution>(sd::Distribution::load(f.dist_q_path));
      require(q->n() == p->n(), "run: base sizes differ");
      in.q = q.get();
    }
  }
  if (!f.stream_path.empty()) {
    stream = std::make_unique<sd::FileStreamSource>(f.stream_path);
    in.stream = stream.get();
  }

  std::string text;
  if (f.trials == 1) {
    text = execute_trial(spec, in, f.seed).dump(2) + "\n";
  } else {
    for (uint64_t t = 0; t < f.trials; ++t) {
      if (in.stream) in.stream->rewind();
      text += execute_trial(spec, in, trial_seed(f.seed, t)).dump() + "\n";
    }
  }
  write_text(f.out, text);
  return 0;
}

// sweep

using KvMap = std::map<std::string, std::string>;

struct SweepConfig {
  KvMap base;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sd::IoError("cannot open config: " + path);
  SweepConfig cfg;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    require(eq != std::string::npos,
            "config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    require(!key.empty(), "config line " + std::to_string(lineno) + ": empty key");
    if (key.rfind("axis.", 0) == 0) {
      std::string axis_key = key.substr(5);
      std::vector<std::string> values;
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) values.push_back(item);
      }
      require(!values.empty(),
              "config line " + std::to_string(lineno) + ": empty axis");
      cfg.axes.emplace_back(axis_key, values);
    } else {
      cfg.base[key] = value;
    }
  }
  return cfg;
}

std::string kv_get(const KvMap& kv, const std::string& key, const std::string& dflt) {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : it->second;
}

uint64_t kv_u64(const KvMap& kv, const std::string& key, uint64_t dflt) {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw sd::ContractError("config: " + key + " is not an integer: " + it->second);
  }
}

double kv_f64(const KvMap& kv, const std::string& key, double dflt) {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw sd::ContractError("config: " + key + " is not a number: " + it->second);
  }
}

struct SweepFlags {
  std::string config_path;
  uint64_t workers = 1;
  std::string out;
  // CLI overrides of config keys; applied when set on the command line.
  KvMap overrides;
};

// One cross-product cell plus the trial index, fully resolved.
struct SweepJob {
  uint64_t cell = 0;
  uint64_t trial = 0;
  KvMap params;
};

std::string csv_row_for(const SweepJob& job, const std::vector<std::string>& param_cols,
                        uint64_t sweep_seed) {
  const KvMap& kv = job.params;
  std::string algo = kv_get(kv, "algo", "");
  require(!algo.empty(), "config: algo is required");

  TrialSpec spec;
  spec.algo = algo;
  spec.kind = kv_get(kv, "kind", "");
  spec.order_random = kv_get(kv, "order", "as-given") == "shuffled";
  spec.m = kv_u64(kv, "m", 0);
  spec.eps = kv_f64(kv, "eps", kUnset);
  spec.eps0 = kv_f64(kv, "eps0", kUnset);
  spec.alpha = kv_f64(kv, "alpha", kUnset);
  spec.delta = kv_f64(kv, "delta", kUnset);
  spec.lb = kv_f64(kv, "lb", 0.0);
  spec.tight_tau = kv_u64(kv, "tight_tau", 0) != 0;

  uint64_t cell_seed = sd::hash3(sweep_seed, job.cell + 1, job.trial);
  uint64_t n = kv_u64(kv, "n", 0);

  // Synthesize the inputs this cell asks for.
  std::unique_ptr<sd::Distribution> p, q;
  std::string dist = kv_get(kv, "dist", "uniform");
  if (dist == "hard-l1") {
    double hard_eps = kv_f64(kv, "hard_eps", 1.0 / 12.0);
    uint64_t hard_k = kv_u64(kv, "hard_k", 12);
    double hard_a = kv_f64(kv, "hard_a", 1.0 / 3.0);
    bool far = kv_u64(kv, "far", 0) != 0;
    if (n == 0) n = hard_l1_min_n(hard_k, hard_eps);
    sd::HardInstance inst = sd::hard_l1_instance(
        hard_k, hard_eps, hard_a, far, n, sd::hash3(sweep_seed, job.cell + 1, 0x9a13));
    p = std::make_unique<sd::Distribution>(std::move(inst.p));
    q = std::make_unique<sd::Distribution>(std::move(inst.q));
  } else {
    require(n >= 1, "config: n is required");
    p = std::make_unique<sd::Distribution>(
        make_dist(dist, n, kv_f64(kv, "s", 1.0), kv_f64(kv, "head_mass", 0.9),
                  kv_u64(kv, "item", 0)));
    std::string dist2 = kv_get(kv, "dist2", "");
    if (!dist2.empty())
      q = std::make_unique<sd::Distribution>(
          make_dist(dist2, n, kv_f64(kv, "s2", 1.0), kv_f64(kv, "head_mass2", 0.9),
                    kv_u64(kv, "item2", 0)));
  }

  TrialInputs in;
  in.p = p.get();
  in.q = q.get();

  // Stream algorithms draw a fresh stream per trial from the same spec.
  std::unique_ptr<sd::VectorStreamSource> stream;
  bool needs_stream = algo == "f0-entropy" || algo == "large-small" ||
                      algo == "random-ptas" || algo == "oracle-sim-1p" ||
                      algo == "oracle-sim-2p";
  if (needs_stream) {
    uint64_t m_stream = kv_u64(kv, "m_stream", 0);
    require(m_stream >= 1, "config: m_stream is required for stream algorithms");
    sd::StreamGenSpec gs{.p = *p};
    if (q) {
      gs.q = *q;
      gs.m_q = kv_u64(kv, "m_stream2", m_stream);
    }
    gs.m_p = m_stream;
    gs.seed = sd::hash3(cell_seed, 1, 0);
    gs.shuffled = spec.order_random;
    stream = std::make_unique<sd::VectorStreamSource>(sd::generate_stream(gs), gs.p.n());
    in.stream = stream.get();
    in.p = nullptr;
    in.q = nullptr;
  }

  ordered_json report = execute_trial(spec, in, sd::hash3(cell_seed, 2, 0));

  std::string row;
  for (const std::string& col : param_cols) {
    row += kv_get(kv, col, "");
    row += ',';
  }
  row += std::to_string(job.trial) + ',';
  row += std::to_string(report["seed"].get<uint64_t>()) + ',';
  row += report.contains("estimate") ? fmt_double(report["estimate"].get<double>()) : "";
  row += ',';
  row += report.contains("verdict") ? report["verdict"].get<std::string>() : "";
  row += ',';
  row += report.contains("exact_value") ? fmt_double(report["exact_value"].get<double>()) : "";
  row += ',';
  row += report.contains("rel_error") ? fmt_double(report["rel_error"].get<double>()) : "";
  row += ',';
  row += std::to_string(report["calls"]["total"].get<uint64_t>()) + ',';
  row += std::to_string(report["space_words"].get<uint64_t>());
  return row;
}

int cmd_sweep(const SweepFlags& f) {
  SweepConfig cfg = load_config(f.config_path);
  for (const auto& [key, value] : f.overrides) cfg.base[key] = value;

  uint64_t trials = kv_u64(cfg.base, "trials", 1);
  require(trials >= 1, "config: trials must be at least 1");
  uint64_t sweep_seed = kv_u64(cfg.base, "seed", 0);
  std::string out_path = !f.out.empty() ? f.out : kv_get(cfg.base, "out", "sweep.csv");

  // Materialize the cross product, last axis fastest.
  uint64_t cell_count = 1;
  for (const auto& [key, values] : cfg.axes) cell_count *= values.size();
  std::vector<SweepJob> jobs;
  jobs.reserve(cell_count * trials);
  for (uint64_t c = 0; c < cell_count; ++c) {
    KvMap params = cfg.base;
    uint64_t rest = c;
    for (size_t a = cfg.axes.size(); a-- > 0;) {
      const auto& [key, values] = cfg.axes[a];
      params[key] = values[rest % values.size()];
      rest /= values.size();
    }
    for (uint64_t t = 0; t < trials; ++t) jobs.push_back({c, t, params});
  }

  // Parameter columns: every key that appears in any cell, sorted; seed,
  // trials and out are bookkeeping rather than cell parameters.
  KvMap all_keys = cfg.base;
  for (const auto& [key, values] : cfg.axes) all_keys[key] = "";
  all_keys.erase("seed");
  all_keys.erase("trials");
  all_keys.erase("out");
  all_keys.erase("workers");
  std::vector<std::string> param_cols;
  for (const auto& [key, value] : all_keys) param_cols.push_back(key);

  std::vector<std::string> rows(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<uint64_t> next{0};
  uint64_t workers = std::max<uint64_t>(1, f.workers);
  auto worker = [&] {
    for (;;) {
      uint64_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        rows[j] = csv_row_for(jobs[j], param_cols, sweep_seed);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (uint64_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  std::string text;
  for (const std::string& col : param_cols) text += col + ',';
  text += "trial,seed,estimate,verdict,exact,rel_err,calls,space_words\n";
  for (const std::string& row : rows) text += row + '\n';
  write_text(out_path, text);

  ordered_json summary{{"wrote", out_path},
                       {"cells", cell_count},
                       {"trials", trials},
                       {"rows", jobs.size()}};
  std::cout << summary.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming and sampling estimators for entropy and divergences"};
  app.require_subcommand(1);

  GenDistFlags gd;
  CLI::App* gen_dist = app.add_subcommand("gen-dist", "write a distribution file");
  gen_dist->add_option("--kind", gd.kind,
                       "uniform|pointmass|dyadic|zipf|two-block|hard-l1")
      ->required();
  gen_dist->add_option("--n", gd.n, "base set size (hard-l1: 0 picks the minimum)");
  gen_dist->add_option("--seed", gd.seed, "relabeling seed (hard-l1)");
  gen_dist->add_option("--out", gd.out, "output path")->required();
  gen_dist->add_option("--s", gd.s, "zipf exponent");
  gen_dist->add_option("--head-mass", gd.head_mass, "two-block head mass");
  gen_dist->add_option("--item", gd.item, "pointmass location");
  gen_dist->add_option("--hard-k", gd.hard_k, "hard-l1 block parameter");
  gen_dist->add_option("--hard-a", gd.hard_a, "hard-l1 scale, l1 = a or a(1+3 eps)");
  gen_dist->add_option("--eps", gd.eps, "hard-l1 gap (default 1/12)");
  gen_dist->add_flag("--far", gd.far, "hard-l1: write the far pair");

  GenStreamFlags gs;
  CLI::App* gen_stream = app.add_subcommand("gen-stream", "draw a token stream");
  gen_stream->add_option("--dist", gs.dist_path, "distribution file")->required();
  gen_stream->add_option("--dist-q", gs.dist_q_path, "second target distribution");
  gen_stream->add_option("--m", gs.m, "tokens to draw")->required();
  gen_stream->add_option("--m-q", gs.m_q, "tokens for the second target (default --m)");
  gen_stream->add_option("--order", gs.order, "as-given|shuffled")
      ->check(CLI::IsMember({"as-given", "shuffled"}));
  gen_stream->add_option("--seed", gs.seed, "draw and shuffle seed");
  gen_stream->add_option("--out", gs.out, "output path")->required();

  RunFlags rf;
  CLI::App* run = app.add_subcommand("run", "execute one algorithm, report JSON");
  run->add_option("--algo", rf.algo,
                  "delta-test|combined-distance|combined-entropy|combined-l2|"
                  "f0-entropy|large-small|random-ptas|oracle-sim-1p|oracle-sim-2p|exact")
      ->required();
  run->add_option("--dist", rf.dist_path, "distribution file");
  run->add_option("--dist-q", rf.dist_q_path, "second distribution file");
  run->add_option("--stream", rf.stream_path, "stream file");
  run->add_option("--kind", rf.kind, "divergence: l1|l2sq|hellinger|js|triangle|kl");
  run->add_option("--order", rf.order, "declared stream order: as-given|shuffled")
      ->check(CLI::IsMember({"as-given", "shuffled"}));
  run->add_option("--m", rf.m, "sample budget / call budget (0 = formula count)");
  run->add_option("--eps", rf.eps, "accuracy parameter");
  run->add_option("--eps0", rf.eps0, "distinct-count sketch accuracy");
  run->add_option("--alpha", rf.alpha, "heaviness exponent");
  run->add_option("--delta", rf.delta, "failure probability");
  run->add_option("--lb", rf.lb, "lower-bound hint (0 = geometric halving)");
  run->add_flag("--tight-tau", rf.tight_tau, "use the tight divergence bound");
  run->add_option("--seed", rf.seed, "base seed");
  run->add_option("--trials", rf.trials, "repeat with derived seeds, JSONL output");
  run->add_option("--out", rf.out, "write report(s) here instead of stdout");

  RunFlags ef;
  ef.algo = "exact";
  CLI::App* exact = app.add_subcommand("exact", "ground-truth value of an input");
  exact->add_option("--dist", ef.dist_path, "distribution file")->required();
  exact->add_option("--dist-q", ef.dist_q_path, "second distribution file");
  exact->add_option("--kind", ef.kind, "divergence kind for a pair");
  exact->add_option("--out", ef.out, "write the report here instead of stdout");

  SweepFlags sf;
  std::map<std::string, std::string> sweep_cli;
  CLI::App* sweep = app.add_subcommand("sweep", "cross-product of cells to CSV");
  sweep->add_option("--config", sf.config_path, "flat key = value file")->required();
  sweep->add_option("--workers", sf.workers, "concurrent cells");
  sweep->add_option("--out", sf.out, "CSV path (overrides config)");
  for (const char* key : {"n", "m", "m_stream", "eps", "eps0", "alpha", "delta",
                          "lb", "kind", "order", "seed", "trials", "algo", "dist"}) {
    sweep
        ->add_option_function<std::string>(
            std::string("--") + key,
            [&sweep_cli, key](const std::string& v) { sweep_cli[key] = v; },
            std::string("override config key ") + key)
        ->type_name("TEXT");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; anything else is a contract violation.
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen_dist->parsed()) return cmd_gen_dist(gd);
    if (gen_stream->parsed()) return cmd_gen_stream(gs);
    if (run->parsed()) return cmd_run(rf);
    if (exact->parsed()) return cmd_run(ef);
    if (sweep->parsed()) {
      sf.overrides = sweep_cli;
      return cmd_sweep(sf);
    }
  } catch (const sd::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const sd::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
