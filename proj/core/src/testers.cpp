#include "streamdist/testers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "streamdist/errors.hpp"

namespace streamdist {

namespace {

//! Increments may exceed their unit range only by accumulated rounding.
constexpr double kIncrementSlack = 1e-12;

void check_increment(double inc) {
  if (!(inc >= -kIncrementSlack && inc <= 1.0 + kIncrementSlack))
    throw std::logic_error("estimator increment left [0, 1]; internal fault");
}

double checked_probe_of_sample(Oracle& oracle, Target which, uint64_t i) {
  double v = oracle.probe(which, i);
  if (!(v > 0.0))
    throw std::logic_error("probe of a sampled item returned zero mass; internal fault");
  return v;
}

//! Shared control flow of the combined estimators: explicit lower bound,
//! explicit iteration count, or geometric halving of an upper-bound guess.
template <typename CountFn, typename RunFn>
EstimateReport estimate_with_hint(Oracle& oracle, const CombinedParams& params,
                                  double initial_guess, CountFn iterations_for,
                                  RunFn run) {
  EstimateReport rep;
  if (params.m_override > 0) {
    rep.iterations = params.m_override;
    rep.estimate = run(params.m_override);
  } else if (params.lower_bound > 0.0) {
    rep.iterations = iterations_for(params.lower_bound);
    rep.estimate = run(rep.iterations);
  } else {
    double guess = initial_guess;
    for (;;) {
      uint64_t m = iterations_for(guess);
      if (m > params.max_auto_iterations) m = params.max_auto_iterations;
      rep.iterations = m;
      rep.estimate = run(m);
      if (rep.estimate >= guess / 2.0) break;
      if (m >= params.max_auto_iterations) break;  // cannot refine further
      guess /= 2.0;
    }
  }
  rep.calls = oracle.trace();
  return rep;
}

}  // namespace

uint64_t heavy_phase_sample_count(uint64_t n, double gamma, double alpha,
                                  double delta, double multiplier) {
  if (n < 2) throw ContractError("heavy_phase_sample_count: need n >= 2");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ContractError("heavy_phase_sample_count: gamma must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ContractError("heavy_phase_sample_count: alpha must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw ContractError("heavy_phase_sample_count: delta must lie in (0, 1)");
  double nd = static_cast<double>(n);
  double m = multiplier * std::log(2.0 / delta) * std::pow(nd, alpha) *
             std::log2(nd) / (gamma * gamma);
  return static_cast<uint64_t>(std::ceil(m));
}

uint64_t l2_test_run_count(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw ContractError("l2_test_run_count: delta must lie in (0, 1)");
  // majority vote over runs that each err with probability <= 1/6;
  // exp(-r KL(1/2 || 1/6)) <= delta at r = 3.4 ln(1/delta)
  auto r = static_cast<uint64_t>(std::ceil(3.4 * std::log(1.0 / delta)));
  if (r < 1) r = 1;
  if (r % 2 == 0) ++r;
  return r;
}

uint64_t l2_test_per_run_samples(double epsilon, double b) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw ContractError("l2_test_per_run_samples: epsilon must lie in (0, 1]");
  if (!(b > 0.0 && b <= 1.0))
    throw ContractError("l2_test_per_run_samples: b must lie in (0, 1]");
  double e2 = epsilon * epsilon;
  double s = kL2TesterConst * (b * b + e2 * std::sqrt(b)) / (e2 * e2);
  auto count = static_cast<uint64_t>(std::ceil(s));
  return std::max<uint64_t>(count, 2);  // collision statistic needs pairs
}

uint64_t l2_test_sample_count(double epsilon, double delta, double b) {
  return l2_test_run_count(delta) * l2_test_per_run_samples(epsilon, b);
}

bool l2_closeness_test(Oracle& oracle, double epsilon, double delta, double b_hint) {
  if (!oracle.has_two_targets())
    throw ContractError("l2_closeness_test: needs two distributions");
  const uint64_t n = oracle.base_size();
  const uint64_t runs = l2_test_run_count(delta);
  const uint64_t s = l2_test_per_run_samples(epsilon, b_hint);
  const double threshold = 0.75 * epsilon * epsilon;

  std::vector<uint32_t> cp(n), cq(n);
  std::vector<uint64_t> touched;
  touched.reserve(2 * s);
  uint64_t passes = 0;
  for (uint64_t run = 0; run < runs; ++run) {
    touched.clear();
    for (uint64_t k = 0; k < s; ++k) {
      uint64_t i = oracle.sample(Target::kP);
      if (cp[i] == 0 && cq[i] == 0) touched.push_back(i);
      ++cp[i];
      uint64_t j = oracle.sample(Target::kQ);
      if (cp[j] == 0 && cq[j] == 0) touched.push_back(j);
      ++cq[j];
    }
    // Z is an unbiased estimate of l2^2: within-sample collisions estimate
    // |p|^2 + |q|^2, cross collisions estimate 2 <p, q>
    double self_pairs = 0.0, cross_pairs = 0.0;
    for (uint64_t i : touched) {
      double a = cp[i], b = cq[i];
      self_pairs += 0.5 * (a * (a - 1.0) + b * (b - 1.0));
      cross_pairs += a * b;
      cp[i] = 0;
      cq[i] = 0;
    }
    double sd = static_cast<double>(s);
    double z = self_pairs / (0.5 * sd * (sd - 1.0)) - 2.0 * cross_pairs / (sd * sd);
    if (z <= threshold) ++passes;
  }
  return 2 * passes > runs;
}

namespace {

//! Resamples heavy indices uniformly over [n]; the light remainder passes
//! through. Exactly the filtered-distribution step of the closeness test.
class HeavyFilteredOracle : public Oracle {
 public:
  HeavyFilteredOracle(Oracle& inner, const std::vector<char>& heavy, SplitMix64& rng)
      : inner_(inner), heavy_(heavy), rng_(rng) {}

  uint64_t base_size() const override { return inner_.base_size(); }
  bool has_two_targets() const override { return inner_.has_two_targets(); }

  uint64_t sample(Target which) override {
    uint64_t i = inner_.sample(which);
    return heavy_[i] ? rng_.next_below(inner_.base_size()) : i;
  }

  double probe(Target which, uint64_t i) override { return inner_.probe(which, i); }

 private:
  Oracle& inner_;
  const std::vector<char>& heavy_;
  SplitMix64& rng_;
};

}  // namespace

bool delta_test(Oracle& oracle, const DeltaTestParams& params, SplitMix64& rng) {
  if (!oracle.has_two_targets())
    throw ContractError("delta_test: needs two distributions");
  const uint64_t n = oracle.base_size();
  const uint64_t formula_m =
      heavy_phase_sample_count(n, params.epsilon, params.alpha, params.delta);
  uint64_t m = params.m;
  if (m == 0) {
    m = formula_m;
  } else if (m < formula_m) {
    throw ContractError("delta_test: m below the heavy-phase sample count");
  }

  std::vector<uint32_t> np(n, 0), nq(n, 0);
  for (uint64_t k = 0; k < m; ++k) {
    ++np[oracle.sample(Target::kP)];
    ++nq[oracle.sample(Target::kQ)];
  }

  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double heavy_count = md * std::pow(nd, -params.alpha);
  std::vector<char> heavy(n, 0);
  double stat = 0.0;
  for (uint64_t i = 0; i < n; ++i) {
    if (std::max(np[i], nq[i]) < heavy_count) continue;
    heavy[i] = 1;
    double pt = np[i] / md, qt = nq[i] / md;
    stat += (pt - qt) * (pt - qt) / (pt + qt);
  }
  if (stat > params.epsilon / 10.0) return false;

  // the filtered distributions are near-uniformly light: every heavy index
  // is spread over [n], so their max mass is below n^-alpha (1+eps) + 1/n
  double b_hint = std::pow(nd, -params.alpha) * (1.0 + params.epsilon) + 1.0 / nd;
  HeavyFilteredOracle filtered(oracle, heavy, rng);
  return l2_closeness_test(filtered, params.epsilon / (2.0 * std::sqrt(nd)),
                           params.delta, std::min(b_hint, 1.0));
}

EstimateReport combined_distance_estimate(Oracle& oracle, DivergenceKind kind,
                                          const CombinedParams& params) {
  if (!is_symmetric(kind) || !is_bounded(kind))
    throw ContractError("combined_distance_estimate: kind must be bounded and symmetric");
  if (!oracle.has_two_targets())
    throw ContractError("combined_distance_estimate: needs two distributions");
  const double tau =
      params.use_tight_tau ? divergence_tau_tight(kind) : divergence_tau(kind);

  auto iterations_for = [&](double lb) {
    return required_samples(params.epsilon, params.delta, lb / (2.0 * tau), 1.0);
  };
  auto run = [&](uint64_t m) {
    long double acc = 0.0L;
    for (uint64_t k = 0; k < m; ++k) {
      uint64_t i = oracle.sample(Target::kP);
      double pi = checked_probe_of_sample(oracle, Target::kP, i);
      double qi = oracle.probe(Target::kQ, i);
      double a = qi < pi ? g_value(kind, qi / pi) : 0.0;

      uint64_t j = oracle.sample(Target::kQ);
      double pj = oracle.probe(Target::kP, j);
      double qj = checked_probe_of_sample(oracle, Target::kQ, j);
      double b = pj < qj ? g_value(kind, pj / qj) : 0.0;

      double inc = (a + b) / (2.0 * tau);
      check_increment(inc);
      acc += inc;
    }
    return 2.0 * tau * static_cast<double>(acc) / static_cast<double>(m);
  };
  return estimate_with_hint(oracle, params, tau, iterations_for, run);
}

EstimateReport combined_l2_estimate(Oracle& oracle, const CombinedParams& params) {
  if (!oracle.has_two_targets())
    throw ContractError("combined_l2_estimate: needs two distributions");

  auto iterations_for = [&](double lb) {
    return required_samples(params.epsilon, params.delta, lb / 2.0, 1.0);
  };
  auto run = [&](uint64_t m) {
    long double acc = 0.0L;
    for (uint64_t k = 0; k < m; ++k) {
      uint64_t i = oracle.sample(Target::kP);
      double pi = checked_probe_of_sample(oracle, Target::kP, i);
      double qi = oracle.probe(Target::kQ, i);
      double a = qi < pi ? (pi - qi) * (pi - qi) / pi : 0.0;

      uint64_t j = oracle.sample(Target::kQ);
      double pj = oracle.probe(Target::kP, j);
      double qj = checked_probe_of_sample(oracle, Target::kQ, j);
      double b = pj < qj ? (qj - pj) * (qj - pj) / qj : 0.0;

      double inc = 0.5 * (a + b);
      check_increment(inc);
      acc += inc;
    }
    return 2.0 * static_cast<double>(acc) / static_cast<double>(m);
  };
  // the squared distance never exceeds 2 (disjoint point masses)
  return estimate_with_hint(oracle, params, 2.0, iterations_for, run);
}

EstimateReport combined_entropy_estimate(Oracle& oracle, const CombinedParams& params) {
  const uint64_t n = oracle.base_size();
  if (n == 1) {
    // a single-item base has zero entropy and the estimator no work
    EstimateReport rep;
    rep.calls = oracle.trace();
    return rep;
  }
  const double log2n = std::log2(static_cast<double>(n));
  const double cutoff = std::pow(static_cast<double>(n), -3.0);

  auto iterations_for = [&](double lb_bits) {
    return required_samples(params.epsilon / 2.0, params.delta,
                            lb_bits / (3.0 * log2n), 1.0);
  };
  auto run = [&](uint64_t m) {
    // accumulate log2(1/p_i) directly: the normalized increment
    // log2(1/p_i)/(3 log2 n) is still range-checked, but summing in log
    // units keeps integer-valued logs exact (uniform inputs return log2 n
    // with no rounding at all)
    long double raw = 0.0L;
    for (uint64_t k = 0; k < m; ++k) {
      uint64_t i = oracle.sample(Target::kP);
      double pi = checked_probe_of_sample(oracle, Target::kP, i);
      if (pi < cutoff) continue;
      double term = std::log2(1.0 / pi);
      check_increment(term / (3.0 * log2n));
      raw += term;
    }
    return static_cast<double>(raw) / static_cast<double>(m);
  };
  return estimate_with_hint(oracle, params, log2n, iterations_for, run);
}

HardInstance hard_l1_instance(uint64_t k, double epsilon, double a, bool far,
                              uint64_t n, uint64_t permute_seed) {
  if (!(a > 0.0 && a <= 2.0 / 3.0))
    throw ContractError("hard_l1_instance: need 0 < a <= 2/3");
  if (!(epsilon > 0.0 && epsilon <= 2.0 / 3.0))
    throw ContractError("hard_l1_instance: need 0 < epsilon <= 2/3");
  if (k == 0) throw ContractError("hard_l1_instance: need k >= 1");
  double block_d = static_cast<double>(k) / epsilon;
  double near_d = block_d / 3.0;
  auto block = static_cast<uint64_t>(std::llround(block_d));
  auto r_near = static_cast<uint64_t>(std::llround(near_d));
  if (std::fabs(block_d - static_cast<double>(block)) > 1e-9 ||
      std::fabs(near_d - static_cast<double>(r_near)) > 1e-9)
    throw ContractError("hard_l1_instance: k/epsilon and k/(3 epsilon) must be integral");
  if (n < 1 + block + r_near + k)
    throw ContractError("hard_l1_instance: n too small for the shifted block");

  uint64_t r = far ? r_near + k : r_near;
  double head = 1.0 - 1.5 * a;
  double atom = 1.5 * a * epsilon / static_cast<double>(k);

  std::vector<double> p(n, 0.0), q(n, 0.0);
  p[0] = head;
  q[0] = head;
  for (uint64_t i = 1; i <= block; ++i) {
    p[i] = atom;
    q[i + r] = atom;
  }

  // one hidden relabeling applied to both bases
  std::vector<uint64_t> perm(n);
  for (uint64_t i = 0; i < n; ++i) perm[i] = i;
  SplitMix64 rng(permute_seed);
  for (uint64_t i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.next_below(i + 1)]);
  std::vector<double> pp(n), qq(n);
  for (uint64_t i = 0; i < n; ++i) {
    pp[perm[i]] = p[i];
    qq[perm[i]] = q[i];
  }
  return HardInstance{Distribution(std::move(pp)), Distribution(std::move(qq)),
                      a, k, epsilon, r};
}

}  // namespace streamdist
