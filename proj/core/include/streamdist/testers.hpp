#pragma once

#include <cstdint>

#include "streamdist/divergence.hpp"
#include "streamdist/oracle.hpp"

namespace streamdist {

//! Output of a sampling estimator together with what it cost.
struct EstimateReport {
  double estimate = 0.0;
  uint64_t iterations = 0;  // of the final run when auto mode re-runs
  CallTrace calls;          // cumulative oracle trace snapshot
};

//! Multiplier inside the heavy-phase sample count. Calibrated once against
//! the closeness-tester endpoint experiments and frozen; the strict
//! per-item accuracy property is demonstrated in tests with a much larger
//! multiplier (see test_testers.cpp).
inline constexpr double kHeavyPhaseConst = 1.0;

//! Leading constant of the collision tester's per-run sample count,
//! calibrated once against the endpoint cases (pass at l2 = eps/2, fail at
//! l2 = eps) and frozen.
inline constexpr double kL2TesterConst = 1.0;

//! Per-distribution samples for the empirical heavy-index phase:
//! ceil(multiplier * ln(2/delta) * n^alpha * log2(n) / gamma^2).
uint64_t heavy_phase_sample_count(uint64_t n, double gamma, double alpha,
                                  double delta, double multiplier = kHeavyPhaseConst);

//! Majority-vote repetitions that boost a 1/6-error run to confidence delta.
uint64_t l2_test_run_count(double delta);
//! Samples per distribution per run: ceil(kL2TesterConst (b^2 + eps^2 sqrt(b)) / eps^4).
uint64_t l2_test_per_run_samples(double epsilon, double b);
//! Total samples per distribution: run count times per-run samples.
uint64_t l2_test_sample_count(double epsilon, double delta, double b);

//! Collision-count closeness tester: passes with probability >= 1 - delta
//! when l2(p,q) <= epsilon/2 and with probability < delta when
//! l2(p,q) >= epsilon. b_hint must upper-bound every p_i and q_i.
bool l2_closeness_test(Oracle& oracle, double epsilon, double delta, double b_hint);

struct DeltaTestParams {
  double epsilon = 0.1;      // gap parameter of the triangle-divergence test
  double alpha = 2.0 / 3.0;  // heaviness exponent in (0, 1)
  double delta = 0.05;       // failure probability
  uint64_t m = 0;            // per-distribution samples; 0 = formula count
};

//! Generative two-phase closeness test for the triangle divergence:
//! empirical chi-square statistic over heavy indices, then the collision
//! tester at epsilon/(2 sqrt(n)) on the heavy-filtered distributions.
//! Passes whp when Delta <= eps^2/n^(1-alpha), fails whp when Delta >= eps.
//! rng drives the uniform remapping of heavy indices.
bool delta_test(Oracle& oracle, const DeltaTestParams& params, SplitMix64& rng);

struct CombinedParams {
  double epsilon = 0.1;
  double delta = 0.05;
  //! Lower-bound hint on the target quantity (divergence value, squared l2
  //! distance, or entropy in bits). 0 selects geometric halving: run with a
  //! guess, halve it whenever the estimate falls below half the guess.
  double lower_bound = 0.0;
  //! Explicit iteration count; overrides the formula when nonzero.
  uint64_t m_override = 0;
  //! Use max{f(0+), lim f(u)/u} instead of tau = 2 (smaller sample counts).
  bool use_tight_tau = false;
  //! Auto mode stops halving once the next run would exceed this many
  //! iterations, so an identically-zero target cannot loop forever.
  uint64_t max_auto_iterations = 2'000'000;
};

//! Sample-and-probe estimator of a bounded symmetric divergence: each
//! iteration draws i from p and j from q, contributes g(q_i/p_i) on the
//! p-branch when q_i < p_i and g(p_j/q_j) on the q-branch when p_j < q_j,
//! both normalized into [0, 1] by 2 tau. (1 +- epsilon)-estimate whp at the
//! formula iteration count.
EstimateReport combined_distance_estimate(Oracle& oracle, DivergenceKind kind,
                                          const CombinedParams& params);

//! Same loop shape for the squared l2 distance, with increments
//! (p_i - q_i)^2 / p_i and (q_j - p_j)^2 / q_j.
EstimateReport combined_l2_estimate(Oracle& oracle, const CombinedParams& params);

//! Sample-and-probe entropy estimator: contributes log2(1/p_i) per draw,
//! zero when p_i < n^-3; the discarded tail costs at most eps * H. Exact on
//! uniform inputs (every increment is identical).
EstimateReport combined_entropy_estimate(Oracle& oracle, const CombinedParams& params);

//! Pair of distributions at exactly known l1 distance: a head item plus a
//! block of k/epsilon equal atoms, the q-block shifted by r positions.
//! Distinguishing near from far instances requires Omega(1/(eps^2 a))
//! oracle calls, which the acceptance suite demonstrates empirically.
struct HardInstance {
  Distribution p;
  Distribution q;
  double a;        // scale: l1 = a (near) or a(1+3 eps) (far)
  uint64_t k;      // block parameter
  double epsilon;  // gap
  uint64_t r;      // shift actually applied
};

//! far=false shifts the atom block by k/(3 eps), far=true by k/(3 eps)+k.
//! Requires k/eps and k/(3 eps) integral, 0 < a <= 2/3, and
//! n >= 1 + k/eps + k/(3 eps) + k. permute_seed hides the structure by
//! relabeling both bases with one shared permutation.
HardInstance hard_l1_instance(uint64_t k, double epsilon, double a, bool far,
                              uint64_t n, uint64_t permute_seed);

}  // namespace streamdist
