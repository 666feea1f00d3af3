#pragma once

#include <cstdint>
#include <string>

#include "streamdist/distribution.hpp"

namespace streamdist {

//! Absolute tolerance used by the exactness tests on closed-form values.
inline constexpr double kDivergenceTol = 1e-9;

//! D_f(p,q) = sum_i p_i f(q_i/p_i) for a convex f with f(1) = 0. All kinds
//! use natural log; entropy alone is in bits. L2Squared is not an
//! f-divergence and is special-cased where it appears.
enum class DivergenceKind { kL1, kL2Squared, kHellinger, kJensenShannon, kTriangle, kKL };

//! Symmetric in (p, q). True for all kinds except KL.
bool is_symmetric(DivergenceKind kind);
//! Has max{f(0+), lim f(u)/u} finite, hence g <= tau on [0,1].
bool is_bounded(DivergenceKind kind);

//! The paper-facing bound tau = 2 shared by the four bounded kinds.
double divergence_tau(DivergenceKind kind);
//! The tight bound max{f(0+), lim f(u)/u}: 1 for L1/Hellinger/Triangle,
//! ln 2 for Jensen-Shannon. Using it only shrinks sample counts.
double divergence_tau_tight(DivergenceKind kind);

//! f(u) for u > 0. Rejects L2Squared (no generating f).
double f_value(DivergenceKind kind, double u);
//! lim_{u->0+} f(u).
double f_at_zero(DivergenceKind kind);
//! lim_{u->inf} f(u)/u (+inf for KL).
double f_slope_at_infinity(DivergenceKind kind);
//! g(x) = (f(x) + x f(1/x)) / 2 for x >= 0, with g(0) taken as the limit.
//! Defined for the bounded symmetric kinds only.
double g_value(DivergenceKind kind, double x);

//! Entropy in bits: sum p_i log2(1/p_i), zero terms skipped.
double entropy_exact(const Distribution& p);

//! Direct evaluation of D_f with the limit conventions:
//!   p_i = q_i = 0        -> 0
//!   p_i > 0, q_i = 0     -> p_i * f(0+)
//!   p_i = 0, q_i > 0     -> q_i * lim f(u)/u   (+inf sentinel for KL)
//! L2Squared evaluates sum (p_i - q_i)^2.
double divergence_exact(DivergenceKind kind, const Distribution& p, const Distribution& q);

//! Two-sided decomposition sum_{p_i>q_i} p_i g(x) + sum_{q_i>p_i} q_i g(1/x)
//! with x = q_i/p_i. Equals divergence_exact for the bounded symmetric kinds.
double divergence_via_g(DivergenceKind kind, const Distribution& p, const Distribution& q);

//! Maximum entropy a set of set_size items with total mass `mass` can
//! contribute: mass * log2(set_size / mass), 0 when mass = 0.
double tail_entropy_bound(double mass, uint64_t set_size);

//! Smallest m with 2 exp(-epsilon^2 mean_lb m / (3 range_u)) <= delta: the
//! iteration count that makes a sum of independent [0, range_u] increments
//! with mean >= mean_lb concentrate to (1 +- epsilon) with confidence delta.
uint64_t required_samples(double epsilon, double delta, double mean_lb, double range_u);

double l1_distance(const Distribution& p, const Distribution& q);
double l2_distance(const Distribution& p, const Distribution& q);
double l2_squared(const Distribution& p, const Distribution& q);
double linf_mass(const Distribution& p);

std::string divergence_name(DivergenceKind kind);
//! Parses the names emitted by divergence_name ("l1", "l2sq", "hellinger",
//! "js", "triangle", "kl").
DivergenceKind divergence_from_name(const std::string& name);

}  // namespace streamdist
