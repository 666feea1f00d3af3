#include "streamdist/divergence.hpp"

#include <cmath>
#include <limits>

#include "streamdist/errors.hpp"

namespace streamdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_base(const Distribution& p, const Distribution& q) {
  if (p.n() != q.n())
    throw ContractError("divergence: distributions have different base sizes");
}

}  // namespace

bool is_symmetric(DivergenceKind kind) { return kind != DivergenceKind::kKL; }

bool is_bounded(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::kL1:
    case DivergenceKind::kHellinger:
    case DivergenceKind::kJensenShannon:
    case DivergenceKind::kTriangle:
      return true;
    default:
      return false;
  }
}

double divergence_tau(DivergenceKind kind) {
  if (!is_bounded(kind)) throw ContractError("tau: kind is not bounded");
  return 2.0;
}

double divergence_tau_tight(DivergenceKind kind) {
  if (!is_bounded(kind)) throw ContractError("tau: kind is not bounded");
  return kind == DivergenceKind::kJensenShannon ? std::log(2.0) : 1.0;
}

double f_value(DivergenceKind kind, double u) {
  if (!(u > 0.0)) throw ContractError("f_value: argument must be positive");
  switch (kind) {
    case DivergenceKind::kL1:
      return std::fabs(u - 1.0);
    case DivergenceKind::kHellinger: {
      double d = std::sqrt(u) - 1.0;
      return d * d;
    }
    case DivergenceKind::kJensenShannon:
      return std::log(2.0 / (1.0 + u)) + u * std::log(2.0 * u / (1.0 + u));
    case DivergenceKind::kTriangle: {
      double d = u - 1.0;
      return d * d / (u + 1.0);
    }
    case DivergenceKind::kKL:
      return u * std::log(u);
    case DivergenceKind::kL2Squared:
      throw ContractError("f_value: L2Squared has no generating f");
  }
  throw ContractError("f_value: unknown kind");
}

double f_at_zero(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::kL1:
    case DivergenceKind::kHellinger:
    case DivergenceKind::kTriangle:
      return 1.0;
    case DivergenceKind::kJensenShannon:
      return std::log(2.0);
    case DivergenceKind::kKL:
      return 0.0;  // u ln u -> 0
    case DivergenceKind::kL2Squared:
      throw ContractError("f_at_zero: L2Squared has no generating f");
  }
  throw ContractError("f_at_zero: unknown kind");
}

double f_slope_at_infinity(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::kL1:
    case DivergenceKind::kHellinger:
    case DivergenceKind::kTriangle:
      return 1.0;
    case DivergenceKind::kJensenShannon:
      return std::log(2.0);
    case DivergenceKind::kKL:
      return kInf;
    case DivergenceKind::kL2Squared:
      throw ContractError("f_slope_at_infinity: L2Squared has no generating f");
  }
  throw ContractError("f_slope_at_infinity: unknown kind");
}

double g_value(DivergenceKind kind, double x) {
  if (!is_bounded(kind) || !is_symmetric(kind))
    throw ContractError("g_value: kind must be bounded and symmetric");
  if (!(x >= 0.0)) throw ContractError("g_value: argument must be non-negative");
  if (x == 0.0) return 0.5 * (f_at_zero(kind) + f_slope_at_infinity(kind));
  return 0.5 * (f_value(kind, x) + x * f_value(kind, 1.0 / x));
}

double entropy_exact(const Distribution& p) {
  double h = 0.0;
  for (double pi : p.probs())
    if (pi > 0.0) h += pi * std::log2(1.0 / pi);
  return h;
}

double divergence_exact(DivergenceKind kind, const Distribution& p, const Distribution& q) {
  require_same_base(p, q);
  if (kind == DivergenceKind::kL2Squared) return l2_squared(p, q);
  double sum = 0.0;
  for (uint64_t i = 0; i < p.n(); ++i) {
    double pi = p[i], qi = q[i];
    if (pi == 0.0 && qi == 0.0) continue;
    if (qi == 0.0) {
      sum += pi * f_at_zero(kind);
    } else if (pi == 0.0) {
      double slope = f_slope_at_infinity(kind);
      if (slope == kInf) return kInf;  // KL(p,q) with q_i > 0 = p_i
      sum += qi * slope;
    } else {
      sum += pi * f_value(kind, qi / pi);
    }
  }
  return sum;
}

double divergence_via_g(DivergenceKind kind, const Distribution& p, const Distribution& q) {
  if (!is_symmetric(kind) || !is_bounded(kind))
    throw ContractError("divergence_via_g: kind must be bounded and symmetric");
  require_same_base(p, q);
  double sum = 0.0;
  for (uint64_t i = 0; i < p.n(); ++i) {
    double pi = p[i], qi = q[i];
    if (pi > qi)
      sum += pi * g_value(kind, qi / pi);
    else if (qi > pi)
      sum += qi * g_value(kind, pi / qi);
  }
  return sum;
}

double tail_entropy_bound(double mass, uint64_t set_size) {
  if (!(mass >= 0.0 && mass <= 1.0))
    throw ContractError("tail_entropy_bound: mass must lie in [0, 1]");
  if (set_size == 0) throw ContractError("tail_entropy_bound: set_size must be positive");
  if (mass == 0.0) return 0.0;
  return mass * std::log2(static_cast<double>(set_size) / mass);
}

uint64_t required_samples(double epsilon, double delta, double mean_lb, double range_u) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw ContractError("required_samples: epsilon must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 2.0))
    throw ContractError("required_samples: delta must lie in (0, 2)");
  if (!(mean_lb > 0.0) || !(range_u > 0.0))
    throw ContractError("required_samples: mean_lb and range_u must be positive");
  double rate = epsilon * epsilon * mean_lb / (3.0 * range_u);
  auto bound_ok = [&](uint64_t m) {
    return 2.0 * std::exp(-rate * static_cast<double>(m)) <= delta;
  };
  auto m = static_cast<uint64_t>(std::ceil(std::log(2.0 / delta) / rate));
  if (m == 0) m = 1;
  // ceil() can land one off either way at representation edges; settle on
  // the smallest m satisfying the bound itself
  while (m > 1 && bound_ok(m - 1)) --m;
  while (!bound_ok(m)) ++m;
  return m;
}

double l1_distance(const Distribution& p, const Distribution& q) {
  require_same_base(p, q);
  double sum = 0.0;
  for (uint64_t i = 0; i < p.n(); ++i) sum += std::fabs(p[i] - q[i]);
  return sum;
}

double l2_squared(const Distribution& p, const Distribution& q) {
  require_same_base(p, q);
  double sum = 0.0;
  for (uint64_t i = 0; i < p.n(); ++i) {
    double d = p[i] - q[i];
    sum += d * d;
  }
  return sum;
}

double l2_distance(const Distribution& p, const Distribution& q) {
  return std::sqrt(l2_squared(p, q));
}

double linf_mass(const Distribution& p) {
  double best = 0.0;
  for (double pi : p.probs()) best = std::max(best, pi);
  return best;
}

std::string divergence_name(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::kL1: return "l1";
    case DivergenceKind::kL2Squared: return "l2sq";
    case DivergenceKind::kHellinger: return "hellinger";
    case DivergenceKind::kJensenShannon: return "js";
    case DivergenceKind::kTriangle: return "triangle";
    case DivergenceKind::kKL: return "kl";
  }
  throw ContractError("divergence_name: unknown kind");
}

DivergenceKind divergence_from_name(const std::string& name) {
  if (name == "l1") return DivergenceKind::kL1;
  if (name == "l2sq") return DivergenceKind::kL2Squared;
  if (name == "hellinger") return DivergenceKind::kHellinger;
  if (name == "js") return DivergenceKind::kJensenShannon;
  if (name == "triangle") return DivergenceKind::kTriangle;
  if (name == "kl") return DivergenceKind::kKL;
  throw ContractError("unknown divergence kind: " + name);
}

}  // namespace streamdist
