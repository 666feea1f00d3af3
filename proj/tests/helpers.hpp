#pragma once

#include <cmath>
#include <limits>
#include <vector>

// Brute-force reference implementations, written from the closed forms
// rather than the library's generator-function route so the two can
// disagree if either is wrong.
namespace ref {

inline double l1(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return s;
}

inline double hellinger(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    s += d * d;
  }
  return s;
}

inline double triangle(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] + q[i] == 0) continue;
    double d = p[i] - q[i];
    s += d * d / (p[i] + q[i]);
  }
  return s;
}

inline double js_nats(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) s += p[i] * std::log(2.0 * p[i] / (p[i] + q[i]));
    if (q[i] > 0) s += q[i] * std::log(2.0 * q[i] / (p[i] + q[i]));
  }
  return s;
}

// sum_i p_i f(q_i/p_i) with f(u) = u ln u collapses to sum_i q_i ln(q_i/p_i)
inline double kl_nats(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (q[i] == 0) continue;
    if (p[i] == 0) return std::numeric_limits<double>::infinity();
    s += q[i] * std::log(q[i] / p[i]);
  }
  return s;
}

inline double l2sq(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
  return s;
}

inline double entropy_bits(const std::vector<double>& p) {
  double s = 0;
  for (double x : p)
    if (x > 0) s += x * std::log2(1.0 / x);
  return s;
}

}  // namespace ref

namespace testutil {

// Wilson-Hilferty upper quantile of chi^2; z = standard normal quantile.
inline double chi2_quantile(double df, double z) {
  double a = 2.0 / (9.0 * df);
  double c = 1.0 - a + z * std::sqrt(a);
  return df * c * c * c;
}

inline constexpr double kZ1e4 = 3.719;  // P(N(0,1) > z) = 1e-4

}  // namespace testutil
