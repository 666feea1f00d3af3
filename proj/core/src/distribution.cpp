#include "streamdist/distribution.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "streamdist/errors.hpp"

namespace streamdist {

namespace {

void validate(const std::vector<double>& probs) {
  if (probs.empty()) throw ContractError("distribution: base size must be positive");
  long double sum = 0.0L;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ContractError("distribution: negative or NaN probability");
    sum += p;
  }
  if (std::fabs(static_cast<double>(sum) - 1.0) > kProbSumTol)
    throw ContractError("distribution: probabilities sum to " +
                        std::to_string(static_cast<double>(sum)) + ", expected 1");
}

std::vector<double> normalized(std::vector<double> w) {
  long double sum = 0.0L;
  for (double x : w) sum += x;
  for (double& x : w) x = static_cast<double>(x / sum);
  return w;
}

}  // namespace

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  validate(probs_);
}

Distribution Distribution::uniform(uint64_t n) {
  return uniform_on(n, 0, n);
}

Distribution Distribution::uniform_on(uint64_t n, uint64_t lo, uint64_t hi) {
  if (n == 0 || lo >= hi || hi > n)
    throw ContractError("uniform_on: need 0 <= lo < hi <= n");
  std::vector<double> p(n, 0.0);
  double v = 1.0 / static_cast<double>(hi - lo);
  for (uint64_t i = lo; i < hi; ++i) p[i] = v;
  return Distribution(normalized(std::move(p)));
}

Distribution Distribution::point_mass(uint64_t n, uint64_t item) {
  if (item >= n) throw ContractError("point_mass: item out of range");
  std::vector<double> p(n, 0.0);
  p[item] = 1.0;
  return Distribution(std::move(p));
}

Distribution Distribution::dyadic(uint64_t n) {
  if (n == 0) throw ContractError("dyadic: n must be positive");
  std::vector<double> p(n, 0.0);
  double rest = 1.0;
  for (uint64_t i = 0; i + 1 < n; ++i) {
    p[i] = rest / 2.0;
    rest /= 2.0;
  }
  p[n - 1] = rest;
  return Distribution(std::move(p));
}

Distribution Distribution::zipf(uint64_t n, double s) {
  if (n == 0) throw ContractError("zipf: n must be positive");
  if (!(s >= 0.0)) throw ContractError("zipf: exponent must be non-negative");
  std::vector<double> w(n);
  for (uint64_t i = 0; i < n; ++i)
    w[i] = std::pow(static_cast<double>(i + 1), -s);
  return Distribution(normalized(std::move(w)));
}

Distribution Distribution::two_block(uint64_t n, double head_mass) {
  if (n < 2) throw ContractError("two_block: need n >= 2");
  if (!(head_mass > 0.0 && head_mass < 1.0))
    throw ContractError("two_block: head_mass must lie in (0, 1)");
  uint64_t half = n / 2;
  std::vector<double> p(n);
  for (uint64_t i = 0; i < half; ++i) p[i] = head_mass / static_cast<double>(half);
  for (uint64_t i = half; i < n; ++i)
    p[i] = (1.0 - head_mass) / static_cast<double>(n - half);
  return Distribution(normalized(std::move(p)));
}

Distribution Distribution::random_simplex(uint64_t n, SplitMix64& rng) {
  if (n == 0) throw ContractError("random_simplex: n must be positive");
  std::vector<double> w(n);
  for (auto& x : w) {
    // exponential variate; 1 - u keeps the argument strictly positive
    x = -std::log(1.0 - rng.next_unit());
  }
  return Distribution(normalized(std::move(w)));
}

Distribution Distribution::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open distribution file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#n=", 0) != 0)
    throw IoError(path + ": missing #n=<n> header");
  uint64_t n = 0;
  try {
    n = std::stoull(line.substr(3));
  } catch (const std::exception&) {
    throw IoError(path + ": bad base size in header");
  }
  if (n == 0) throw IoError(path + ": base size must be positive");
  std::vector<double> p(n, 0.0);
  uint64_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    uint64_t i;
    double v;
    if (!(row >> i >> v))
      throw IoError(path + ":" + std::to_string(lineno) + ": expected <i>\\t<p_i>");
    if (i >= n)
      throw IoError(path + ":" + std::to_string(lineno) + ": index out of range");
    p[i] = v;
  }
  try {
    return Distribution(std::move(p));
  } catch (const ContractError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void Distribution::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write distribution file: " + path);
  out << "#n=" << n() << "\n";
  char buf[64];
  for (uint64_t i = 0; i < n(); ++i) {
    if (probs_[i] == 0.0) continue;
    std::snprintf(buf, sizeof buf, "%" PRIu64 "\t%.17g\n", i, probs_[i]);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace streamdist
