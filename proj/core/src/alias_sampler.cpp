#include "streamdist/alias_sampler.hpp"

namespace streamdist {

AliasSampler::AliasSampler(const Distribution& dist) {
  const auto& p = dist.probs();
  const uint64_t n = dist.n();
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);

  // scaled weights; columns with w < 1 borrow from columns with w > 1
  std::vector<double> w(n);
  std::vector<uint64_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    w[i] = p[i] * static_cast<double>(n);
    (w[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    uint64_t s = small.back();
    uint64_t l = large.back();
    small.pop_back();
    large.pop_back();
    prob_[s] = w[s];
    alias_[s] = l;
    w[l] = (w[l] + w[s]) - 1.0;
    (w[l] < 1.0 ? small : large).push_back(l);
  }
  // leftovers are within rounding of exactly 1; their alias is never read
  for (uint64_t i : large) prob_[i] = 1.0;
  for (uint64_t i : small) prob_[i] = 1.0;
}

}  // namespace streamdist
