#include "streamdist/f0_sketch.hpp"

#include <algorithm>
#include <cmath>

#include "streamdist/errors.hpp"

namespace streamdist {

uint64_t F0Sketch::k_for(double eps0) {
  if (!(eps0 > 0.0) || eps0 >= 1.0) throw ContractError("f0 sketch: eps0 must be in (0,1)");
  return static_cast<uint64_t>(std::ceil(4.0 / (eps0 * eps0)));
}

uint64_t F0Sketch::reps_for(double delta) {
  if (!(delta > 0.0) || delta >= 1.0) throw ContractError("f0 sketch: delta must be in (0,1)");
  double r = std::ceil(std::log2(1.0 / delta));
  return std::max<uint64_t>(1, static_cast<uint64_t>(r));
}

F0Sketch::F0Sketch(double eps0, double delta, uint64_t hash_seed)
    : k_(k_for(eps0)), seed_(hash_seed), reps_(reps_for(delta)) {
  if (k_ < 2) k_ = 2;
  bounds_.assign(reps_.size(), UINT64_MAX);
}

namespace {

// True if h was absent. Caller keeps the load factor below 3/4.
bool table_insert(std::vector<uint64_t>& table, uint64_t h) {
  uint64_t mask = table.size() - 1;
  uint64_t idx = h & mask;
  while (table[idx] != 0) {
    if (table[idx] == h) return false;
    idx = (idx + 1) & mask;
  }
  table[idx] = h;
  return true;
}

}  // namespace

void F0Sketch::rep_table_refill(Rep& rep, uint64_t slots) {
  rep.table.assign(slots, 0);
  rep.table_used = rep.buf.size();
  for (uint64_t h : rep.buf) table_insert(rep.table, h);
}

void F0Sketch::rep_compact(uint64_t r) {
  Rep& rep = reps_[r];
  std::nth_element(rep.buf.begin(), rep.buf.begin() + (k_ - 1), rep.buf.end());
  bounds_[r] = rep.buf[k_ - 1];
  rep.buf.resize(k_);
  rep_table_refill(rep, rep.table.size());
}

uint64_t F0Sketch::insert(uint64_t item) {
  uint64_t grew = 0;
  for (uint64_t r = 0; r < bounds_.size(); ++r) {
    uint64_t h = hash3(seed_, r + 1, item);
    if (h == 0) h = 1;  // 0 is the empty-slot marker
    // The sentinel also sheds h == 2^64-1 while filling; losing a value
    // with probability 2^-64 is in the same class as a hash collision.
    if (h >= bounds_[r]) continue;  // not among the k smallest
    Rep& rep = reps_[r];
    if (rep.table.empty()) rep.table.assign(16, 0);
    if (!table_insert(rep.table, h)) continue;  // same item again
    ++rep.table_used;
    if (rep.buf.size() < k_) ++grew;
    rep.buf.push_back(h);
    if (rep.buf.size() == 2 * k_) {
      rep_compact(r);
    } else if (rep.table_used * 4 >= rep.table.size() * 3) {
      rep_table_refill(rep, rep.table.size() * 2);
    }
  }
  stored_ += grew;
  return grew;
}

double F0Sketch::estimate() const {
  std::vector<double> per_rep;
  per_rep.reserve(reps_.size());
  std::vector<uint64_t> scratch;
  for (const Rep& rep : reps_) {
    if (rep.buf.size() < k_) {
      per_rep.push_back(static_cast<double>(rep.buf.size()));
    } else {
      // k-th smallest of D uniform hashes sits near k/D, so (k-1)/h_(k)
      // is the standard low-bias inverse estimate.
      scratch = rep.buf;
      std::nth_element(scratch.begin(), scratch.begin() + (k_ - 1), scratch.end());
      double h = std::ldexp(static_cast<double>(scratch[k_ - 1]) + 0.5, -64);
      per_rep.push_back(static_cast<double>(k_ - 1) / h);
    }
  }
  std::sort(per_rep.begin(), per_rep.end());
  size_t r = per_rep.size();
  if (r % 2 == 1) return per_rep[r / 2];
  return 0.5 * (per_rep[r / 2 - 1] + per_rep[r / 2]);
}

}  // namespace streamdist
