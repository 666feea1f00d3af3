#include "streamdist/stream.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>

#include "streamdist/errors.hpp"

namespace streamdist {

FileStreamSource::FileStreamSource(const std::string& path) : path_(path) {
  rewind();
}

void FileStreamSource::rewind() {
  in_ = std::ifstream(path_);
  if (!in_) throw IoError("cannot open stream file: " + path_);
  std::string line;
  if (!std::getline(in_, line) || line.rfind("#n=", 0) != 0)
    throw IoError(path_ + ": missing #n=<n> header");
  try {
    n_ = std::stoull(line.substr(3));
  } catch (const std::exception&) {
    throw IoError(path_ + ": bad base size in header");
  }
  if (n_ == 0) throw IoError(path_ + ": base size must be positive");
  lineno_ = 1;
}

bool FileStreamSource::next(StreamToken& out) {
  std::string line;
  while (std::getline(in_, line)) {
    ++lineno_;
    if (line.empty() || line[0] == '#') continue;
    if (line.size() < 3 || (line[0] != 'P' && line[0] != 'Q') || line[1] != '\t')
      throw IoError(path_ + ":" + std::to_string(lineno_) + ": expected P\\t<i> or Q\\t<i>");
    out.dist = line[0] == 'P' ? Target::kP : Target::kQ;
    try {
      out.item = std::stoull(line.substr(2));
    } catch (const std::exception&) {
      throw IoError(path_ + ":" + std::to_string(lineno_) + ": bad item index");
    }
    if (out.item >= n_)
      throw IoError(path_ + ":" + std::to_string(lineno_) + ": item out of range");
    return true;
  }
  return false;
}

void write_stream_file(const std::string& path, uint64_t n,
                       const std::vector<StreamToken>& tokens) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write stream file: " + path);
  out << "#n=" << n << "\n";
  char buf[32];
  for (const auto& tok : tokens) {
    std::snprintf(buf, sizeof buf, "%c\t%" PRIu64 "\n",
                  tok.dist == Target::kP ? 'P' : 'Q', tok.item);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<StreamToken> generate_stream(const StreamGenSpec& spec) {
  if (spec.q && spec.q->n() != spec.p.n())
    throw ContractError("generate_stream: p and q must share one base size");
  if (!spec.q && spec.m_q > 0)
    throw ContractError("generate_stream: q tokens requested without a q distribution");

  std::vector<StreamToken> tokens;
  tokens.reserve(spec.m_p + spec.m_q);
  SplitMix64 rng(spec.seed);
  AliasSampler ps(spec.p);
  for (uint64_t k = 0; k < spec.m_p; ++k)
    tokens.push_back({Target::kP, ps.sample(rng)});
  if (spec.q) {
    AliasSampler qs(*spec.q);
    for (uint64_t k = 0; k < spec.m_q; ++k)
      tokens.push_back({Target::kQ, qs.sample(rng)});
  }
  if (spec.shuffled && tokens.size() > 1) {
    for (uint64_t i = tokens.size() - 1; i > 0; --i)
      std::swap(tokens[i], tokens[rng.next_below(i + 1)]);
  }
  return tokens;
}

IidStreamSource::IidStreamSource(StreamGenSpec spec)
    : spec_(std::move(spec)), p_sampler_(spec_.p), rng_(spec_.seed) {
  if (spec_.shuffled)
    throw ContractError("iid source: shuffled order requires materializing; use generate_stream");
  if (spec_.q) {
    if (spec_.q->n() != spec_.p.n())
      throw ContractError("iid source: p and q must share one base size");
    q_sampler_.emplace(*spec_.q);
  } else if (spec_.m_q > 0) {
    throw ContractError("iid source: q tokens requested without a q distribution");
  }
}

bool IidStreamSource::next(StreamToken& out) {
  if (emitted_ < spec_.m_p) {
    out = {Target::kP, p_sampler_.sample(rng_)};
  } else if (emitted_ < spec_.m_p + spec_.m_q) {
    out = {Target::kQ, q_sampler_->sample(rng_)};
  } else {
    return false;
  }
  ++emitted_;
  return true;
}

void IidStreamSource::rewind() {
  rng_ = SplitMix64(spec_.seed);
  emitted_ = 0;
}

StreamCounts count_stream(StreamSource& source) {
  StreamCounts counts;
  counts.n = source.base_size();
  counts.p.assign(counts.n, 0);
  counts.q.assign(counts.n, 0);
  StreamToken tok;
  while (source.next(tok)) {
    if (tok.dist == Target::kP) {
      ++counts.p[tok.item];
      ++counts.m_p;
    } else {
      ++counts.q[tok.item];
      ++counts.m_q;
    }
  }
  return counts;
}

double empirical_entropy_bits(const std::vector<uint64_t>& counts, uint64_t m) {
  if (m == 0) return 0.0;
  double h = 0.0;
  const double md = static_cast<double>(m);
  for (uint64_t c : counts)
    if (c > 0) h += (c / md) * std::log2(md / static_cast<double>(c));
  return h;
}

}  // namespace streamdist
