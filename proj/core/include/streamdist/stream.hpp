#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "streamdist/distribution.hpp"
#include "streamdist/oracle.hpp"
#include "streamdist/rng.hpp"

namespace streamdist {

//! One unit insertion <dist, item, +> in the update stream model. There are
//! no deletions anywhere in this project.
struct StreamToken {
  Target dist = Target::kP;
  uint64_t item = 0;

  bool operator==(const StreamToken&) const = default;
};

//! Sequential token supply consumed exactly once per pass. Sources backed
//! by files, buffers, or reseedable generators can rewind for a second pass.
class StreamSource {
 public:
  virtual ~StreamSource() = default;
  virtual uint64_t base_size() const = 0;
  virtual bool next(StreamToken& out) = 0;
  virtual bool replayable() const = 0;
  //! Restarts the pass; ContractError when not replayable.
  virtual void rewind() = 0;
};

class VectorStreamSource : public StreamSource {
 public:
  VectorStreamSource(std::vector<StreamToken> tokens, uint64_t n)
      : tokens_(std::move(tokens)), n_(n) {}

  uint64_t base_size() const override { return n_; }
  bool next(StreamToken& out) override {
    if (pos_ >= tokens_.size()) return false;
    out = tokens_[pos_++];
    return true;
  }
  bool replayable() const override { return true; }
  void rewind() override { pos_ = 0; }

 private:
  std::vector<StreamToken> tokens_;
  uint64_t n_;
  size_t pos_ = 0;
};

//! Text stream file: header `#n=<n>`, then `P\t<i>` or `Q\t<i>` per line.
class FileStreamSource : public StreamSource {
 public:
  explicit FileStreamSource(const std::string& path);

  uint64_t base_size() const override { return n_; }
  bool next(StreamToken& out) override;
  bool replayable() const override { return true; }
  void rewind() override;

 private:
  std::string path_;
  std::ifstream in_;
  uint64_t n_ = 0;
  uint64_t lineno_ = 0;
};

void write_stream_file(const std::string& path, uint64_t n,
                       const std::vector<StreamToken>& tokens);

//! i.i.d. draws from one or two distributions, optionally Fisher-Yates
//! shuffled. The draw phase is identical for both orders under one seed, so
//! the shuffled stream is a permutation of the as-given stream.
struct StreamGenSpec {
  Distribution p;
  std::optional<Distribution> q;
  uint64_t m_p = 0;
  uint64_t m_q = 0;
  uint64_t seed = 0;
  bool shuffled = false;
};

std::vector<StreamToken> generate_stream(const StreamGenSpec& spec);

//! Lazy as-given generator for streams too long to materialize: emits the
//! P block, then the Q block, i.i.d. per seed.
class IidStreamSource : public StreamSource {
 public:
  explicit IidStreamSource(StreamGenSpec spec);

  uint64_t base_size() const override { return spec_.p.n(); }
  bool next(StreamToken& out) override;
  bool replayable() const override { return true; }
  void rewind() override;

 private:
  StreamGenSpec spec_;
  AliasSampler p_sampler_;
  std::optional<AliasSampler> q_sampler_;
  SplitMix64 rng_;
  uint64_t emitted_ = 0;
};

//! Exact per-item counts; the ground truth streaming estimators are
//! measured against.
struct StreamCounts {
  uint64_t n = 0;
  std::vector<uint64_t> p;
  std::vector<uint64_t> q;
  uint64_t m_p = 0;
  uint64_t m_q = 0;
};

StreamCounts count_stream(StreamSource& source);

//! Entropy in bits of the empirical distribution counts/m.
double empirical_entropy_bits(const std::vector<uint64_t>& counts, uint64_t m);

}  // namespace streamdist
