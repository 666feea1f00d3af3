#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "streamdist/errors.hpp"
#include "streamdist/stream.hpp"

using namespace streamdist;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::map<std::pair<int, uint64_t>, uint64_t> token_multiset(
    const std::vector<StreamToken>& toks) {
  std::map<std::pair<int, uint64_t>, uint64_t> out;
  for (const auto& t : toks) ++out[{t.dist == Target::kQ, t.item}];
  return out;
}

}  // namespace

TEST_SUITE("stream_io") {

TEST_CASE("stream files round trip through write and read") {
  std::vector<StreamToken> toks = {
      {Target::kP, 0}, {Target::kQ, 5}, {Target::kP, 5}, {Target::kP, 2}};
  auto path = temp_path("sdtest_roundtrip.stream");
  write_stream_file(path, 6, toks);

  FileStreamSource src(path);
  CHECK(src.base_size() == 6);
  std::vector<StreamToken> got;
  StreamToken t;
  while (src.next(t)) got.push_back(t);
  CHECK(got == toks);

  src.rewind();
  std::vector<StreamToken> again;
  while (src.next(t)) again.push_back(t);
  CHECK(again == toks);
  std::remove(path.c_str());
}

TEST_CASE("malformed stream files are reported with context") {
  auto path = temp_path("sdtest_bad.stream");
  {
    std::ofstream out(path);
    out << "P\t3\n";  // missing header
  }
  CHECK_THROWS_AS(FileStreamSource{path}, IoError);
  {
    std::ofstream out(path);
    out << "#n=4\nP\t9\n";  // item outside the base
  }
  {
    FileStreamSource src(path);
    StreamToken t;
    CHECK_THROWS_AS(src.next(t), IoError);
  }
  {
    std::ofstream out(path);
    out << "#n=4\nX\t1\n";  // unknown target tag
  }
  {
    FileStreamSource src(path);
    StreamToken t;
    CHECK_THROWS_AS(src.next(t), IoError);
  }
  CHECK_THROWS_AS(FileStreamSource{"/nonexistent/sdtest.stream"}, IoError);
  std::remove(path.c_str());
}

TEST_CASE("generated streams are deterministic in the seed") {
  StreamGenSpec spec{.p = Distribution::zipf(32, 1.0),
                     .q = Distribution::uniform(32),
                     .m_p = 500,
                     .m_q = 300,
                     .seed = 99};
  auto a = generate_stream(spec);
  auto b = generate_stream(spec);
  CHECK(a == b);
  CHECK(a.size() == 800);
  spec.seed = 100;
  CHECK(generate_stream(spec) != a);
}

TEST_CASE("shuffling permutes the as-given stream without changing counts") {
  StreamGenSpec spec{.p = Distribution::zipf(16, 1.0),
                     .q = Distribution::uniform(16),
                     .m_p = 400,
                     .m_q = 200,
                     .seed = 7};
  auto ordered = generate_stream(spec);
  spec.shuffled = true;
  auto shuffled = generate_stream(spec);
  CHECK(ordered != shuffled);
  CHECK(token_multiset(ordered) == token_multiset(shuffled));
  // as-given order is the P block then the Q block
  bool q_seen = false;
  for (const auto& t : ordered) {
    if (t.dist == Target::kQ) q_seen = true;
    if (q_seen) CHECK(t.dist == Target::kQ);
  }
}

TEST_CASE("the lazy generator replays the materialized stream") {
  StreamGenSpec spec{.p = Distribution::zipf(64, 1.0), .m_p = 1000, .seed = 321};
  auto eager = generate_stream(spec);

  IidStreamSource src(spec);
  CHECK(src.base_size() == 64);
  std::vector<StreamToken> lazy;
  StreamToken t;
  while (src.next(t)) lazy.push_back(t);
  CHECK(lazy == eager);

  src.rewind();
  std::vector<StreamToken> again;
  while (src.next(t)) again.push_back(t);
  CHECK(again == eager);
}

TEST_CASE("counting recovers exact frequencies and empirical entropy") {
  // hand-built two-sided stream: p side has counts {2, 1, 1}, q side {0, 4}
  std::vector<StreamToken> toks = {
      {Target::kP, 0}, {Target::kP, 0}, {Target::kP, 1}, {Target::kP, 3},
      {Target::kQ, 2}, {Target::kQ, 2}, {Target::kQ, 2}, {Target::kQ, 2}};
  VectorStreamSource src(toks, 4);
  auto counts = count_stream(src);
  CHECK(counts.n == 4);
  CHECK(counts.m_p == 4);
  CHECK(counts.m_q == 4);
  CHECK(counts.p == std::vector<uint64_t>{2, 1, 0, 1});
  CHECK(counts.q == std::vector<uint64_t>{0, 0, 4, 0});
  CHECK(empirical_entropy_bits(counts.p, counts.m_p) == 1.5);  // dyadic profile
  CHECK(empirical_entropy_bits(counts.q, counts.m_q) == 0.0);
}

TEST_CASE("empirical entropy matches the exact value of the count profile") {
  std::vector<uint64_t> counts = {5, 3, 2, 0, 6};
  uint64_t m = 16;
  std::vector<double> masses;
  for (auto c : counts) masses.push_back(static_cast<double>(c) / m);
  CHECK(empirical_entropy_bits(counts, m) ==
        doctest::Approx(ref::entropy_bits(masses)).epsilon(1e-14));
}

}  // TEST_SUITE
