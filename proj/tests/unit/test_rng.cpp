// Copyright 2026 The Anisotable Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "anisotable/parallel.hpp"
#include "anisotable/rng.hpp"

using namespace anisotable;

// Known-answer vectors published with the Random123 reference implementation.
TEST_CASE("philox block matches the reference vectors") {
  using B = Philox4x32::Block;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::block(B{0, 0, 0, 0}, K{0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("generator output is the block stream of its counter") {
  Rng g(0, 0);
  const auto b0 = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  const auto b1 = Philox4x32::block({1, 0, 0, 0}, {0, 0});
  for (int i = 0; i < 4; ++i) CHECK(g() == b0[i]);
  for (int i = 0; i < 4; ++i) CHECK(g() == b1[i]);
  CHECK(g.draws() == 2);
}

TEST_CASE("streams and keys give distinct sequences") {
  std::set<std::uint32_t> firsts;
  for (std::uint64_t key = 0; key < 8; ++key)
    for (std::uint64_t stream = 0; stream < 8; ++stream) firsts.insert(Rng(key, stream)());
  CHECK(firsts.size() == 64);
}

TEST_CASE("uniform stays in the open unit interval with the right mean") {
  Rng g(7, 3);
  double sum = 0.0;
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const double u = g.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // SE of the mean is sqrt(1/12 / n).
  CHECK(std::abs(sum / kN - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / kN));
}

TEST_CASE("standard normal and exponential moments") {
  Rng g(11, 0);
  constexpr int kN = 200000;
  double s1 = 0.0, s2 = 0.0, e1 = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double z = standard_normal(g);
    s1 += z;
    s2 += z * z;
    e1 += standard_exponential(g);
  }
  CHECK(std::abs(s1 / kN) < 4.0 / std::sqrt(kN));
  CHECK(std::abs(s2 / kN - 1.0) < 4.0 * std::sqrt(2.0 / kN));
  CHECK(std::abs(e1 / kN - 1.0) < 4.0 / std::sqrt(kN));
}

TEST_CASE("path generators depend on the batch seed and position only") {
  const RunContext ctx{42, 1, 0};
  Rng a = path_rng(ctx, kBatchSize + 5);
  Rng b(batch_seed(ctx, 1), 5);
  for (int i = 0; i < 16; ++i) CHECK(a() == b());
  CHECK(batch_seed(ctx, 0) != batch_seed(ctx, 1));
  CHECK(batch_seed(ctx, 0) != batch_seed(ctx.with_stream(1), 0));
  CHECK(batch_count(0) == 0);
  CHECK(batch_count(1) == 1);
  CHECK(batch_count(kBatchSize) == 1);
  CHECK(batch_count(kBatchSize + 1) == 2);
}

TEST_CASE("run_batches returns results in batch order for any worker count") {
  const std::size_t n = 5 * kBatchSize + 17;
  auto body = [](std::size_t b, std::size_t begin, std::size_t end) { return std::vector<std::size_t>{b, begin, end}; };
  const auto one = run_batches(n, 1, body);
  const auto many = run_batches(n, 4, body);
  REQUIRE(one.size() == 6);
  CHECK(one == many);
  CHECK(one.back()[2] == n);
}

TEST_CASE("run_batches rethrows the lowest failing batch") {
  auto body = [](std::size_t b, std::size_t, std::size_t) -> int {
    if (b >= 2) throw std::runtime_error("batch " + std::to_string(b));
    return 0;
  };
  try {
    run_batches(6 * kBatchSize, 3, body);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "batch 2");
  }
}
