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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "anisotable/rng.hpp"

namespace anisotable {

/// Paths per batch. Fixed, so the seed schedule never depends on the
/// worker count.
inline constexpr std::size_t kBatchSize = std::size_t{1} << 14;

/// Seeding for one Monte Carlo run. `stream` separates independent
/// sub-runs of an experiment (start points, model vs dual, ...).
struct RunContext {
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  std::uint64_t stream = 0;

  RunContext with_stream(std::uint64_t s) const {
    RunContext c = *this;
    c.stream = hash_combine(stream, s);
    return c;
  }
};

/// seed_b = hash(master_seed, stream, batch_index).
inline std::uint64_t batch_seed(const RunContext& ctx, std::size_t batch) {
  return hash_combine(hash_combine(ctx.master_seed, ctx.stream), batch);
}

/// Generator of path `index`: the batch seed keys Philox and the position
/// inside the batch selects the counter stream.
inline Rng path_rng(const RunContext& ctx, std::size_t index) {
  return Rng(batch_seed(ctx, index / kBatchSize), index % kBatchSize);
}

inline std::size_t batch_count(std::size_t n) { return (n + kBatchSize - 1) / kBatchSize; }

/// Runs fn(batch, begin, end) for every batch of [0, n) on a fixed pool of
/// workers pulling batch indices from a shared counter. Results come back
/// in batch order, so any reduction over them is schedule independent.
/// The exception of the lowest failing batch is rethrown.
template <class Fn>
auto run_batches(std::size_t n, unsigned workers, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}, std::size_t{}, std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}, std::size_t{}, std::size_t{}));
  const std::size_t batches = batch_count(n);
  std::vector<std::optional<Result>> slots(batches);
  std::vector<std::exception_ptr> errors(batches);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= batches) return;
      try {
        const std::size_t begin = b * kBatchSize;
        slots[b].emplace(fn(b, begin, std::min(n, begin + kBatchSize)));
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  const unsigned pool = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(batches)));
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(pool);
    for (unsigned i = 0; i < pool; ++i) threads.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<Result> out;
  out.reserve(batches);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace anisotable
