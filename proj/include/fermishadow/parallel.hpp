// Copyright 2026 The fermishadow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FERMISHADOW_PARALLEL_HPP
#define FERMISHADOW_PARALLEL_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace fermishadow {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Independent stream for item `index` of a run seeded with `seed`.
Rng stream_rng(std::uint64_t seed, std::uint64_t index);

/// Worker count: FERMISHADOW_THREADS if set, else hardware concurrency.
unsigned thread_count();

/// Calls body(begin, end) over contiguous chunks of [0, count), possibly on several threads.
/// Chunking never influences results as long as body only writes to its own slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)> &body);

}  // namespace fermishadow

#endif
