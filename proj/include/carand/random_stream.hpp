// Copyright 2026 The carand Authors.
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

#include <cstdint>
#include <random>

namespace carand {

/// Single-owner pseudo-random stream. Each replication of a simulation gets
/// its own stream derived from (master_seed, replication_id), so results do
/// not depend on how replications are scheduled across workers.
///
/// Doubles are built from the top 53 bits of the 64-bit engine output so the
/// sequence is identical across standard library implementations.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t replication_id);

  static RandomStream for_replication(std::uint64_t master_seed,
                                      std::uint64_t replication_id) {
    return RandomStream(master_seed, replication_id);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on {0, ..., bound - 1}; bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t replication_id() const noexcept { return replication_id_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t replication_id_;
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer, used for seed derivation and digests.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace carand
