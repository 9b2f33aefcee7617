//
// Copyright 2026 The robustkit Authors
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
//

#ifndef ROBUSTKIT_RANDOM_HPP_
#define ROBUSTKIT_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace robustkit {

// Seed derivation. Every random stream is keyed by a (seed, key) pair.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept;

// mt19937_64 with hand-rolled uniform and normal draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound); bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();

  // Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace robustkit

#endif  // ROBUSTKIT_RANDOM_HPP_
