// Copyright 2026 The curmi Authors
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

#ifndef CURMI_RNG_HPP
#define CURMI_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

#include "curmi/types.hpp"

namespace curmi {

// Seeded PRNG with named substreams. Every generator and noise mechanism
// derives a substream from (seed, name, index), so results are independent
// of iteration order and thread count. Draws avoid std::*_distribution,
// whose output is implementation-defined; mt19937_64 itself is fully
// specified by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng substream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 bits of entropy.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (one value per call).
  double gaussian();

  /// Uniform integer in [0, n), rejection-sampled (no modulo bias).
  std::uint64_t uniform_int(std::uint64_t n);

  /// Gaussian vector of length d.
  VectorD gaussian_vector(Index d);

  /// Uniform random unit vector in R^d.
  VectorD unit_vector(Index d);

 private:
  std::mt19937_64 gen_;
};

/// Derives a child seed from (seed, name, index); stable across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name, std::uint64_t index);

}  // namespace curmi

#endif  // CURMI_RNG_HPP
