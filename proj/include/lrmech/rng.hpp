// Copyright 2026 The lrmech Authors
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

#ifndef LRMECH_RNG_HPP_
#define LRMECH_RNG_HPP_

#include <cstdint>

namespace lrmech {

// SplitMix64 (Steele, Lea & Flood 2014; the java.util.SplittableRandom
// update). Chosen because every result in this library must be reproducible
// bit-for-bit from a 64-bit seed, across platforms and standard-library
// versions, which rules out std::mt19937 + std::*_distribution (the
// distributions are implementation-defined). Version 1 of the generator;
// any change to the update constants or the derived samplers below would be
// a new version, since stored seeds encode expectations about the stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  // The output scrambler on its own; also serves as the seeding function for
  // derived streams (see derive_seed).
  static std::uint64_t mix(std::uint64_t z);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1): 53 random bits centered in their
  // bucket, so 0 and 1 are never returned and log(u) is always finite.
  double next_unit_open();

  // Uniform integer in [1, n].
  int next_int_1_to_n(int n);

  // Standard normal via Box-Muller (two uniforms per draw, cosine branch).
  double next_normal();

  // Zero-mean Laplace with the given scale via inverse CDF:
  // u uniform on (-1/2, 1/2), x = -scale * sgn(u) * ln(1 - 2|u|).
  double next_laplace(double scale);

 private:
  std::uint64_t state_;
};

// Stream-derivation rule used everywhere a family of independent streams is
// needed from one base seed: the salt is XORed into the seed and spread
// through the generator's own seeding function. Documented so that external
// tooling can reproduce any individual stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace lrmech

#endif  // LRMECH_RNG_HPP_
