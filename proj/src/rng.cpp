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

#include "lrmech/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace lrmech {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

std::uint64_t SplitMix64::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix(state_);
}

double SplitMix64::next_unit_open() {
  // Top 53 bits, offset by half a bucket: (bits + 0.5) * 2^-53 lies strictly
  // inside (0, 1).
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

int SplitMix64::next_int_1_to_n(int n) {
  if (n < 1) {
    throw std::invalid_argument("next_int_1_to_n: n must be >= 1");
  }
  // Floating scaling is unbiased to ~2^-53 at the sizes used here; the clamp
  // guards the rare case where u*n rounds up to n exactly.
  int k = 1 + static_cast<int>(next_unit_open() * n);
  return k > n ? n : k;
}

double SplitMix64::next_normal() {
  const double u1 = next_unit_open();
  const double u2 = next_unit_open();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double SplitMix64::next_laplace(double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("next_laplace: scale must be > 0");
  }
  const double u = next_unit_open() - 0.5;
  const double mag = std::log(1.0 - 2.0 * std::abs(u));  // <= 0
  return u < 0.0 ? scale * mag : -scale * mag;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return SplitMix64(base ^ salt).next_u64();
}

}  // namespace lrmech
