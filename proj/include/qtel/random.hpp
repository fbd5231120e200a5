// Copyright 2026 The qtel Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

#include "qtel/register.hpp"

namespace qtel {

/// SplitMix64 generator. Chosen over <random> engines/distributions because
/// its whole output sequence is pinned by this header, so identical seeds
/// give identical streams on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Counter-based stream derivation: mixes (seed, stream) into a fresh
  /// generator, so per-trial generators are independent of trial order.
  static Rng split(std::uint64_t seed, std::uint64_t stream) {
    Rng a(seed);
    Rng b(stream);
    const std::uint64_t ha = a.next_u64();
    const std::uint64_t hb = b.next_u64();
    return Rng(ha ^ (hb + 0x9e3779b97f4a7c15ull + (ha << 6) + (ha >> 2)));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> next_gaussian_pair() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  std::uint64_t state_;
};

/// Haar-uniform pure state on a single n-level subsystem: i.i.d. standard
/// complex Gaussian amplitudes, normalized.
template <typename Scalar = double>
QuditRegister<Scalar> random_state(Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_state: dimension must be >= 1");
  Vector<Scalar> amps(n);
  for (Index i = 0; i < n; ++i) {
    const auto [re, im] = rng.next_gaussian_pair();
    amps[i] = Complex<Scalar>(static_cast<Scalar>(re), static_cast<Scalar>(im));
  }
  amps.normalize();
  return QuditRegister<Scalar>(Dims{n}, amps);
}

}  // namespace qtel
