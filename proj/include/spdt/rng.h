// Copyright 2026 The SPDT Authors
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

#ifndef SPDT_RNG_H_
#define SPDT_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace spdt {

// Named substreams. Every random decision is drawn from a stream keyed by
// (seed, substream, coordinates...), so the value of one draw never depends
// on how many other draws happened before it or on thread scheduling.
enum class Substream : std::uint64_t {
  kSeedSelection = 1,
  kInfectiousPeriod = 2,
  kRemovalTime = 3,
  kInfection = 4,
  kDensify = 5,
  kSynthUser = 6,
  kSynthLocations = 7,
};

constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t DeriveKey(std::uint64_t seed, Substream stream,
                                  std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = SplitMix64(seed ^ SplitMix64(
                                            static_cast<std::uint64_t>(stream)));
  for (std::uint64_t coord : path) key = SplitMix64(key ^ SplitMix64(coord));
  return key;
}

// Small counter-based generator (SplitMix64 over a Weyl sequence). Satisfies
// UniformRandomBitGenerator, but the helpers below avoid the standard
// distributions so results are identical across standard libraries.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr StreamRng(std::uint64_t key) : state_(key) {}
  StreamRng(std::uint64_t seed, Substream stream,
            std::initializer_list<std::uint64_t> path)
      : state_(DeriveKey(seed, stream, path)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Uniform integer in [0, n); n > 0. Rejection keeps it unbiased.
  std::uint64_t Below(std::uint64_t n) {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v;
    do {
      v = (*this)();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::uint64_t state_;
};

}  // namespace spdt

#endif  // SPDT_RNG_H_
