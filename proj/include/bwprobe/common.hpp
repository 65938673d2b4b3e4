// Copyright 2026 The bwprobe Authors
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

#ifndef BWPROBE_COMMON_HPP_
#define BWPROBE_COMMON_HPP_

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace bwprobe {

// Sentinel for "never departed" / unbounded delay.  IEEE infinity saturates
// under the arithmetic we do on timestamps, which is exactly the behavior
// lost packets need, so no boxed optional is used anywhere on the hot path.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite(double x) { return x < kInf && x > -kInf; }

// ---------------------------------------------------------------------------
// Errors

// Raised when an estimate would contain no finite-delay rate at all.
struct EmptyEstimateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a curve is queried beyond the horizon it is valid for.
struct DomainExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when too few tail samples exist for a generalized Pareto fit.
struct InsufficientTailError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a tail fit degenerates (e.g. all exceedances identical).
struct DegenerateFitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Deterministic random numbers
//
// All randomness in the library flows through a small counter-based
// generator.  Unlike the standard <random> distributions, whose streams are
// implementation-defined, this hashes (key, counter) pairs, so every draw is
// reproducible bit-for-bit across platforms and random-access (the simulator
// replays slot coins out of order when instrumenting a server).

inline std::uint64_t mix64(std::uint64_t z) {
  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b));
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix64(key_, counter); }

  // Uniform on [0, 1); 53-bit resolution.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  bool bernoulli(std::uint64_t counter, double p) const {
    return uniform(counter) < p;
  }

  CounterRng derive(std::uint64_t stream) const {
    return CounterRng(mix64(key_, stream));
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

// Distinct stream tags so independent draw families never collide.
enum RngStream : std::uint64_t {
  kStreamSlots = 0x5107a1,      // Bernoulli server slot coins
  kStreamBurstSizes = 0xb0457,  // cross-traffic burst sizes
  kStreamPhase = 0x9fa5e,       // probe start phase
  kStreamBootstrap = 0xb007,    // bootstrap resampling
};

}  // namespace bwprobe

#endif  // BWPROBE_COMMON_HPP_
