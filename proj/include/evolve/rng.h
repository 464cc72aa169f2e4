// Copyright 2026 The Evolve Authors. All rights reserved.
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

#ifndef EVOLVE_RNG_H_
#define EVOLVE_RNG_H_

#include <array>
#include <cstdint>

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011).
//
// Stream layout, pinned as version "philox4x32-10/v1":
//   key     = the 64-bit seed, split into two 32-bit words (low, high)
//   counter = (index low, index high, stream low, stream high)
// Each block yields 4 words; a draw consumes one block and uses the first two
// words as one 64-bit value (low word first). Doubles take the top 53 bits.
//
// Stream ids used by the library:
//   0  per-episode action sampling (seed = episode seed)
//   1  base true losses            (seed = environment seed)
//   2  optimistic hints
//   3  corruption placement
//   4  composite partial schedules
//   5  noisy-decay perturbation directions

namespace evolve {

using RngSeed = std::uint64_t;

inline constexpr const char* kRngVersion = "philox4x32-10/v1";

enum class Stream : std::uint64_t {
  kActions = 0,
  kBaseLosses = 1,
  kHints = 2,
  kCorruption = 3,
  kComposite = 4,
  kNoise = 5,
};

std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Pure function of (seed, stream, index).
std::uint64_t CounterBits(RngSeed seed, std::uint64_t stream,
                          std::uint64_t index);
// Uniform in [0,1) with 53 random bits.
double CounterUniform(RngSeed seed, std::uint64_t stream, std::uint64_t index);

// Sequential view over one stream.
class Philox {
 public:
  Philox(RngSeed seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t NextBits() { return CounterBits(seed_, stream_, index_++); }
  double Uniform() { return CounterUniform(seed_, stream_, index_++); }
  std::uint64_t position() const { return index_; }

 private:
  RngSeed seed_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
};

}  // namespace evolve

#endif  // EVOLVE_RNG_H_
