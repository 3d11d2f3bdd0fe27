//
// Copyright 2026 The dprag Authors
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

#ifndef DPRAG_RANDOM_H_
#define DPRAG_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace dprag {

// Seeded random source. Every noise draw in the library consumes exactly one
// 64-bit output of a std::mt19937_64 engine, so draws are reproducible across
// standard libraries (the engine is fully specified by the standard, unlike
// the <random> distributions).
//
// A Rng must not be shared between threads.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextUint64() { return engine_(); }

  // Uniform draw in the open interval (0, 1) with 53 bits of resolution.
  double NextOpenUniform();

  // Unbiased integer in [0, bound). `bound` must be positive.
  uint64_t UniformBelow(uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a base seed, a purpose label and an
// index. The derivation is FNV-1a over the label followed by splitmix64
// finalization of (base, label hash, index), so streams for different
// purposes never share a prefix.
//
// Purposes used by the library: "partition", "threshold", "selection",
// "question".
uint64_t DeriveSeed(uint64_t base, std::string_view purpose,
                    uint64_t index = 0);

// FNV-1a 64-bit hash.
uint64_t Fnv1a64(std::string_view bytes);

}  // namespace dprag

#endif  // DPRAG_RANDOM_H_
