// Copyright 2026 The uralprobe Authors.
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

#ifndef URALPROBE_RANDOM_HPP_
#define URALPROBE_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace uralprobe {

// Portable seeded generator.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions and std::shuffle are not, so every
// derived quantity is computed here:
//   * uniform_below(n): rejection sampling on the raw 64-bit output, accepting
//     x >= (2^64 - n) mod n and returning x mod n.
//   * uniform01(): top 53 bits of one output, scaled by 2^-53.
//   * shuffle(): Fisher-Yates from the back, j = uniform_below(i + 1).
// Identical seeds therefore give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  std::uint64_t uniform_below(std::uint64_t bound);
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  // Derives an independent child seed, e.g. one per epoch or per task.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

}  // namespace uralprobe

#endif  // URALPROBE_RANDOM_HPP_
