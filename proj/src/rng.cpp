// Copyright 2026 The lqpg Authors.
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

#include "lqpg/rng.hpp"

#include <cmath>

namespace lqpg {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t CounterNormal::path_key(std::uint64_t path) const {
  return splitmix64(seed_ ^ splitmix64(path));
}

std::pair<double, double> CounterNormal::pair(std::uint64_t path_key, std::uint64_t slot,
                                              std::uint64_t index) const {
  std::uint64_t h = splitmix64(path_key + slot * 0xD1B54A32D192ED03ULL +
                               index * 0x8CB92BA72F3D8DD7ULL);
  // Polar method; a rejected point is redrawn from the rehashed counter.
  constexpr double kScale = 1.0 / 2147483648.0;
  for (;;) {
    const double u = static_cast<double>(h >> 32) * kScale - 1.0;
    const double v = static_cast<double>(h & 0xFFFFFFFFULL) * kScale - 1.0;
    const double s = u * u + v * v;
    if (s < 1.0 && s > 0.0) {
      const double f = std::sqrt(-2.0 * std::log(s) / s);
      return {u * f, v * f};
    }
    h = splitmix64(h);
  }
}

}  // namespace lqpg
