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

#ifndef LQPG_RNG_HPP_
#define LQPG_RNG_HPP_

#include <cstdint>
#include <utility>

namespace lqpg {

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based standard normals: the draw for (seed, path, slot, pair) does not
// depend on thread count or evaluation order. Each call yields two normals.
class CounterNormal {
 public:
  explicit CounterNormal(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t path_key(std::uint64_t path) const;
  std::pair<double, double> pair(std::uint64_t path_key, std::uint64_t slot,
                                 std::uint64_t index) const;

 private:
  std::uint64_t seed_;
};

}  // namespace lqpg

#endif  // LQPG_RNG_HPP_
