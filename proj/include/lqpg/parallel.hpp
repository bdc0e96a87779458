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

#ifndef LQPG_PARALLEL_HPP_
#define LQPG_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace lqpg {

// LQPG_THREADS if set, otherwise the hardware concurrency.
int thread_budget();

// Runs body(0..n-1) on up to thread_budget() threads. Bodies must write to
// disjoint outputs. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace lqpg

#endif  // LQPG_PARALLEL_HPP_
