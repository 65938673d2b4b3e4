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

#ifndef BWPROBE_PARALLEL_HPP_
#define BWPROBE_PARALLEL_HPP_

#include <cstdint>
#include <functional>

namespace bwprobe {

// Runs fn(0), ..., fn(count - 1) on up to `jobs` threads.  Calls must write
// to disjoint slots; the first exception aborts the remaining work and is
// rethrown after the join.  Results never depend on `jobs`.
void parallel_for(std::int64_t count, int jobs,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace bwprobe

#endif  // BWPROBE_PARALLEL_HPP_
