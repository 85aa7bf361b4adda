// Copyright 2026 The otbary Authors
// SPDX-License-Identifier: Apache-2.0
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

#ifndef OTBARY_PARALLEL_H_
#define OTBARY_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace otbary {

// Number of worker threads used by ParallelFor. Defaults to the hardware
// concurrency; 1 forces serial execution.
size_t NumThreads();
void SetNumThreads(size_t n);

// Runs body(i) for i in [0, count). Iterations must write to disjoint
// outputs; results are therefore independent of scheduling. Calls nested
// inside a running ParallelFor execute serially on the calling worker.
void ParallelFor(size_t count, const std::function<void(size_t)>& body);

}  // namespace otbary

#endif  // OTBARY_PARALLEL_H_
