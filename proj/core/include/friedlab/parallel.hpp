// Copyright 2026 The friedlab Authors.
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

#ifndef FRIEDLAB_PARALLEL_HPP_
#define FRIEDLAB_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace friedlab {

// Worker count used when a caller passes 0. Reads FRIEDLAB_WORKERS, then
// falls back to the hardware concurrency.
int default_workers();

// Sets the process-wide default (0 restores the environment lookup).
void set_default_workers(int workers);

// Runs body(i) for i in [0, n). Each index is owned by exactly one worker,
// so results written to slot i do not depend on the worker count. The
// exception thrown by the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  int workers = 0);

}  // namespace friedlab

#endif  // FRIEDLAB_PARALLEL_HPP_
