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

#ifndef FRIEDLAB_SRC_AIRY_INTERNAL_HPP_
#define FRIEDLAB_SRC_AIRY_INTERNAL_HPP_

namespace friedlab::detail {

// Sums P and Q of the oscillatory Hankel expansion at z > 0, where
// Ai(-z) - i Bi(-z) = exp(i (zeta - pi/4)) (P - i Q) / (sqrt(pi) z^{1/4}).
void hankel_pq(double z, double& p, double& q);

// Ai(x) / Bi(x) for x > 10 without overflow.
double ai_over_bi(double x);

// Boundaries of the tabulated range.
double table_lo();
double table_hi();

}  // namespace friedlab::detail

#endif  // FRIEDLAB_SRC_AIRY_INTERNAL_HPP_
