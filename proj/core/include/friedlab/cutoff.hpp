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

#ifndef FRIEDLAB_CUTOFF_HPP_
#define FRIEDLAB_CUTOFF_HPP_

#include <vector>

namespace friedlab {

enum class Cutoff { kPsi, kPsi1, kPhi, kPsi2 };

// Smooth step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
double smooth_step(double t);

// psi = psi1: supported in [1/2, 3/2], equal to 1 on [3/4, 5/4].
// phi: supported in [-1, 1], equal to 1 on [-1/2, 1/2].
// psi2(u) = phi(u) - phi(2u).
struct CutoffFamily {
  double psi(double u) const;
  double psi1(double u) const { return psi(u); }
  double phi(double u) const;
  double psi2(double u) const { return phi(u) - phi(2.0 * u); }
  double eval(Cutoff which, double u) const;
};

// Profile evaluated at u / scale.
double cutoff_eval(const CutoffFamily& family, Cutoff which, double u, double scale);

// One block of the dyadic split of phi(u / eps0): the weight
// phi(u / upper) - phi(u / lower), or phi(u / upper) when lower == 0.
struct SpectralBlock {
  double upper = 0.0;
  double lower = 0.0;

  bool is_bottom() const { return lower == 0.0; }
  double weight(const CutoffFamily& c, double u) const;
  // Interval outside of which the weight vanishes.
  double support_lo() const { return is_bottom() ? 0.0 : 0.5 * lower; }
  double support_hi() const { return upper; }
};

// Bottom block at gamma_min = sup(a, h^{2/3}) (capped at eps0), dyadic
// blocks psi2(u / gamma_j) for gamma_j = 2^j gamma_min < eps0, and a top
// block closing the telescoping sum at eps0.
std::vector<SpectralBlock> dyadic_ladder(double gamma_min, double eps0);

}  // namespace friedlab

#endif  // FRIEDLAB_CUTOFF_HPP_
