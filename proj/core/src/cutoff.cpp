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

#include "friedlab/cutoff.hpp"

#include <cmath>

#include "friedlab/error.hpp"

namespace friedlab {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double CutoffFamily::psi(double u) const {
  return smooth_step(4.0 * (u - 0.5)) * smooth_step(4.0 * (1.5 - u));
}

double CutoffFamily::phi(double u) const { return smooth_step(2.0 * (1.0 - std::abs(u))); }

double CutoffFamily::eval(Cutoff which, double u) const {
  switch (which) {
    case Cutoff::kPsi: return psi(u);
    case Cutoff::kPsi1: return psi1(u);
    case Cutoff::kPhi: return phi(u);
    case Cutoff::kPsi2: return psi2(u);
  }
  return 0.0;
}

double cutoff_eval(const CutoffFamily& family, Cutoff which, double u, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::kDomain, "cutoff scale must be positive");
  return family.eval(which, u / scale);
}

double SpectralBlock::weight(const CutoffFamily& c, double u) const {
  const double top = c.phi(u / upper);
  return is_bottom() ? top : top - c.phi(u / lower);
}

std::vector<SpectralBlock> dyadic_ladder(double gamma_min, double eps0) {
  if (!(gamma_min > 0.0) || !(eps0 > 0.0)) {
    throw Error(ErrorKind::kDomain, "dyadic ladder needs positive scales");
  }
  std::vector<SpectralBlock> blocks;
  const double bottom = std::min(gamma_min, eps0);
  blocks.push_back({bottom, 0.0});
  double g = 2.0 * bottom;
  while (g < eps0) {
    blocks.push_back({g, 0.5 * g});
    g *= 2.0;
  }
  const double last = blocks.back().upper;
  if (last < eps0) blocks.push_back({eps0, last});
  return blocks;
}

}  // namespace friedlab
