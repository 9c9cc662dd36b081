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

// Shared tangential-frequency integral for the d = 2 Green evaluators.
#ifndef FRIEDLAB_SRC_ETA_INTEGRAL_HPP_
#define FRIEDLAB_SRC_ETA_INTEGRAL_HPP_

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "friedlab/cutoff.hpp"
#include "friedlab/green_spectral.hpp"

namespace friedlab::detail {

// profile(ix, eta, out) fills out[j * ncomp + c] = S_c(xs[ix], eta[j]) for
// eta > 0. Each component must be even in eta; component c of the result is
//   (2 pi h)^{-1} int e^{i(y eta + t eta^2)/h} psi(|eta|) S_c(x, |eta|) d eta.
using EtaProfile = std::function<void(std::size_t ix, std::span<const double> eta,
                                      std::span<std::complex<double>> out)>;

struct EtaFieldResult {
  // values[c * nx * ny + ix * ny + iy]
  std::vector<std::complex<double>> values;
  std::vector<double> err;
  int nodes = 0;
};

// extra_rate bounds |d/d eta| of the profile phase (radians per unit eta),
// used only to pick the starting panel count.
EtaFieldResult eta_field(const std::vector<double>& xs, const std::vector<double>& ys, double t,
                         double h, const CutoffFamily& cutoffs, const EtaProfile& profile,
                         double extra_rate, const EtaQuadrature& quad, int ncomp = 1);

void require_d2(const ModelParams& params);

}  // namespace friedlab::detail

#endif  // FRIEDLAB_SRC_ETA_INTEGRAL_HPP_
