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

#ifndef FRIEDLAB_GREEN_SPECTRAL_HPP_
#define FRIEDLAB_GREEN_SPECTRAL_HPP_

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "friedlab/artifact.hpp"
#include "friedlab/cutoff.hpp"
#include "friedlab/model.hpp"

namespace friedlab {

using cplx = std::complex<double>;

// Airy modes that can carry weight in one spectral block.
struct ModeWindow {
  double gamma = 0.0;
  int k_lo = 1;
  int k_hi = 0;

  bool empty() const { return k_hi < k_lo; }
  int count() const { return empty() ? 0 : k_hi - k_lo + 1; }
  bool contains(int k) const { return k >= k_lo && k <= k_hi; }
};

// Block psi2(./gamma), i.e. the ladder block with upper = gamma, lower = gamma/2.
// Throws Error(kPrecondition) for gamma <= 0 or gamma > eps0.
ModeWindow mode_window(const ModelParams& params, double gamma);
ModeWindow mode_window(const ModelParams& params, const SpectralBlock& block);

// Composite Gauss-Legendre in the tangential frequency, refined by panel
// doubling until the change is below rel_tol times the largest |value|.
struct EtaQuadrature {
  double rel_tol = 1e-8;
  int max_nodes = 1 << 18;
  int order = 16;
  double radians_per_panel = 4.0;
};

struct GreenOptions {
  EtaQuadrature eta;
  bool drop_psi1 = false;
  // Extra modes on both ends of each window (weights vanish there).
  int window_pad = 0;
};

// Which part of the ladder to evaluate.
struct BlockSelection {
  // Sum of all blocks, equal to a single phi(./eps0) weight.
  static BlockSelection total(const ModelParams& params);
  static BlockSelection psi2(double gamma);
  static BlockSelection of(const SpectralBlock& block);

  SpectralBlock block;
  std::string tag;
};

struct GreenField {
  double t = 0.0;
  double h = 0.0;
  double a = 0.0;
  std::string gamma_tag;
  std::string evaluator;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<cplx> values;    // values[ix * ys.size() + iy]
  std::vector<double> err;     // per-point error estimate
  int eta_nodes = 0;           // nodes in the accepted eta rule
  double err_max = 0.0;
  double tolerance = 0.0;

  cplx at(std::size_t ix, std::size_t iy) const { return values[ix * ys.size() + iy]; }
  CsvTable to_csv() const;
};

struct GreenValue {
  cplx value;
  double err_est = 0.0;
  int eta_nodes = 0;
};

GreenField green_field_spectral(const ModelParams& params, double t, const std::vector<double>& xs,
                                const std::vector<double>& ys, const BlockSelection& sel,
                                const GreenOptions& opts = {});

GreenValue g_gamma_spectral(const ModelParams& params, double t, double x, double y, double gamma,
                            const GreenOptions& opts = {});

GreenValue g_block_spectral(const ModelParams& params, double t, double x, double y,
                            const SpectralBlock& block, const GreenOptions& opts = {});

GreenValue g_total_spectral(const ModelParams& params, double t, double x, double y,
                            const GreenOptions& opts = {});

// Writes <stem>.csv and <stem>.manifest.json; returns both records, CSV first.
std::vector<ArtifactRecord> write_green_field(const GreenField& field, const ModelParams& params,
                                              const std::filesystem::path& dir,
                                              const std::string& stem);

}  // namespace friedlab

#endif  // FRIEDLAB_GREEN_SPECTRAL_HPP_
