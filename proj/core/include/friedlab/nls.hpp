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


#ifndef FRIEDLAB_NLS_HPP_
#define FRIEDLAB_NLS_HPP_

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "friedlab/artifact.hpp"
#include "friedlab/model.hpp"

namespace friedlab {

using cplx = std::complex<double>;

// x in [0, x_max] with Dirichlet ends, y periodic with period 2 pi ell, d = 2.
struct PeriodizedDomain {
  double x_max = 12.0;
  int n_x = 64;       // interior Gauss-Lobatto nodes
  double ell = 1.0;
  int n_y = 32;       // Fourier modes, even
  int k_max = 3;      // Airy modes certified per m != 0
  double tail_buffer = 5.0;  // in Airy lengths q^{-1/3}
  QuadraticForm form;

  void validate() const;
};

// Grid values are stored x-major: v[i * n_y + j]. Coefficients are stored
// c[k * n_y + jm] with jm the FFT index of m (m = jm for jm < n_y/2, jm - n_y
// otherwise).
using GridField = std::vector<cplx>;

struct SpectralState {
  std::vector<cplx> coeffs;
  double time = 0.0;
};

// Discrete eigenbasis of -Delta_F per Fourier mode: the x operator
// -d^2/dx^2 + theta^2 + x q(theta) is discretized on Legendre-Gauss-Lobatto
// nodes (Dirichlet at both ends) and diagonalized. The low modes of each
// m != 0 converge to the Airy eigenfunctions Ai(q^{1/3} x - omega_k), signed
// so that their slope at x = 0 is positive; the higher ones are box modes of
// the truncated interval. Every transform is orthogonal in the discrete
// inner product, so mass is conserved to rounding.
class SpectralTransform {
 public:
  explicit SpectralTransform(const PeriodizedDomain& domain);
  ~SpectralTransform();
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  const PeriodizedDomain& domain() const { return domain_; }
  int n_x() const { return domain_.n_x; }
  int n_y() const { return domain_.n_y; }
  std::size_t size() const { return static_cast<std::size_t>(domain_.n_x * domain_.n_y); }

  double x(int i) const { return x_[static_cast<std::size_t>(i)]; }
  double x_weight(int i) const { return wx_[static_cast<std::size_t>(i)]; }
  double y(int j) const;
  double dy() const;
  int m_of(int jm) const;
  double theta(int jm) const { return m_of(jm) / domain_.ell; }

  // lambda_{k,m}, k = 1..n_x.
  double eigenvalue(int jm, int k) const;
  // Basis function e_k(x_i) for Fourier index jm, normalized in L^2(0, x_max).
  double basis(int jm, int k, int i) const;
  // Number of Airy-certified modes at this jm (0 for m = 0).
  int certified_modes(int jm) const;
  // |e_k(x_max)| of the half-line Airy mode: the size of the error committed
  // by truncating at x_max. Zero for m = 0 (box modes, no truncation).
  double tail_bound(int jm, int k) const;
  // Largest |G - I| entry of the discrete Gram matrices.
  double gram_defect() const;

  SpectralState to_spectral(const GridField& v) const;
  GridField to_physical(const SpectralState& s) const;

  // Values at (x_i, y) for arbitrary y (trigonometric interpolation).
  std::vector<cplx> sample_y(const SpectralState& s, double y) const;
  // Values at (x, y_j) for arbitrary x in [0, x_max] (barycentric Lagrange
  // interpolation through all Lobatto nodes, boundary values zero).
  std::vector<cplx> values_at_x(const SpectralState& s, double x) const;
  // values_at_x(s, 0).
  std::vector<cplx> dirichlet_trace(const SpectralState& s) const;
  // sup |v| on a y grid refined by `factor` (zero padding).
  double sup_refined(const SpectralState& s, int factor) const;

 private:
  struct Plans;
  PeriodizedDomain domain_;
  std::vector<double> x_;
  std::vector<double> wx_;
  std::vector<double> nodes_;  // all Lobatto nodes on [0, x_max]
  std::vector<double> bary_;   // barycentric weights of nodes_
  // per |m|: eigenvalues (n_x) and orthonormal eigenvectors (n_x * n_x, column major)
  std::vector<std::vector<double>> lambda_;
  std::vector<std::vector<double>> vectors_;
  std::vector<int> certified_;
  std::unique_ptr<Plans> plans_;

  std::size_t abs_m_index(int jm) const;
};

void linear_flow(const SpectralTransform& tr, SpectralState& s, double dt);

// v <- e^{i kappa |v|^2 dt} v pointwise.
void nonlinear_phase(GridField& v, double dt, int kappa);

void strang_step(const SpectralTransform& tr, SpectralState& s, double dt, int kappa);

double mass(const SpectralState& s);
double energy(const SpectralTransform& tr, const SpectralState& s, int kappa);
double hm_norm(const SpectralTransform& tr, const SpectralState& s, double m);
// Fraction of the mass at the Nyquist column m = -n_y/2.
double nyquist_fraction(const SpectralTransform& tr, const SpectralState& s);
// Fraction of the mass outside the Airy-certified modes.
double uncertified_fraction(const SpectralTransform& tr, const SpectralState& s);

struct ObservableSample {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double trace = 0.0;  // max |v(0, y)|
};

struct ObservableSeries {
  std::vector<ObservableSample> samples;
  CsvTable to_csv() const;
};

struct EvolveOptions {
  double observe_every = 0.01;
  // Focusing runs need mass below this guard.
  double focusing_mass_limit = 1.0;
  // Written with the last finite state when a step produces NaN.
  std::filesystem::path checkpoint_on_failure;
  std::function<void(const SpectralState&)> on_sample;
};

ObservableSeries evolve(const SpectralTransform& tr, SpectralState& s, double t_end, double dt,
                        int kappa, const EvolveOptions& opts = {});

struct GrowthReport {
  double envelope_rate = 0.0;
  double intercept = 0.0;
  double max_excess = 0.0;  // largest residual above the affine fit, in log units
  bool pass = false;
};

// Affine least-squares envelope of log ||v||_{H^m}(t); m is 1 or 2 (the
// series columns). Requires a span of at least min_span time units.
GrowthReport growth_report(const ObservableSeries& series, int m, double min_span = 10.0);
GrowthReport growth_report(const std::vector<double>& t, const std::vector<double>& norm,
                           double min_span);

// Initial data.
SpectralState mode_state(const SpectralTransform& tr, int k, int m, cplx amplitude = 1.0);
// Airy mode k in x, Gaussian envelope over m centred at m0 with width dm.
SpectralState gallery_state(const SpectralTransform& tr, int k, double m0, double dm,
                            double mass);
// Gaussian packet exp(-|z - z0|^2 / (2 w^2)) e^{i (p . z)}, normalized to mass.
SpectralState gaussian_state(const SpectralTransform& tr, double x0, double y0, double wx,
                             double wy, double px, double py, double mass);
// Random coefficients on the certified modes with |m| in [m_lo, m_hi].
SpectralState random_band_state(const SpectralTransform& tr, std::uint64_t seed, int m_lo,
                                int m_hi, double mass);

// Binary checkpoint, little endian: "FLNLSCK1", int32 n_x, int32 n_y, float64
// time, then n_x * n_y (re, im) float64 pairs.
void write_checkpoint(const std::filesystem::path& path, const SpectralTransform& tr,
                      const SpectralState& s);
SpectralState read_checkpoint(const std::filesystem::path& path, const SpectralTransform& tr);

}  // namespace friedlab

#endif  // FRIEDLAB_NLS_HPP_
