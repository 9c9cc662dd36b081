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

#ifndef FRIEDLAB_GREEN_REFLECTION_HPP_
#define FRIEDLAB_GREEN_REFLECTION_HPP_

#include <complex>
#include <string>
#include <vector>

#include "friedlab/artifact.hpp"
#include "friedlab/cutoff.hpp"
#include "friedlab/green_spectral.hpp"
#include "friedlab/model.hpp"

namespace friedlab {

// Phase parameters for the N-th reflected packet of one ladder block. The
// block's upper edge is the scale gamma; alpha is the transverse frequency in
// units of gamma, so the block weight reads block.weight(gamma * alpha).
struct ReflectionPhaseParams {
  ModelParams model;
  int N = 1;
  SpectralBlock block{0.25, 0.125};
  double t = 0.5;
  double x = 0.0;
  std::vector<double> y{0.0};

  double gamma() const { return block.upper; }
  double lambda_gamma() const;

  // psi2 block at scale gamma.
  static ReflectionPhaseParams make(const ModelParams& model, int N, double gamma, double t,
                                    double x, double y);
};

double phi_N(const ReflectionPhaseParams& p, std::span<const double> eta, double alpha,
             double sigma, double s);

struct PhaseGradient {
  double d_alpha = 0.0;
  std::vector<double> d_eta;
  double d_sigma = 0.0;
  double d_s = 0.0;
};

PhaseGradient phi_N_gradient(const ReflectionPhaseParams& p, std::span<const double> eta,
                             double alpha, double sigma, double s);

// Hessian in (alpha, eta), row major, size (1 + dim)^2.
std::vector<double> phi_N_hessian(const ReflectionPhaseParams& p, std::span<const double> eta,
                                  double alpha, double sigma, double s);

// M from the form bounds and eps0.
double window_constant(const QuadraticForm& form, double eps0);

struct NWindow {
  int n_lo = 1;
  int n_hi = 0;
  bool no_reflection = false;  // t below the threshold: only N = 0 contributes

  bool empty() const { return n_hi < n_lo; }
  // 0 followed by n_lo..n_hi.
  std::vector<int> members() const;
};

NWindow n_window(double t, double gamma, const QuadraticForm& form, double eps0, double a);

enum class CritStatus { kConverged, kNoCriticalPoint, kNonConvergence };

struct CriticalPoint {
  double alpha_c = 0.0;
  std::vector<double> eta_c;
  double residual_alpha = 0.0;  // |d_alpha Phi| / (gamma^{3/2} q^{1/2})
  double residual_eta = 0.0;    // |grad_eta Phi|
  bool converged = false;
  CritStatus status = CritStatus::kNonConvergence;
  int iterations = 0;
  double hessian_det = 0.0;
  int signature = 0;
};

// Damped Newton in (alpha, eta) started from eta = -y/2t and the matching
// alpha. Steps leaving alpha in [1/4, 2] or |eta| in [1/4, 2] are halved;
// leaving the box for good gives kNoCriticalPoint.
CriticalPoint solve_crit(const ReflectionPhaseParams& p, double sigma, double s);

// K at scale gamma = p.gamma(): solves eta + (gamma/2) tau^2 q(eta) grad q(eta) = -v
// with v = Y_over_4N / T_over_2N and returns tau q^{1/2}(eta), tau = T_over_2N.
double k_fun(const ReflectionPhaseParams& p, std::span<const double> Y_over_4N, double T_over_2N);

// Points y = sqrt(gamma) Y with K(Y/4N, T/2N) = 1, T = t/sqrt(gamma), one per
// ray (d = 2: negative and positive y). Throws Error(kDomain, "no-locus ...").
std::vector<double> swallowtail_locus(const ReflectionPhaseParams& p, int N);

enum class PacketMethod { kBrute, kReduced };

struct PacketValue {
  cplx value;
  PacketMethod method = PacketMethod::kBrute;
  double err_est = 0.0;
  std::string note;
};

std::string to_string(PacketMethod m);

// Smooth floor applied to the omega weights of the reflection representation;
// it vanishes below omega_lo and equals 1 above omega_hi < omega_1, so the
// spectral sum is unchanged.
struct OmegaFloor {
  double omega_lo = -1.0;
  double omega_hi = 0.5;
  double operator()(double omega) const;
};

enum class SigmaSMethod { kAiryClosedForm, kClippedQuadrature };

struct ReflectionOptions {
  EtaQuadrature eta;
  bool drop_psi1 = false;
  OmegaFloor floor;
  // omega quadrature: radians of total phase per Gauss panel
  double omega_radians_per_panel = 4.0;
  int omega_order = 16;
  SigmaSMethod sigma_s = SigmaSMethod::kAiryClosedForm;
  // Clipped quadrature: cutoff chi(sigma / (clip * sqrt(alpha))).
  double clip = 2.0;
  int sigma_nodes = 256;
  int alpha_nodes = 128;
  int eta_nodes = 256;
  // Reduced evaluator: minimum (sigma, s) nodes per axis and phase per panel.
  int reduced_nodes = 96;
  double reduced_radians_per_panel = 8.0;
};

// Packet V_N of one block at a single point, by direct quadrature of the
// (eta, alpha, sigma, s) integral. The (sigma, s) integrals are Airy functions
// in closed form by default; kClippedQuadrature integrates them numerically
// over |sigma|, |s| <= clip sqrt(alpha) and reports the clip sensitivity in
// note/err_est.
PacketValue v_n_brute(const ReflectionPhaseParams& p, const ReflectionOptions& opts = {});

// Stationary phase in (alpha, eta) at every (sigma, s) node with the leading
// symbol q psi psi2 e^{iNB} e^{-iN pi/2}; falls back to brute when the solver
// fails at a node carrying weight.
PacketValue v_n_reduced(const ReflectionPhaseParams& p, const ReflectionOptions& opts = {});

// N = 0 packet of the whole ladder (weight phi(./eps0)) reduced by exact
// stationary phase in (xi1, alpha); xi2 and eta by quadrature.
PacketValue v_0_free(const ModelParams& model, double t, double x, double y,
                     const ReflectionOptions& opts = {});

// The same N = 0 packet on a grid; one eta profile per x serves every y.
GreenField green_field_free(const ModelParams& model, double t, const std::vector<double>& xs,
                            const std::vector<double>& ys, const ReflectionOptions& opts = {});

// Per-N breakdown and total over a grid: all ladder blocks, each over N = 0
// and its window, with (sigma, s) in closed form.
struct ReflectionField {
  GreenField total;
  std::vector<int> n_values;                    // union of the windows
  std::vector<std::vector<cplx>> per_n;         // per_n[i][ix * ny + iy]
  CsvTable breakdown_csv(std::size_t ix, std::size_t iy) const;
};

struct ReflectionSumOptions {
  ReflectionOptions packet;
  // Extra reflections on both ends of each window (for truncation checks).
  int window_pad = 0;
  // Take -N for every N taken, so the window constrains |N|.
  bool include_negative = true;
};

// Packets V_N of one block for every N in ns, on a grid; total is their sum.
ReflectionField packet_field(const ModelParams& model, const SpectralBlock& block, double t,
                             const std::vector<double>& xs, const std::vector<double>& ys,
                             const std::vector<int>& ns, const ReflectionOptions& opts = {});

ReflectionField green_field_reflection(const ModelParams& model, double t,
                                       const std::vector<double>& xs,
                                       const std::vector<double>& ys,
                                       const ReflectionSumOptions& opts = {});

cplx g_reflection_total(const ModelParams& model, double t, double x, double y,
                        const ReflectionSumOptions& opts = {});

}  // namespace friedlab

#endif  // FRIEDLAB_GREEN_REFLECTION_HPP_
