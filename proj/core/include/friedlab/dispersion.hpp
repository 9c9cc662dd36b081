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


#ifndef FRIEDLAB_DISPERSION_HPP_
#define FRIEDLAB_DISPERSION_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "friedlab/artifact.hpp"
#include "friedlab/green_reflection.hpp"
#include "friedlab/green_spectral.hpp"
#include "friedlab/model.hpp"

namespace friedlab {

struct SupPoint {
  double sup = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::size_t ix = 0;
  std::size_t iy = 0;
  // The argmax sits on a y edge or the smallest x, so a wider grid may raise
  // sup. The largest x is not an edge: sweeps stop at x = a by symmetry.
  bool on_boundary = false;
};

// Largest |value|; ties keep the first grid point. Throws kPrecondition on an
// empty field.
SupPoint sup_field(const GreenField& field);

struct DecayFit {
  double exponent = 0.0;
  double log_constant = 0.0;
  double r_squared = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t points = 0;
  double decades() const;
};

// Least squares of log sup against log t. Needs at least 5 positive points
// spanning min_decades of t.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& sup,
                   double min_decades = 0.5);

// Plain least-squares slope and intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

enum class Evaluator { kSpectral, kReflection, kFree };
const char* to_string(Evaluator e);

// One t sweep of sup |G| over a grid x in (0, x_extent * a], y on the annulus
// |y| / (2t) in [eta_lo, eta_hi] (negative y; the unit and diagonal forms
// are even in y).
struct SweepSpec {
  Evaluator evaluator = Evaluator::kSpectral;
  std::vector<double> t_list;
  ModelParams params;
  std::string regime = "tangential";
  // 0 selects the whole ladder, otherwise the psi2 block at this scale.
  double gamma = 0.0;
  int n_x = 12;
  double x_extent = 1.0;
  // Fixed x values; overrides n_x and x_extent when nonempty.
  std::vector<double> xs;
  int n_y = 240;
  double eta_lo = 0.25;
  double eta_hi = 2.0;
  EtaQuadrature eta{1e-8, 1 << 18, 16, 12.0};
  ReflectionSumOptions reflection;

  // t strictly increasing and above h, a nonempty grid.
  void validate() const;
  std::vector<double> x_grid() const;
  std::vector<double> y_grid(double t) const;
};

struct SweepRow {
  double t = 0.0;
  SupPoint sup;
  double reference = 0.0;  // the bound's t-dependence at this t
  double ratio = 0.0;      // sup / reference
  std::string regime;
};

// Runs the sweep; reference(t) fills SweepRow::reference.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);
GreenField sweep_field(const SweepSpec& spec, double t);

// Verdict record of one claim.
struct BoundReport {
  std::string claim;
  std::string regime;
  std::map<std::string, double> params;
  std::vector<SweepRow> rows;
  std::vector<double> ratios;
  std::map<std::string, double> fit;
  // PASS, FAIL or OUTSIDE-WINDOW.
  std::string verdict = "FAIL";
  std::vector<std::string> notes;

  bool pass() const { return verdict == "PASS"; }
  std::string to_json() const;
  // t, sup, x, y, on_boundary, reference, ratio, regime
  CsvTable to_csv() const;
};

// max / min of positive ratios.
double ratio_spread(const std::vector<double>& ratios);

// sup |G| against h^{-d} (h/t)^{(d-1)/2 + 1/4}; PASS when the ratio spread
// is below spread_limit.
BoundReport verify_dispersion_upper(const SweepSpec& spec, double spread_limit = 10.0);

struct SaturationSpec {
  SweepSpec sweep;
  std::vector<double> a_list{0.15, 0.2, 0.3};
  double t_fixed = 0.75;
  double exponent_tol = 0.05;
  double a_exponent_tol = 0.07;
};

// Decay exponent over the window, a^{1/4} prefactor at t_fixed and argmax
// location against x = a and the K_a = 1 locus. Throws kConfig when the
// window sqrt(a) <= t, t h^{1/3} <= a is empty.
BoundReport verify_saturation(const SaturationSpec& spec);

// Regime of the psi2 block at scale gamma for time t.
enum class TransverseRegime { kManyReflections, kFewReflections, kNoReflection, kSeam };
const char* to_string(TransverseRegime r);
TransverseRegime transverse_regime(const ModelParams& params, double gamma, double t);

// Per-regime ratio spreads for one psi2 block (gamma > 8a), and the summed
// bound over gamma_j = 2^j a, j >= 3, with its log(eps0 / a) factor.
BoundReport verify_transverse(const SweepSpec& spec, double spread_limit = 10.0);

// N = 0 sup over the sweep against (h/t)^{d/2}; fitted exponent -d/2 within tol.
BoundReport verify_free_decay(const SweepSpec& spec, double tol = 0.05);

// Packet bounds of the block at scale a at x = a: for each (N, t) the worst
// ratio of hat V_N = |V_N| h^d (t/h)^{(d-1)/2} to the matching bound, and the
// value at the K_a = 1 locus scaled by (N / lambda^{1/3})^{1/4} / h^{1/3}.
// Each N is swept over t = f * t_N for f in t_factors, where t_N =
// 2 N sqrt(a) (1 + a) / m0 is the time at which the K_a = 1 point of packet N
// crosses |y| / 2t = 1 (exact for the unit form). A nonempty t_list replaces
// the per-N times.
struct PacketBoundSpec {
  ModelParams params;
  std::vector<int> n_list{1, 2, 3, 4};
  std::vector<double> t_factors{0.8, 0.9, 1.0, 1.1, 1.2};
  std::vector<double> t_list;
  int n_y = 160;
  double spread_limit = 10.0;
  ReflectionOptions packet;
};
std::vector<BoundReport> verify_packet_bounds(const PacketBoundSpec& spec);

// S(b, L) = sum_{k <= L} omega_k^{-1/2} Ai^2(b - omega_k) and S' with Ai'^2.
double airy_sum(double b, int L);
double airy_prime_sum(double b, int L);

struct AiryScanSpec {
  std::vector<int> l_list{16, 32, 64, 128, 256, 512, 1024};
  double b_step = 0.01;
  double b_max = 4.0;
  double tol = 0.05;
};
// sup_b S over b in [-omega_L - 2, b_max] and sup_b S' over b in [0, b_max];
// PASS when the growth exponents are below 1/3 + tol and 1 + tol.
BoundReport airy_sum_scan(const AiryScanSpec& spec);

enum class StrichartzFamily { kGallery, kFreeLike, kRandom };
const char* to_string(StrichartzFamily f);

struct StrichartzSpec {
  StrichartzFamily family = StrichartzFamily::kGallery;
  std::vector<double> h_list{0.1, 0.05, 0.025};
  double q = 8.0 / 3.0;
  double t_max = 0.5;
  // time samples per unit h
  double samples_per_h = 4.0;
  int n_x = 96;
  double x_max = 8.0;
  double x0 = 1.0;  // free-like packet centre
  std::uint64_t seed = 1;
  int refine = 4;
};

struct StrichartzPoint {
  double h = 0.0;
  double quotient = 0.0;
  double sup_t0 = 0.0;
  double refined_gap = 0.0;  // relative gain of sup under y refinement
  bool under_resolved = false;
  double uncertified = 0.0;
};

struct StrichartzResult {
  StrichartzFamily family = StrichartzFamily::kGallery;
  std::vector<StrichartzPoint> points;
  LineFit fit;           // log quotient against log(1/h)
  double baseline = 0.0;  // (d/2)(1/2 - 1/r) with r = infinity
  double loss = 0.0;      // fit.slope - baseline
  CsvTable to_csv() const;
};

// L^q_t L^infinity_x / L^2 quotients of the semiclassical linear flow
// e^{i h lambda t} on the periodized domain.
StrichartzResult strichartz_probe(const StrichartzSpec& spec);

}  // namespace friedlab

#endif  // FRIEDLAB_DISPERSION_HPP_
