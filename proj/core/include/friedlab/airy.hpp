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

#ifndef FRIEDLAB_AIRY_HPP_
#define FRIEDLAB_AIRY_HPP_

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace friedlab {

// Real Airy functions. Values come from a Taylor table on [-32, 10] built
// once from the ODE y'' = x y, and from the Hankel expansions outside.
struct AiryValues {
  double ai;
  double aip;
  double bi;
  double bip;
};

double ai(double x);
double ai_prime(double x);
double bi(double x);
double bi_prime(double x);
AiryValues airy_all(double x);

// A_plus(w) = exp(-i pi/3) Ai(exp(-i pi/3) w) and its conjugate A_minus,
// evaluated for real w through Ai(-w) -/+ i Bi(-w) over two.
std::complex<double> a_plus(double omega);
std::complex<double> a_minus(double omega);

// Zeros -omega_k of Ai, k = 1, 2, ..., and L'(omega_k) obtained by
// quadrature of 2 pi * int_0^inf Ai(x - omega_k)^2 dx.
class AiryZeroTable {
 public:
  std::size_t size() const { return omega_.size(); }
  // 1-based accessors.
  double omega(int k) const { return omega_.at(static_cast<std::size_t>(k - 1)); }
  double lprime(int k) const { return lprime_.at(static_cast<std::size_t>(k - 1)); }
  const std::vector<double>& omegas() const { return omega_; }
  const std::vector<double>& lprimes() const { return lprime_; }

  // Columns k,omega_k,lprime_k at 17 significant digits.
  void write_csv(const std::string& path) const;

 private:
  friend AiryZeroTable airy_zeros(int k_max);
  std::vector<double> omega_;
  std::vector<double> lprime_;
};

// First k_max zeros. Results are cached and extended on demand.
AiryZeroTable airy_zeros(int k_max);

// Single zero without touching the cache.
double airy_zero(int k);

struct PhaseLConfig {
  int series_cutoff = 4;      // remainder terms kept above switch_point
  double switch_point = 10.0; // must be >= 1
};

// The Airy phase L(w) = pi + i log(A_minus / A_plus), continuous with
// L(0) = pi/3. Below switch_point it is the direct branch-tracked value;
// above, the large-w expansion with series_cutoff remainder terms.
double phase_L(double omega, const PhaseLConfig& cfg = {});
double phase_L_direct(double omega);
double phase_L_asymptotic(double omega, int series_cutoff);

// dL/dw = 2 / (pi (Ai(-w)^2 + Bi(-w)^2)).
double phase_L_derivative(double omega);

// L'(omega_k) from the table.
double phase_L_prime_at_zero(int k);

// Coefficients b_1, b_3, b_5, b_7 of the remainder expansion.
double remainder_coefficient(int index);

// B(w^{3/2}) = (4/3) w^{3/2} + pi/2 - L(w), w >= 1, direct route.
double b_remainder(double omega);

// Least-squares fit of B(u) ~ b1 / u over log-spaced u in [u_lo, u_hi].
double fit_b1(double u_lo = 1e2, double u_hi = 1e4, int samples = 64);

// Compactly supported test function on [lo, hi].
struct TestFunction {
  std::function<double(double)> f;
  double lo;
  double hi;
};

// exp(1 - 1 / (1 - s^2)) with s = (w - center) / half_width.
TestFunction bump(double center, double half_width);

struct PoissonCheck {
  double lhs_re = 0.0;
  double lhs_im = 0.0;
  double rhs = 0.0;
  double gap = 0.0;          // |lhs - rhs| / max(|rhs|, 1e-300) or |lhs| if rhs = 0
  double quadrature_err = 0.0;
};

// sum_{|N| <= n_max} int exp(-i N L(w)) phi(w) dw  against
// 2 pi sum_k phi(omega_k) / L'(omega_k).
PoissonCheck poisson_sum_check(const TestFunction& phi, int n_max);

// Same check at several truncations, sharing the quadrature.
std::vector<PoissonCheck> poisson_sum_sweep(const TestFunction& phi,
                                            const std::vector<int>& n_max);

}  // namespace friedlab

#endif  // FRIEDLAB_AIRY_HPP_
