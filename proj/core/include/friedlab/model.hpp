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

#ifndef FRIEDLAB_MODEL_HPP_
#define FRIEDLAB_MODEL_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "friedlab/cutoff.hpp"

namespace friedlab {

// Positive definite quadratic form q(theta) on R^{d-1}.
class QuadraticForm {
 public:
  QuadraticForm() : QuadraticForm(identity(1)) {}
  // coeffs is dim x dim, row major. Throws unless symmetric positive definite.
  QuadraticForm(int dim, std::vector<double> coeffs);

  static QuadraticForm identity(int dim);
  static QuadraticForm diagonal(std::vector<double> diag);

  int dim() const { return dim_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double coeff(int j, int k) const { return coeffs_[static_cast<std::size_t>(j * dim_ + k)]; }

  // inf and sup of q^{1/2} over the unit sphere.
  double m0() const { return m0_; }
  double M0() const { return M0_; }

  // True when q = c |theta|^2.
  bool is_isotropic() const { return isotropic_; }

  double eval(std::span<const double> theta) const;
  void gradient(std::span<const double> theta, std::span<double> out) const;

 private:
  int dim_ = 1;
  std::vector<double> coeffs_;
  double m0_ = 1.0;
  double M0_ = 1.0;
  bool isotropic_ = true;
};

double q_eval(const QuadraticForm& form, std::span<const double> theta);

// Model parameters. Invariants: h in (0, 1), 0 <= a <= eps0, eps0 < m0 / 2.
struct ModelParams {
  double h = 0.05;
  double a = 0.0;
  double eps0 = 0.3;
  int d = 2;
  double t0 = 1.0;
  QuadraticForm form;
  CutoffFamily cutoffs;

  // Throws Error(kDomain) on a violated invariant.
  void validate() const;

  double gamma_min() const;
  double h23() const;
};

// Parses {"d": int, "q": [[...]], "eps0": real}. Missing keys keep the
// defaults of ModelParams; unknown keys are rejected.
ModelParams geometry_from_json(const std::string& text, ModelParams base = {});
std::string geometry_to_json(const ModelParams& params);

// lambda_k(theta) = |theta|^2 + omega_k q(theta)^{2/3}.
double eigenvalue(const ModelParams& params, int k, std::span<const double> theta);

// e_k(x, theta) = sqrt(2 pi) q^{1/6} / sqrt(L'(omega_k)) Ai(x q^{1/3} - omega_k).
double eigenfunction(const ModelParams& params, int k, double x, std::span<const double> theta);

// Same with q(theta)^{1/3} supplied by the caller.
double eigenfunction_q13(int k, double x, double q13);

// L2 distance between f and its projection on e_1..e_K at frequency theta.
// f must vanish outside (0, x_sup).
double delta_expansion_residual(const ModelParams& params, std::span<const double> theta,
                                const std::function<double(double)>& f, double x_sup, int K);

}  // namespace friedlab

#endif  // FRIEDLAB_MODEL_HPP_
