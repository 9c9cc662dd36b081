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

#include "friedlab/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "friedlab/airy.hpp"
#include "friedlab/error.hpp"
#include "friedlab/quadrature.hpp"

namespace friedlab {

QuadraticForm::QuadraticForm(int dim, std::vector<double> coeffs)
    : dim_(dim), coeffs_(std::move(coeffs)) {
  if (dim_ < 1) throw Error(ErrorKind::kDomain, "quadratic form needs dim >= 1");
  if (coeffs_.size() != static_cast<std::size_t>(dim_ * dim_)) {
    throw Error(ErrorKind::kDomain, "quadratic form coefficient count does not match dim^2");
  }
  Eigen::MatrixXd m(dim_, dim_);
  for (int j = 0; j < dim_; ++j) {
    for (int k = 0; k < dim_; ++k) {
      const double c = coeff(j, k);
      if (!std::isfinite(c)) throw Error(ErrorKind::kDomain, "non-finite coefficient");
      if (std::abs(c - coeff(k, j)) > 1e-14 * (std::abs(c) + 1.0)) {
        throw Error(ErrorKind::kDomain, "quadratic form is not symmetric");
      }
      m(j, k) = c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw Error(ErrorKind::kDomain, "quadratic form is not positive definite");
  m0_ = std::sqrt(lo);
  M0_ = std::sqrt(hi);
  isotropic_ = (hi - lo) <= 1e-14 * hi;
  if (isotropic_) {
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < dim_; ++k) {
        if (j != k && coeff(j, k) != 0.0) isotropic_ = false;
      }
    }
  }
}

QuadraticForm QuadraticForm::identity(int dim) {
  std::vector<double> c(static_cast<std::size_t>(dim * dim), 0.0);
  for (int j = 0; j < dim; ++j) c[static_cast<std::size_t>(j * dim + j)] = 1.0;
  return QuadraticForm(dim, std::move(c));
}

QuadraticForm QuadraticForm::diagonal(std::vector<double> diag) {
  const int dim = static_cast<int>(diag.size());
  std::vector<double> c(static_cast<std::size_t>(dim * dim), 0.0);
  for (int j = 0; j < dim; ++j) c[static_cast<std::size_t>(j * dim + j)] = diag[j];
  return QuadraticForm(dim, std::move(c));
}

double QuadraticForm::eval(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dim_) {
    throw Error(ErrorKind::kDomain, "q_eval: dimension mismatch");
  }
  double s = 0.0;
  for (int j = 0; j < dim_; ++j) {
    double row = 0.0;
    for (int k = 0; k < dim_; ++k) row += coeff(j, k) * theta[k];
    s += theta[j] * row;
  }
  return s;
}

void QuadraticForm::gradient(std::span<const double> theta, std::span<double> out) const {
  if (static_cast<int>(theta.size()) != dim_ || static_cast<int>(out.size()) != dim_) {
    throw Error(ErrorKind::kDomain, "q gradient: dimension mismatch");
  }
  for (int j = 0; j < dim_; ++j) {
    double row = 0.0;
    for (int k = 0; k < dim_; ++k) row += coeff(j, k) * theta[k];
    out[j] = 2.0 * row;
  }
}

double q_eval(const QuadraticForm& form, std::span<const double> theta) {
  return form.eval(theta);
}

void ModelParams::validate() const {
  if (!(h > 0.0 && h < 1.0)) throw Error(ErrorKind::kDomain, "h must lie in (0, 1)");
  if (d < 2) throw Error(ErrorKind::kDomain, "d must be >= 2");
  if (form.dim() != d - 1) throw Error(ErrorKind::kDomain, "form dimension must equal d - 1");
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw Error(ErrorKind::kDomain, "eps0 must lie in (0, 1)");
  if (!(a >= 0.0 && a <= eps0)) throw Error(ErrorKind::kDomain, "a must satisfy 0 <= a <= eps0");
  if (!(eps0 < 0.5 * form.m0())) throw Error(ErrorKind::kDomain, "eps0 must be below m0 / 2");
  if (!(t0 > 0.0)) throw Error(ErrorKind::kDomain, "T0 must be positive");
}

double ModelParams::h23() const { return std::cbrt(h * h); }

double ModelParams::gamma_min() const { return std::max(a, h23()); }

ModelParams geometry_from_json(const std::string& text, ModelParams base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("geometry: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "geometry: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "d" && it.key() != "q" && it.key() != "eps0") {
      throw Error(ErrorKind::kConfig, "geometry." + it.key() + ": unknown key");
    }
  }
  try {
    if (j.contains("d")) base.d = j.at("d").get<int>();
    if (j.contains("eps0")) base.eps0 = j.at("eps0").get<double>();
    if (j.contains("q")) {
      const auto& q = j.at("q");
      const int dim = static_cast<int>(q.size());
      std::vector<double> c;
      for (const auto& row : q) {
        if (static_cast<int>(row.size()) != dim) {
          throw Error(ErrorKind::kConfig, "geometry.q: matrix must be square");
        }
        for (const auto& v : row) c.push_back(v.get<double>());
      }
      base.form = QuadraticForm(dim, std::move(c));
    } else if (base.form.dim() != base.d - 1) {
      base.form = QuadraticForm::identity(base.d - 1);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("geometry: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    throw Error(ErrorKind::kConfig, std::string("geometry.q: ") + e.what());
  }
  if (base.form.dim() != base.d - 1) {
    throw Error(ErrorKind::kConfig, "geometry.q: dimension must be d - 1");
  }
  return base;
}

std::string geometry_to_json(const ModelParams& params) {
  nlohmann::json q = nlohmann::json::array();
  for (int j = 0; j < params.form.dim(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < params.form.dim(); ++k) row.push_back(params.form.coeff(j, k));
    q.push_back(row);
  }
  nlohmann::json out = {{"d", params.d}, {"q", q}, {"eps0", params.eps0}};
  return out.dump();
}

double eigenvalue(const ModelParams& params, int k, std::span<const double> theta) {
  double n2 = 0.0;
  for (double v : theta) n2 += v * v;
  const double q = params.form.eval(theta);
  return n2 + airy_zeros(k).omega(k) * std::cbrt(q * q);
}

double eigenfunction_q13(int k, double x, double q13) {
  const AiryZeroTable z = airy_zeros(k);
  const double norm = std::sqrt(2.0 * std::numbers::pi * q13 / z.lprime(k));
  return norm * ai(x * q13 - z.omega(k));
}

double eigenfunction(const ModelParams& params, int k, double x, std::span<const double> theta) {
  if (x < 0.0) throw Error(ErrorKind::kDomain, "eigenfunction needs x >= 0");
  return eigenfunction_q13(k, x, std::cbrt(params.form.eval(theta)));
}

double delta_expansion_residual(const ModelParams& params, std::span<const double> theta,
                                const std::function<double(double)>& f, double x_sup, int K) {
  if (K < 1) throw Error(ErrorKind::kDomain, "K must be >= 1");
  const double q13 = std::cbrt(params.form.eval(theta));
  const AiryZeroTable z = airy_zeros(K);
  const double x_end = std::max(x_sup, (z.omega(K) + 15.0) / q13);
  // Panels of width at most a quarter of the shortest local wavelength.
  const double wavelength = 2.0 * std::numbers::pi / std::sqrt(z.omega(K) + 1.0) / q13;
  // The support of f gets a denser grid so steep profile edges are resolved.
  const int inner = std::max(512, static_cast<int>(std::ceil(4.0 * x_sup / wavelength)));
  CompositeRule rule = composite_gauss(0.0, x_sup, inner, 16);
  if (x_end > x_sup) {
    const int outer = std::max(16, static_cast<int>(std::ceil(4.0 * (x_end - x_sup) / wavelength)));
    const CompositeRule tail = composite_gauss(x_sup, x_end, outer, 16);
    rule.x.insert(rule.x.end(), tail.x.begin(), tail.x.end());
    rule.w.insert(rule.w.end(), tail.w.begin(), tail.w.end());
  }

  std::vector<double> fv(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) fv[i] = rule.x[i] < x_sup ? f(rule.x[i]) : 0.0;
  std::vector<double> proj(rule.size(), 0.0);
  std::vector<double> ek(rule.size());
  for (int k = 1; k <= K; ++k) {
    const double norm = std::sqrt(2.0 * std::numbers::pi * q13 / z.lprime(k));
    double c = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      ek[i] = norm * ai(rule.x[i] * q13 - z.omega(k));
      c += rule.w[i] * fv[i] * ek[i];
    }
    for (std::size_t i = 0; i < rule.size(); ++i) proj[i] += c * ek[i];
  }
  double r2 = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double d = fv[i] - proj[i];
    r2 += rule.w[i] * d * d;
  }
  return std::sqrt(r2);
}

}  // namespace friedlab
