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

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "friedlab/airy.hpp"
#include "friedlab/cutoff.hpp"
#include "friedlab/error.hpp"

namespace {

using friedlab::ModelParams;
using friedlab::QuadraticForm;

ModelParams unit_params() {
  ModelParams p;
  p.form = QuadraticForm::identity(1);
  return p;
}

TEST(QuadraticForm, Evaluation) {
  const auto unit = QuadraticForm::identity(1);
  const double one[] = {1.0};
  EXPECT_EQ(friedlab::q_eval(unit, one), 1.0);
  const auto two = QuadraticForm::diagonal({2.0});
  const double three[] = {3.0};
  EXPECT_DOUBLE_EQ(friedlab::q_eval(two, three), 18.0);
  EXPECT_DOUBLE_EQ(two.m0(), std::sqrt(2.0));
  const double scaled[] = {7.5};
  EXPECT_NEAR(friedlab::q_eval(two, scaled), 2.5 * 2.5 * 18.0, 1e-12);
  const double bad[] = {1.0, 2.0};
  EXPECT_THROW(friedlab::q_eval(unit, bad), friedlab::Error);
}

TEST(QuadraticForm, RejectsIndefiniteOrAsymmetric) {
  EXPECT_THROW(QuadraticForm(2, {1.0, 2.0, 2.0, 1.0}), friedlab::Error);
  EXPECT_THROW(QuadraticForm(2, {1.0, 0.1, 0.2, 1.0}), friedlab::Error);
}

TEST(QuadraticForm, BoundsMatchAngularSampling) {
  const QuadraticForm form(2, {2.0, 0.3, 0.3, 0.7});
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double th = std::numbers::pi * i / 200000.0;
    const double v[] = {std::cos(th), std::sin(th)};
    const double r = std::sqrt(form.eval(v));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_NEAR(form.m0(), lo, 1e-6);
  EXPECT_NEAR(form.M0(), hi, 1e-6);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    const double v[] = {g(rng), g(rng)};
    const double n2 = v[0] * v[0] + v[1] * v[1];
    const double q = form.eval(v);
    EXPECT_GE(q, form.m0() * form.m0() * n2 * (1 - 1e-12));
    EXPECT_LE(q, form.M0() * form.M0() * n2 * (1 + 1e-12));
  }
}

TEST(Eigen, EigenvalueFormulaAndOrdering) {
  const ModelParams p = unit_params();
  const double one[] = {1.0};
  EXPECT_NEAR(friedlab::eigenvalue(p, 1, one), 1.0 + friedlab::airy_zero(1), 1e-14);
  for (int k = 2; k <= 20; ++k) {
    EXPECT_GT(friedlab::eigenvalue(p, k, one), friedlab::eigenvalue(p, k - 1, one));
  }
}

TEST(Eigen, DirichletAndNormalization) {
  const ModelParams p = unit_params();
  const double one[] = {1.0};
  using boost::math::quadrature::gauss_kronrod;
  for (int k : {1, 5, 20}) {
    EXPECT_LT(std::abs(friedlab::eigenfunction(p, k, 0.0, one)), 1e-12);
    const double tp = friedlab::airy_zero(k);
    auto f = [&](double x) {
      const double e = friedlab::eigenfunction(p, k, x, one);
      return e * e;
    };
    double err = 0;
    const double n = gauss_kronrod<double, 61>::integrate(f, 0.0, tp + 15.0, 20, 1e-14, &err);
    EXPECT_NEAR(n, 1.0, 1e-8) << k;
  }
}

TEST(Eigen, GramMatrixIsIdentity) {
  for (double qq : {1.0, 2.0}) {
    ModelParams p;
    p.form = QuadraticForm::diagonal({qq});
    const double theta[] = {1.3};
    const double q13 = std::cbrt(p.form.eval(theta));
    const int K = 20;
    const double x_end = (friedlab::airy_zero(K) + 15.0) / q13;
    using boost::math::quadrature::gauss_kronrod;
    for (int j = 1; j <= K; ++j) {
      for (int k = j; k <= K; ++k) {
        auto f = [&](double x) {
          return friedlab::eigenfunction(p, j, x, theta) * friedlab::eigenfunction(p, k, x, theta);
        };
        const double g = gauss_kronrod<double, 61>::integrate(f, 0.0, x_end, 25, 1e-14);
        EXPECT_NEAR(g, j == k ? 1.0 : 0.0, 1e-7) << j << "," << k;
      }
    }
  }
}

// Fourth-order finite differences of -u'' + (|theta|^2 + x q) u against
// lambda u.
TEST(Eigen, FiniteDifferenceResidual) {
  for (double qq : {1.0, 2.0}) {
    ModelParams p;
    p.form = QuadraticForm::diagonal({qq});
    const double theta[] = {0.8};
    const double q = p.form.eval(theta);
    for (int k = 1; k <= 30; ++k) {
      const double lam = friedlab::eigenvalue(p, k, theta);
      const double x_end = (friedlab::airy_zero(k) + 12.0) / std::cbrt(q);
      const double dx = 2e-3;
      const int n = static_cast<int>(x_end / dx);
      std::vector<double> u(n + 5);
      for (int i = 0; i < n + 5; ++i) u[i] = friedlab::eigenfunction(p, k, (i + 2) * dx, theta);
      double num = 0.0, den = 0.0;
      for (int i = 2; i < n + 2; ++i) {
        const double x = (i + 2) * dx;
        const double d2 = (-u[i - 2] + 16 * u[i - 1] - 30 * u[i] + 16 * u[i + 1] - u[i + 2]) /
                          (12 * dx * dx);
        const double lhs = -d2 + (theta[0] * theta[0] + x * q) * u[i];
        num += (lhs - lam * u[i]) * (lhs - lam * u[i]);
        den += (lam * u[i]) * (lam * u[i]);
      }
      EXPECT_LT(std::sqrt(num / den), 1e-6) << "k=" << k << " q=" << qq;
    }
  }
}

TEST(Eigen, DecayBeyondTurningPoint) {
  const ModelParams p = unit_params();
  const double theta[] = {1.1};
  const double q13 = std::cbrt(p.form.eval(theta));
  for (int k = 1; k <= 10; ++k) {
    const double tp = friedlab::airy_zero(k) / q13;
    double prev = std::abs(friedlab::eigenfunction(p, k, 1.2 * tp, theta));
    for (double x = 1.2 * tp + 0.01; x < tp + 10.0; x += 0.01) {
      const double cur = std::abs(friedlab::eigenfunction(p, k, x, theta));
      EXPECT_LT(cur, prev) << k << " " << x;
      prev = cur;
    }
  }
}

TEST(DeltaExpansion, ConvergesForSmoothProfiles) {
  const ModelParams p = unit_params();
  const double one[] = {1.0};
  auto bump = [](double x) {
    const double s = (x - 1.0) / 0.3;
    return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
  };
  // Residuals from an independent adaptive-quadrature projection (scipy).
  const std::pair<int, double> frozen[] = {
      {8, 0.4143433153}, {16, 0.3883497596}, {32, 0.2994834065}, {64, 0.2727454980}};
  double prev = 1e300;
  for (const auto& [K, ref] : frozen) {
    const double r = friedlab::delta_expansion_residual(p, one, bump, 1.3, K);
    EXPECT_LT(r, prev) << K;
    EXPECT_NEAR(r, ref, 1e-7) << K;
    prev = r;
  }

  auto e3 = [&](double x) { return friedlab::eigenfunction(p, 3, x, one); };
  const double x_sup = friedlab::airy_zero(3) + 15.0;
  EXPECT_LT(friedlab::delta_expansion_residual(p, one, e3, x_sup, 3), 1e-7);
}

TEST(Cutoffs, ProfilesAndPlateaus) {
  const friedlab::CutoffFamily c;
  EXPECT_EQ(c.psi(1.0), 1.0);
  EXPECT_EQ(c.psi(0.75), 1.0);
  EXPECT_EQ(c.psi(1.25), 1.0);
  EXPECT_EQ(c.psi(0.4), 0.0);
  EXPECT_EQ(c.psi(1.5), 0.0);
  EXPECT_EQ(c.phi(0.5), 1.0);
  EXPECT_EQ(c.phi(-0.5), 1.0);
  EXPECT_EQ(c.phi(1.0), 0.0);
  for (double u = -2.0; u <= 2.0; u += 0.013) {
    EXPECT_GE(c.psi(u), 0.0);
    EXPECT_LE(c.psi(u), 1.0);
    EXPECT_DOUBLE_EQ(c.psi2(u), c.phi(u) - c.phi(2 * u));
  }
  EXPECT_THROW(friedlab::cutoff_eval(c, friedlab::Cutoff::kPhi, 0.1, 0.0), friedlab::Error);
}

TEST(Cutoffs, LadderTelescopes) {
  const friedlab::CutoffFamily c;
  for (double gmin : {0.01, 0.05, 0.1357, 0.25}) {
    const double eps0 = 0.3;
    const auto blocks = friedlab::dyadic_ladder(gmin, eps0);
    for (double u = 0.0; u <= 0.5; u += 0.0007) {
      double s = 0.0;
      for (const auto& b : blocks) s += b.weight(c, u);
      EXPECT_NEAR(s, c.phi(u / eps0), 1e-12);
    }
    double s = 0.0;
    for (const auto& b : blocks) s += b.weight(c, 0.3 * eps0);
    EXPECT_NEAR(s, c.phi(0.3), 1e-12);
    // Interior blocks are psi2 at the dyadic scale.
    for (std::size_t j = 1; j + 1 < blocks.size(); ++j) {
      EXPECT_DOUBLE_EQ(blocks[j].upper, 2.0 * blocks[j].lower);
      EXPECT_NEAR(blocks[j].weight(c, 0.37 * blocks[j].upper), c.psi2(0.37), 1e-15);
    }
  }
}

TEST(Geometry, JsonRoundTripAndValidation) {
  const auto p = friedlab::geometry_from_json(R"({"d": 2, "q": [[2.0]], "eps0": 0.4})");
  EXPECT_EQ(p.d, 2);
  EXPECT_DOUBLE_EQ(p.form.coeff(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(p.eps0, 0.4);
  EXPECT_NO_THROW(p.validate());
  const auto back = friedlab::geometry_from_json(friedlab::geometry_to_json(p));
  EXPECT_DOUBLE_EQ(back.form.coeff(0, 0), 2.0);
  EXPECT_THROW(friedlab::geometry_from_json(R"({"d": 2, "qq": [[1]]})"), friedlab::Error);
  EXPECT_THROW(friedlab::geometry_from_json(R"({"d": 3, "q": [[1]]})"), friedlab::Error);
  auto q = friedlab::geometry_from_json(R"({"eps0": 0.6})");
  EXPECT_THROW(q.validate(), friedlab::Error);
  ModelParams r = unit_params();
  r.h = 1.2;
  EXPECT_THROW(r.validate(), friedlab::Error);
  r.h = 0.05;
  r.a = 0.31;
  EXPECT_THROW(r.validate(), friedlab::Error);
}

}  // namespace
