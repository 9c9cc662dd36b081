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

#include "friedlab/green_reflection.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "friedlab/airy.hpp"
#include "friedlab/error.hpp"
#include "friedlab/quadrature.hpp"

namespace {

using friedlab::cplx;
using friedlab::CritStatus;
using friedlab::ModelParams;
using friedlab::ReflectionPhaseParams;

constexpr double kPi = std::numbers::pi;

ModelParams desk(double h = 0.05, double a = 0.25) {
  ModelParams p;
  p.form = friedlab::QuadraticForm::identity(1);
  p.h = h;
  p.a = a;
  p.eps0 = 0.45;
  return p;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

TEST(PhiN, FreePhaseWhenPacketTermsVanish) {
  const auto p = ReflectionPhaseParams::make(desk(), 0, 0.25, 0.7, 0.1, 0.0);
  for (double eta : {-1.2, 0.6, 1.4}) {
    for (double alpha : {0.3, 1.1}) {
      const double e[] = {eta};
      const double want = 0.7 * eta * eta * (1.0 + 0.25 * alpha);
      EXPECT_NEAR(friedlab::phi_N(p, e, alpha, 0.0, 0.0), want, 1e-14);
    }
  }
  const double e[] = {1.0};
  EXPECT_THROW(friedlab::phi_N(p, e, 0.0, 0.0, 0.0), friedlab::Error);
}

TEST(PhiN, GradientAndHessianMatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    ModelParams m = desk(0.05, 0.3 * u(rng));
    m.form = friedlab::QuadraticForm::diagonal({0.8 + 0.6 * u(rng)});
    auto p = ReflectionPhaseParams::make(m, 1 + trial % 5, 0.1 + 0.3 * u(rng), 0.2 + u(rng),
                                         0.3 * u(rng), -2.0 + 4.0 * u(rng));
    const double eta = (trial % 2 ? -1.0 : 1.0) * (0.5 + u(rng));
    const double alpha = 0.3 + 1.5 * u(rng);
    const double sigma = -2.0 + 4.0 * u(rng), s = -2.0 + 4.0 * u(rng);
    const double step = 1e-5;
    auto phi = [&](double e, double al, double sg, double ss) {
      const double v[] = {e};
      return friedlab::phi_N(p, v, al, sg, ss);
    };
    const double e0[] = {eta};
    const auto g = friedlab::phi_N_gradient(p, e0, alpha, sigma, s);
    const double fd_a = (phi(eta, alpha + step, sigma, s) - phi(eta, alpha - step, sigma, s)) / (2 * step);
    const double fd_e = (phi(eta + step, alpha, sigma, s) - phi(eta - step, alpha, sigma, s)) / (2 * step);
    const double fd_sg = (phi(eta, alpha, sigma + step, s) - phi(eta, alpha, sigma - step, s)) / (2 * step);
    const double fd_s = (phi(eta, alpha, sigma, s + step) - phi(eta, alpha, sigma, s - step)) / (2 * step);
    EXPECT_NEAR(g.d_alpha, fd_a, 1e-7 * std::max(1.0, std::abs(fd_a)));
    EXPECT_NEAR(g.d_eta[0], fd_e, 1e-7 * std::max(1.0, std::abs(fd_e)));
    EXPECT_NEAR(g.d_sigma, fd_sg, 1e-7 * std::max(1.0, std::abs(fd_sg)));
    EXPECT_NEAR(g.d_s, fd_s, 1e-7 * std::max(1.0, std::abs(fd_s)));

    const auto H = friedlab::phi_N_hessian(p, e0, alpha, sigma, s);
    const double ep[] = {eta + step}, em[] = {eta - step};
    const auto ga_p = friedlab::phi_N_gradient(p, e0, alpha + step, sigma, s);
    const auto ga_m = friedlab::phi_N_gradient(p, e0, alpha - step, sigma, s);
    const auto ge_p = friedlab::phi_N_gradient(p, ep, alpha, sigma, s);
    const auto ge_m = friedlab::phi_N_gradient(p, em, alpha, sigma, s);
    const double haa = (ga_p.d_alpha - ga_m.d_alpha) / (2 * step);
    const double hae = (ge_p.d_alpha - ge_m.d_alpha) / (2 * step);
    const double hee = (ge_p.d_eta[0] - ge_m.d_eta[0]) / (2 * step);
    EXPECT_NEAR(H[0], haa, 1e-7 * std::max(1.0, std::abs(haa)));
    EXPECT_NEAR(H[1], hae, 1e-7 * std::max(1.0, std::abs(hae)));
    EXPECT_NEAR(H[2], hae, 1e-7 * std::max(1.0, std::abs(hae)));
    EXPECT_NEAR(H[3], hee, 1e-7 * std::max(1.0, std::abs(hee)));
  }
}

TEST(PhiN, OddUnderFullSignFlip) {
  // Phi(-N, -t, -y; -sigma, -s) = -Phi(N, t, y; sigma, s).
  auto p = ReflectionPhaseParams::make(desk(), 3, 0.3, 0.8, 0.12, -1.1);
  auto q = p;
  q.N = -3;
  q.t = -0.8;
  q.y = {1.1};
  const double e[] = {0.9};
  EXPECT_NEAR(friedlab::phi_N(q, e, 0.7, 0.4, -1.3), -friedlab::phi_N(p, e, 0.7, -0.4, 1.3), 1e-13);
}

TEST(NWindow, ConstantAndExampleWindow) {
  const auto unit = friedlab::QuadraticForm::identity(1);
  const double M = friedlab::window_constant(unit, 0.3);
  EXPECT_NEAR(M, 4.0 * std::max(std::sqrt(1.5) / 0.7, 1.3 / std::sqrt(0.5)), 1e-14);
  const auto w = friedlab::n_window(0.6, 0.25, unit, 0.3, 0.0);
  EXPECT_FALSE(w.no_reflection);
  EXPECT_EQ(w.n_lo, 1);
  EXPECT_EQ(w.n_hi, static_cast<int>(std::floor(M * 1.2 / 2.0)));
  // Centre of the window (geometric mean of its ends) is T/2 = 0.6.
  EXPECT_NEAR(std::sqrt((1.2 / (2.0 * M)) * (M * 1.2 / 2.0)), 0.6, 1e-12);
  EXPECT_EQ(w.members().front(), 0);
  EXPECT_EQ(w.members().size(), static_cast<std::size_t>(w.n_hi + 1));
}

TEST(NWindow, NoReflectionBelowThreshold) {
  const auto unit = friedlab::QuadraticForm::identity(1);
  const double a = 0.05, gamma = 8.0 * a;
  const double threshold = (a / std::sqrt(gamma)) / (2.0 * std::sqrt(1.5));
  const auto below = friedlab::n_window(0.9 * threshold, gamma, unit, 0.3, a);
  EXPECT_TRUE(below.no_reflection);
  EXPECT_EQ(below.members(), std::vector<int>{0});
  // Just above the threshold the window can still be empty, which also
  // leaves only the free term.
  EXPECT_TRUE(friedlab::n_window(1.1 * threshold, gamma, unit, 0.3, a).no_reflection);
  const auto above = friedlab::n_window(0.5, gamma, unit, 0.3, a);
  EXPECT_FALSE(above.no_reflection);
  EXPECT_GE(above.n_hi, above.n_lo);
  EXPECT_THROW(friedlab::n_window(0.0, gamma, unit, 0.3, a), friedlab::Error);
}

TEST(SolveCrit, ResidualContractOverGrid) {
  const auto p = ReflectionPhaseParams::make(desk(), 2, 0.25, 0.6, 0.25, -1.4);
  int converged = 0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double sigma = -2.0 + 0.2 * i, s = -2.0 + 0.2 * j;
      const auto c = friedlab::solve_crit(p, sigma, s);
      EXPECT_NE(c.status, CritStatus::kNonConvergence) << sigma << " " << s;
      if (!c.converged) continue;
      ++converged;
      EXPECT_LT(c.residual_alpha, 1e-12);
      EXPECT_LT(c.residual_eta, 1e-12);
      EXPECT_GE(c.alpha_c, 0.25);
      EXPECT_LE(c.alpha_c, 2.0);
      const auto g = friedlab::phi_N_gradient(p, c.eta_c, c.alpha_c, sigma, s);
      EXPECT_LT(std::abs(g.d_eta[0]), 1e-12);
      EXPECT_LT(std::abs(g.d_alpha), 1e-12);
      EXPECT_EQ(c.signature, 0);  // d_alpha^2 Phi < 0 < d_eta^2 Phi
      EXPECT_LT(c.hessian_det, 0.0);
    }
  }
  EXPECT_GT(converged, 50);
}

TEST(SolveCrit, LeadingOrderAtTinyGamma) {
  // a and x scale with gamma so the packet bracket stays O(1).
  const double T = 4.2, y_over_t = -2.0;
  const int N = 3;
  std::vector<double> lg, ldev;
  for (double g : {1e-5, 1e-4, 1e-3}) {
    ModelParams m = desk(0.05, 0.0);
    m.a = 0.5 * g;
    const double t = T * std::sqrt(g);
    const auto p = ReflectionPhaseParams::make(m, N, g, t, 0.5 * g, y_over_t * t);
    const double sigma = 0.3, s = -0.2;
    const auto c = friedlab::solve_crit(p, sigma, s);
    ASSERT_TRUE(c.converged) << g;
    const double eta0 = -y_over_t / 2.0;
    const double pred = T / (2.0 * N) * eta0 - (sigma + s) / (2.0 * N);
    EXPECT_LT(std::abs(c.eta_c[0] - eta0), 10.0 * g);
    EXPECT_LT(std::abs(c.alpha_c - pred * pred), 10.0 * g);
    lg.push_back(std::log(g));
    ldev.push_back(std::log(std::abs(std::sqrt(c.alpha_c) - pred)));
  }
  EXPECT_NEAR(fit_slope(lg, ldev), 1.0, 0.1);
}

TEST(SolveCrit, HessianDeterminantGrowsLikeTN) {
  // T ~ N keeps alpha_c fixed; det / t then grows linearly in N.
  const ModelParams m = desk(0.02, 0.3);
  for (double g : {0.05, 0.3}) {
    std::vector<double> ln, ld;
    for (int N = 1; N <= 12; ++N) {
      const double t = 1.4 * N * std::sqrt(g);
      const auto c = friedlab::solve_crit(ReflectionPhaseParams::make(m, N, g, t, m.a, -2.0 * t), 0, 0);
      ASSERT_TRUE(c.converged) << N;
      ln.push_back(std::log(N));
      ld.push_back(std::log(std::abs(c.hessian_det) / t));
    }
    EXPECT_NEAR(fit_slope(ln, ld), 1.0, 0.1) << g;
  }
}

TEST(SolveCrit, ReportsMissingCriticalPoint) {
  // eta = -y/2t = 3 is outside the admissible box.
  const auto p = ReflectionPhaseParams::make(desk(), 1, 0.25, 0.5, 0.1, -3.0);
  const auto c = friedlab::solve_crit(p, 0.0, 0.0);
  EXPECT_FALSE(c.converged);
  EXPECT_EQ(c.status, CritStatus::kNoCriticalPoint);
}

// K for the unit form solves K (1 + gamma K^2) = |Y| / 4N; bisection oracle.
double k_oracle(double gamma, double rhs) {
  double lo = 0.0, hi = rhs;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * (1.0 + gamma * mid * mid) < rhs ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(KFun, UnitFormClosedForm) {
  for (double g : {1e-12, 0.05, 0.3}) {
    auto p = ReflectionPhaseParams::make(desk(), 2, g, 0.6, 0.0, 0.0);
    for (double tau : {0.4, 1.0, 2.5}) {
      for (double Y : {-3.0, -0.7, 0.9, 2.2}) {
        const double K = friedlab::k_fun(p, std::span<const double>(&Y, 1), tau);
        EXPECT_NEAR(K, k_oracle(g, std::abs(Y)), 1e-12) << g << " " << tau << " " << Y;
        if (g < 1e-9) EXPECT_NEAR(K, std::abs(Y), 1e-10);
      }
    }
  }
}

TEST(KFun, MonotoneWithMatchingDerivative) {
  const double g = 0.2;
  auto p = ReflectionPhaseParams::make(desk(), 1, g, 0.6, 0.0, 0.0);
  double prev = 0.0;
  for (int i = 1; i <= 60; ++i) {
    const double Y = 0.05 * i;
    const double K = friedlab::k_fun(p, std::span<const double>(&Y, 1), 1.3);
    EXPECT_GT(K, prev);
    prev = K;
    const double d = 1e-5;
    const double Yp = Y + d, Ym = Y - d;
    const double fd = (friedlab::k_fun(p, std::span<const double>(&Yp, 1), 1.3) -
                       friedlab::k_fun(p, std::span<const double>(&Ym, 1), 1.3)) / (2 * d);
    EXPECT_NEAR(fd, 1.0 / (1.0 + 3.0 * g * K * K), 1e-6);
  }
}

TEST(Swallowtail, UnitFormLocusAndDisjointness) {
  const double g = 0.25;
  std::vector<double> all;
  for (int N = 1; N <= 3; ++N) {
    // T chosen so |Y| = 4N(1 + g) lies inside [T/2, 4T].
    const double t = 2.0 * N * std::sqrt(g);
    const auto p = ReflectionPhaseParams::make(desk(), N, g, t, 0.0, 0.0);
    const auto ys = friedlab::swallowtail_locus(p, N);
    ASSERT_EQ(ys.size(), 2u);
    for (double y : ys) {
      EXPECT_NEAR(std::abs(y), 4.0 * N * std::sqrt(g) * (1.0 + g), 1e-9);
      const double Y = y / std::sqrt(g) / (4.0 * N);
      const double K = friedlab::k_fun(p, std::span<const double>(&Y, 1), t / std::sqrt(g) / (2.0 * N));
      EXPECT_LT(std::abs(K - 1.0), 1e-10);
      all.push_back(y);
    }
    EXPECT_NEAR(ys[0], -ys[1], 1e-12);
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_GT(all[i] - all[i - 1], 0.1);
}

TEST(Swallowtail, NoLocusIsReported) {
  // |Y| = 4(1 + g) is far outside [T/2, 4T] when T is tiny.
  const auto p = ReflectionPhaseParams::make(desk(), 1, 0.25, 0.05, 0.0, 0.0);
  EXPECT_THROW(friedlab::swallowtail_locus(p, 1), friedlab::Error);
}

TEST(OmegaFloor, InvisibleToTheModes) {
  const friedlab::OmegaFloor f;
  EXPECT_EQ(f(-1.5), 0.0);
  EXPECT_EQ(f(-1.0), 0.0);
  EXPECT_EQ(f(0.5), 1.0);
  EXPECT_EQ(f(friedlab::airy_zeros(1).omega(1)), 1.0);
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = f(-1.0 + 1.5 * i / 100.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Packets, ConjugationSymmetry) {
  // Real symbol and real Airy factors: conj V_N(t, y) = V_{-N}(-t, -y).
  const friedlab::ReflectionOptions o;
  auto p = ReflectionPhaseParams::make(desk(), 2, 0.25, 0.6, 0.1, -1.2);
  const cplx v = friedlab::v_n_brute(p, o).value;
  p.N = -2;
  p.t = -0.6;
  p.y = {1.2};
  const cplx w = friedlab::v_n_brute(p, o).value;
  EXPECT_LT(std::abs(v - std::conj(w)), 1e-9 * std::abs(v));
}

TEST(Packets, DecayOutsideTheWindow) {
  const ModelParams m = desk();
  const friedlab::ReflectionOptions o;
  const auto w = friedlab::n_window(0.6, 0.25, m.form, m.eps0, m.a);
  double inside = 0.0;
  for (int N = w.n_lo; N <= w.n_hi; ++N) {
    inside = std::max(inside, std::abs(friedlab::v_n_brute(
                                  ReflectionPhaseParams::make(m, N, 0.25, 0.6, 0.1, -1.2), o).value));
  }
  const int far = 2 * w.n_hi + 2;
  const double outside =
      std::abs(friedlab::v_n_brute(ReflectionPhaseParams::make(m, far, 0.25, 0.6, 0.1, -1.2), o).value);
  EXPECT_LT(outside, 1e-2 * inside);
}

TEST(Packets, ClippedQuadratureWithinClipSensitivity) {
  // At small lambda the clip of (sigma, s) is visible; the reported clip
  // sensitivity must cover the distance to the unclipped Airy form.
  const auto p = ReflectionPhaseParams::make(desk(), 1, 0.25, 0.6, 0.25, -1.0);
  friedlab::ReflectionOptions o;
  const auto closed = friedlab::v_n_brute(p, o);
  o.sigma_s = friedlab::SigmaSMethod::kClippedQuadrature;
  const auto clipped = friedlab::v_n_brute(p, o);
  EXPECT_TRUE(std::isfinite(clipped.err_est));
  EXPECT_LE(std::abs(clipped.value - closed.value), clipped.err_est);
}

TEST(Packets, ReducedZeroIsTheFreePacket) {
  const ModelParams m = desk();
  auto p = ReflectionPhaseParams::make(m, 0, m.eps0, 0.6, 0.1, -1.2);
  p.block = {m.eps0, 0.0};
  const friedlab::ReflectionOptions o;
  const auto r = friedlab::v_n_reduced(p, o);
  const auto f = friedlab::v_0_free(m, 0.6, 0.1, -1.2, o);
  EXPECT_EQ(r.method, friedlab::PacketMethod::kReduced);
  EXPECT_LT(std::abs(r.value - f.value), 1e-3 * std::abs(f.value));
  EXPECT_THROW(friedlab::v_0_free(m, 0.5 * m.h, 0.1, -1.2, o), friedlab::Error);
}

TEST(Packets, CriticalValueIsStationaryInSigma) {
  // Envelope identity: d/dsigma Phi(alpha_c, eta_c; sigma, s) equals the
  // partial derivative, which vanishes where sigma^2 = alpha_c - x/gamma.
  const auto p = ReflectionPhaseParams::make(desk(0.005, 0.1), 1, 0.4, 0.9, 0.05, -1.8);
  const double s = -0.3;
  auto crit_value = [&](double sigma) {
    const auto c = friedlab::solve_crit(p, sigma, s);
    EXPECT_TRUE(c.converged);
    return std::make_pair(friedlab::phi_N(p, c.eta_c, c.alpha_c, sigma, s), c);
  };
  // Fixed point for sigma^2 = alpha_c(sigma) - x/gamma.
  double sigma = -1.0;
  for (int i = 0; i < 100; ++i) sigma = -std::sqrt(crit_value(sigma).second.alpha_c - 0.05 / 0.4);
  const auto [v, c] = crit_value(sigma);
  const auto g = friedlab::phi_N_gradient(p, c.eta_c, c.alpha_c, sigma, s);
  EXPECT_LT(std::abs(g.d_sigma), 1e-10);
  const double d = 1e-5;
  const double fd = (crit_value(sigma + d).first - crit_value(sigma - d).first) / (2 * d);
  EXPECT_LT(std::abs(fd), 1e-7);
  const double off = 0.2;
  const auto c2 = crit_value(sigma + off).second;
  const double fd2 = (crit_value(sigma + off + d).first - crit_value(sigma + off - d).first) / (2 * d);
  EXPECT_NEAR(fd2, friedlab::phi_N_gradient(p, c2.eta_c, c2.alpha_c, sigma + off, s).d_sigma, 1e-7);
}

// Direct (alpha, eta) integral at fixed (sigma, s) against the stationary
// phase value used by the reduced evaluator.
double stationary_phase_gap(double h) {
  const ModelParams m = desk(h, 0.1);
  const auto p = ReflectionPhaseParams::make(m, 1, 0.4, 0.9, 0.05, -1.8);
  const friedlab::CutoffFamily c;
  const friedlab::OmegaFloor floor;
  const double g = p.gamma(), lam = p.lambda_gamma();
  auto symbol = [&](double e, double al) {
    const double q = e * e;
    const double w = std::cbrt(q) * std::pow(lam, 2.0 / 3.0) * al;
    return q * c.psi(std::abs(e)) * c.psi1(std::abs(e) * std::sqrt(1.0 + g * al)) *
           p.block.weight(c, g * al) * floor(w) *
           std::polar(1.0, -(friedlab::phase_L(w) - 4.0 / 3.0 * std::pow(w, 1.5)));
  };
  const double sigma = 0.0, s = 0.0;
  const auto er = friedlab::composite_gauss(0.5, 1.5, static_cast<int>(1.0 / h), 16);
  const auto ar = friedlab::composite_gauss(0.25, 1.0, static_cast<int>(0.4 / h), 16);
  cplx direct{};
  for (std::size_t i = 0; i < er.size(); ++i) {
    const double e[] = {er.x[i]};
    for (std::size_t j = 0; j < ar.size(); ++j) {
      const cplx f = symbol(er.x[i], ar.x[j]);
      if (f == cplx{}) continue;
      direct += er.w[i] * ar.w[j] * f *
                std::polar(1.0, friedlab::phi_N(p, e, ar.x[j], sigma, s) / h);
    }
  }
  const auto cp = friedlab::solve_crit(p, sigma, s);
  const double ph = friedlab::phi_N(p, cp.eta_c, cp.alpha_c, sigma, s) / h;
  const cplx sp = 2.0 * kPi * h / std::sqrt(std::abs(cp.hessian_det)) *
                  std::polar(1.0, ph + kPi * cp.signature / 4.0) * symbol(cp.eta_c[0], cp.alpha_c);
  return std::abs(sp - direct) / std::abs(direct);
}

TEST(Packets, StationaryPhaseStepConverges) {
  const double coarse = stationary_phase_gap(0.01);
  const double fine = stationary_phase_gap(0.005);
  EXPECT_LT(fine, coarse);
  EXPECT_LT(fine, 0.5);
}

TEST(ReflectionSum, MatchesSpectralTotal) {
  const ModelParams m = desk();
  const std::vector<double> xs{0.05, 0.1, 0.15, 0.2, 0.25};
  const std::vector<double> ys{-0.6, -0.9, -1.2, -1.5, -1.8};
  const auto s = friedlab::green_field_spectral(m, 0.6, xs, ys, friedlab::BlockSelection::total(m));
  const auto r = friedlab::green_field_reflection(m, 0.6, xs, ys);
  double diff = 0.0, peak = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    diff = std::max(diff, std::abs(s.values[k] - r.total.values[k]));
    peak = std::max(peak, std::abs(s.values[k]));
  }
  EXPECT_LT(diff, 2e-2 * peak);
  // Widening the windows converges onto the spectral value.
  friedlab::ReflectionSumOptions wide;
  wide.window_pad = 4;
  const auto r4 = friedlab::green_field_reflection(m, 0.6, xs, ys, wide);
  double diff4 = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    diff4 = std::max(diff4, std::abs(s.values[k] - r4.total.values[k]));
  }
  EXPECT_LT(diff4, 0.25 * diff);
  // Window members come in +-N pairs around N = 0.
  for (int n : r.n_values) {
    EXPECT_NE(std::find(r.n_values.begin(), r.n_values.end(), -n), r.n_values.end());
  }
}

TEST(ReflectionSum, OnlyFreeTermBelowThreshold) {
  const ModelParams m = desk(0.02, 0.3);
  const auto r = friedlab::green_field_reflection(m, 0.1, {0.15}, {-0.2});
  EXPECT_EQ(r.n_values, std::vector<int>{0});
  const auto csv = r.breakdown_csv(0, 0);
  EXPECT_EQ(csv.header(), (std::vector<std::string>{"N", "re", "im", "abs", "method", "err_est"}));
  EXPECT_EQ(csv.rows(), 1u);
}

}  // namespace
