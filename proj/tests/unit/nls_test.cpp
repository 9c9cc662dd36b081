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


#include "friedlab/nls.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "friedlab/error.hpp"

namespace {

using friedlab::cplx;
using friedlab::PeriodizedDomain;
using friedlab::SpectralState;
using friedlab::SpectralTransform;

PeriodizedDomain small_domain() {
  PeriodizedDomain d;
  d.n_x = 40;
  d.n_y = 16;
  return d;
}

double coeff_distance(const SpectralState& a, const SpectralState& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) acc += std::norm(a.coeffs[i] - b.coeffs[i]);
  return std::sqrt(acc);
}

// Airy eigenfunction on the half line, unit L^2 norm, positive slope at 0.
double airy_mode(int k, double q, double x) {
  const double w = -boost::math::airy_ai_zero<double>(k);
  const double q13 = std::cbrt(q);
  return std::sqrt(q13) * boost::math::airy_ai(q13 * x - w) / boost::math::airy_ai_prime(-w);
}

TEST(SpectralTransform, GramIdentity) {
  const SpectralTransform tr(PeriodizedDomain{});
  EXPECT_LT(tr.gram_defect(), 1e-12);
}

TEST(SpectralTransform, EigenvaluesMatchAiryZeros) {
  const SpectralTransform tr(PeriodizedDomain{});
  for (int m : {1, 2, 5, 9}) {
    for (int k = 1; k <= 3; ++k) {
      const double w = -boost::math::airy_ai_zero<double>(k);
      const double exact = m * m + w * std::pow(m * m, 2.0 / 3.0);
      EXPECT_NEAR(tr.eigenvalue(m, k), exact, 1e-9 * exact) << "m=" << m << " k=" << k;
      EXPECT_EQ(tr.eigenvalue(m, k), tr.eigenvalue(tr.n_y() - m, k));
    }
  }
}

TEST(SpectralTransform, EigenvectorsMatchAiryFunctions) {
  const SpectralTransform tr(PeriodizedDomain{});
  for (int m : {1, 3, 7}) {
    for (int k = 1; k <= 3; ++k) {
      double worst = 0.0;
      for (int i = 0; i < tr.n_x(); ++i) {
        worst = std::max(worst, std::abs(tr.basis(m, k, i) - airy_mode(k, m * m, tr.x(i))));
      }
      // The discrete mode also vanishes at x_max; the half-line mode does not.
      const double tail = airy_mode(k, m * m, tr.domain().x_max);
      EXPECT_NEAR(tr.tail_bound(m, k), std::abs(tail), 1e-12);
      EXPECT_LT(worst, 2.0 * std::abs(tail) + 1e-10) << "m=" << m << " k=" << k;
    }
  }
}

TEST(SpectralTransform, TurningPointOverflow) {
  PeriodizedDomain d;
  d.x_max = 10.0;
  d.k_max = 3;
  try {
    const SpectralTransform tr(d);
    FAIL() << "expected turning-point-overflow";
  } catch (const friedlab::Error& e) {
    EXPECT_EQ(e.kind(), friedlab::ErrorKind::kDomain);
    EXPECT_NE(std::string(e.what()).find("turning-point-overflow"), std::string::npos);
  }
  d.k_max = 2;
  EXPECT_NO_THROW(SpectralTransform{d});
}

TEST(SpectralTransform, ModeReproduction) {
  const SpectralTransform tr(small_domain());
  const SpectralState unit = friedlab::mode_state(tr, 2, -3);
  const SpectralState back = tr.to_spectral(tr.to_physical(unit));
  EXPECT_LT(coeff_distance(unit, back), 1e-13);
}

TEST(SpectralTransform, RoundTripAndParseval) {
  const SpectralTransform tr(PeriodizedDomain{});
  const SpectralState s = friedlab::random_band_state(tr, 11, 0, 12, 2.5);
  const friedlab::GridField v = tr.to_physical(s);
  const SpectralState back = tr.to_spectral(v);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    worst = std::max(worst, std::abs(s.coeffs[i] - back.coeffs[i]));
  }
  EXPECT_LT(worst, 1e-10);
  double grid = 0.0;
  for (int i = 0; i < tr.n_x(); ++i) {
    for (int j = 0; j < tr.n_y(); ++j) {
      grid += tr.x_weight(i) * tr.dy() * std::norm(v[static_cast<std::size_t>(i * tr.n_y() + j)]);
    }
  }
  EXPECT_NEAR(grid, friedlab::mass(s), 1e-9);
  EXPECT_NEAR(friedlab::mass(s), 2.5, 1e-12);
}

TEST(SpectralTransform, DoublingNodesKeepsSmoothCoefficients) {
  PeriodizedDomain coarse;
  PeriodizedDomain fine = coarse;
  fine.n_x = 128;
  const SpectralTransform a(coarse), b(fine);
  // Normalizing by mass would mix in the box-mode projections; compare raw
  // projections of the same function instead.
  const SpectralState sa = friedlab::gaussian_state(a, 4.0, 1.0, 0.6, 0.7, 0.0, 2.0, 1.0);
  const SpectralState sb = friedlab::gaussian_state(b, 4.0, 1.0, 0.6, 0.7, 0.0, 2.0, 1.0);
  const double ra = std::sqrt(friedlab::mass(sa)), rb = std::sqrt(friedlab::mass(sb));
  EXPECT_NEAR(ra, rb, 1e-9);
  double worst = 0.0;
  for (int jm = 1; jm < a.n_y(); ++jm) {
    if (jm == a.n_y() / 2) continue;
    const int jb = a.m_of(jm) >= 0 ? jm : jm + b.n_y() - a.n_y();
    for (int k = 1; k <= 3; ++k) {
      const cplx ca = sa.coeffs[static_cast<std::size_t>((k - 1) * a.n_y() + jm)];
      const cplx cb = sb.coeffs[static_cast<std::size_t>((k - 1) * b.n_y() + jb)];
      worst = std::max(worst, std::abs(ca - cb));
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(SpectralTransform, NyquistColumnIsFlagged) {
  const SpectralTransform tr(small_domain());
  const SpectralState low = friedlab::random_band_state(tr, 3, 1, 4, 1.0);
  EXPECT_EQ(friedlab::nyquist_fraction(tr, low), 0.0);
  SpectralState edge = low;
  edge.coeffs[static_cast<std::size_t>(tr.n_y() / 2)] = 0.5;
  EXPECT_GT(friedlab::nyquist_fraction(tr, edge), 0.1);
}

TEST(SpectralTransform, InterpolationAgreesWithNodesAndTraceVanishes) {
  const SpectralTransform tr(small_domain());
  const SpectralState s = friedlab::random_band_state(tr, 5, 0, 7, 1.0);
  const friedlab::GridField v = tr.to_physical(s);
  const auto at_node = tr.values_at_x(s, tr.x(6));
  for (int j = 0; j < tr.n_y(); ++j) {
    EXPECT_EQ(at_node[static_cast<std::size_t>(j)], v[static_cast<std::size_t>(6 * tr.n_y() + j)]);
  }
  for (const cplx& z : tr.dirichlet_trace(s)) EXPECT_LT(std::abs(z), 1e-10);
  // Near the wall a certified mode is interpolated to Airy accuracy.
  const SpectralState one = friedlab::mode_state(tr, 1, 2);
  const double xv = 0.013;
  const auto near = tr.values_at_x(one, xv);
  const double expect = airy_mode(1, 4.0, xv) / std::sqrt(2.0 * std::numbers::pi);
  EXPECT_NEAR(std::abs(near[0]), expect, 1e-9);
  const auto ys = tr.sample_y(s, tr.y(3));
  for (int i = 0; i < tr.n_x(); ++i) {
    EXPECT_NEAR(std::abs(ys[static_cast<std::size_t>(i)] -
                         v[static_cast<std::size_t>(i * tr.n_y() + 3)]),
                0.0, 1e-13);
  }
}

TEST(LinearFlow, SignMatchesFiniteDifferences) {
  // -i dv/dt + Delta_F v = 0, with Delta_F = d_x^2 + (1 + x) d_y^2 for the
  // unit form, applied to the analytic Airy mode by central differences.
  const SpectralTransform tr(PeriodizedDomain{});
  const int k = 1, m = 2, i = 20, j = 5;
  const double dt = 1e-5;
  SpectralState plus = friedlab::mode_state(tr, k, m), minus = plus;
  friedlab::linear_flow(tr, plus, dt);
  friedlab::linear_flow(tr, minus, -dt);
  const std::size_t at = static_cast<std::size_t>(i * tr.n_y() + j);
  const cplx dvdt = (tr.to_physical(plus)[at] - tr.to_physical(minus)[at]) / (2.0 * dt);

  const double x = tr.x(i), y = tr.y(j), hx = 1e-3;
  const double q = m * m;
  auto e = [&](double xv) { return airy_mode(k, q, xv); };
  const double exx = (-e(x + 2 * hx) + 16 * e(x + hx) - 30 * e(x) + 16 * e(x - hx) - e(x - 2 * hx)) /
                     (12 * hx * hx);
  const cplx fourier = std::polar(1.0, m * y) / std::sqrt(2.0 * std::numbers::pi);
  const cplx delta_v = (exx - m * m * (1.0 + x) * e(x)) * fourier;
  const cplx expect = -cplx(0.0, 1.0) * delta_v;
  EXPECT_LT(std::abs(dvdt - expect), 1e-6 * std::abs(expect));
}

TEST(LinearFlow, GroupPropertyAndIsometry) {
  const SpectralTransform tr(small_domain());
  const SpectralState s0 = friedlab::random_band_state(tr, 2, 0, 7, 1.0);
  SpectralState s = s0;
  friedlab::linear_flow(tr, s, 0.37);
  for (double m : {1.0, 2.0, 3.5}) {
    EXPECT_NEAR(friedlab::hm_norm(tr, s, m), friedlab::hm_norm(tr, s0, m),
                1e-13 * friedlab::hm_norm(tr, s0, m));
  }
  friedlab::linear_flow(tr, s, -0.37);
  EXPECT_LT(coeff_distance(s, s0), 1e-12);
}

TEST(LinearFlow, MassOverAMillionSteps) {
  PeriodizedDomain d;
  d.n_x = 12;
  d.n_y = 8;
  d.k_max = 2;
  d.x_max = 10.0;
  const SpectralTransform tr(d);
  SpectralState s = friedlab::random_band_state(tr, 4, 0, 3, 1.0);
  for (int n = 0; n < 1000000; ++n) friedlab::linear_flow(tr, s, 1e-3);
  EXPECT_LT(std::abs(friedlab::mass(s) - 1.0), 1e-12);
}

TEST(NonlinearPhase, ModulusPreservedAndFirstOrder) {
  const SpectralTransform tr(small_domain());
  const friedlab::GridField v0 = tr.to_physical(friedlab::random_band_state(tr, 9, 0, 5, 1.0));
  for (double dt : {1e-2, 1e-3}) {
    friedlab::GridField v = v0;
    friedlab::nonlinear_phase(v, dt, 1);
    double diff = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_NEAR(std::abs(v[i]), std::abs(v0[i]), 1e-15);
      diff = std::max(diff, std::abs(v[i] - v0[i]) / std::max(std::abs(v0[i]), 1e-300));
    }
    double top = 0.0;
    for (const cplx& z : v0) top = std::max(top, std::norm(z));
    EXPECT_LE(diff, 1.0001 * top * dt);
  }
}

TEST(NonlinearPhase, ConstantInYStaysConstant) {
  const SpectralTransform tr(small_domain());
  friedlab::GridField v(tr.size());
  for (int i = 0; i < tr.n_x(); ++i) {
    for (int j = 0; j < tr.n_y(); ++j) v[static_cast<std::size_t>(i * tr.n_y() + j)] = {std::sin(tr.x(i)), 0.3};
  }
  friedlab::nonlinear_phase(v, 0.1, -1);
  for (int i = 0; i < tr.n_x(); ++i) {
    for (int j = 1; j < tr.n_y(); ++j) {
      EXPECT_EQ(v[static_cast<std::size_t>(i * tr.n_y() + j)], v[static_cast<std::size_t>(i * tr.n_y())]);
    }
  }
}

TEST(Strang, ZeroKappaIsTheLinearFlow) {
  const SpectralTransform tr(small_domain());
  SpectralState a = friedlab::random_band_state(tr, 6, 0, 6, 1.0), b = a;
  for (int n = 0; n < 50; ++n) friedlab::strang_step(tr, a, 0.01, 0);
  friedlab::linear_flow(tr, b, 0.5);
  EXPECT_LT(coeff_distance(a, b), 1e-12);
}

TEST(Strang, SecondOrderSelfConvergence) {
  const SpectralTransform tr(small_domain());
  const SpectralState s0 = friedlab::random_band_state(tr, 8, 0, 3, 1.0);
  auto run = [&](double dt) {
    SpectralState s = s0;
    const long steps = std::lround(0.5 / dt);
    for (long n = 0; n < steps; ++n) friedlab::strang_step(tr, s, dt, 1);
    return s;
  };
  const double dt = 0.01;
  const SpectralState ref = run(dt / 8), s1 = run(dt), s2 = run(dt / 2);
  const double order = std::log2(coeff_distance(s1, ref) / coeff_distance(s2, ref));
  EXPECT_NEAR(order, 2.0, 0.1);
}

TEST(Strang, MassAndTraceOverTenThousandSteps) {
  const SpectralTransform tr(small_domain());
  SpectralState s = friedlab::gallery_state(tr, 1, 3.0, 1.5, 1.0);
  friedlab::EvolveOptions opts;
  opts.observe_every = 1.0;
  const auto series = friedlab::evolve(tr, s, 10.0, 1e-3, 1, opts);
  ASSERT_EQ(series.samples.size(), 11u);
  for (const auto& o : series.samples) {
    EXPECT_LT(std::abs(o.mass - 1.0), 1e-10);
    EXPECT_LT(o.trace, 1e-10);
  }
}

TEST(Energy, DriftShrinksLikeDtSquared) {
  const SpectralTransform tr(small_domain());
  const SpectralState s0 = friedlab::gallery_state(tr, 1, 3.0, 1.5, 1.0);
  const double e0 = friedlab::energy(tr, s0, 1);
  auto drift = [&](double dt) {
    SpectralState s = s0;
    friedlab::EvolveOptions opts;
    opts.observe_every = 0.05;
    double worst = 0.0;
    for (const auto& o : friedlab::evolve(tr, s, 1.0, dt, 1, opts).samples) {
      worst = std::max(worst, std::abs(o.energy - e0) / e0);
    }
    return worst;
  };
  const double d3 = drift(1e-3), d4 = drift(1e-4);
  EXPECT_LT(d3, 1e-4);
  EXPECT_LT(d4, 1e-6);
  EXPECT_NEAR(std::log10(d3 / d4), 2.0, 0.2);
}

TEST(Observables, UnitModeAndZeroState) {
  const SpectralTransform tr(small_domain());
  const SpectralState s = friedlab::mode_state(tr, 2, 3);
  const double lam = tr.eigenvalue(3, 2);
  EXPECT_DOUBLE_EQ(friedlab::mass(s), 1.0);
  for (double m : {1.0, 2.0}) {
    EXPECT_NEAR(friedlab::hm_norm(tr, s, m), std::pow(1.0 + lam, m / 2.0), 1e-12 * lam);
  }
  SpectralState zero = s;
  for (cplx& c : zero.coeffs) c = 0.0;
  EXPECT_EQ(friedlab::energy(tr, zero, 1), 0.0);
}

TEST(Evolve, GallerySmokeRecordsEveryHundredth) {
  const SpectralTransform tr(small_domain());
  SpectralState s = friedlab::gallery_state(tr, 1, 4.0, 1.0, 0.5);
  const auto series = friedlab::evolve(tr, s, 1.0, 1e-3, 1);
  ASSERT_EQ(series.samples.size(), 101u);
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    EXPECT_NEAR(series.samples[i].t, 0.01 * static_cast<double>(i), 1e-12);
    EXPECT_TRUE(std::isfinite(series.samples[i].energy));
  }
  const auto csv = series.to_csv();
  EXPECT_EQ(csv.header().front(), "t");
}

TEST(Evolve, FocusingMassGuard) {
  const SpectralTransform tr(small_domain());
  SpectralState s = friedlab::gallery_state(tr, 1, 3.0, 1.0, 2.0);
  EXPECT_THROW(friedlab::evolve(tr, s, 0.1, 1e-3, -1), friedlab::Error);
  friedlab::EvolveOptions opts;
  opts.focusing_mass_limit = 3.0;
  EXPECT_NO_THROW(friedlab::evolve(tr, s, 0.1, 1e-3, -1, opts));
}

TEST(Evolve, BlowupPersistsLastValidState) {
  const SpectralTransform tr(small_domain());
  // |v|^2 overflows, so the first kick produces NaN.
  SpectralState s = friedlab::mode_state(tr, 1, 3, 1e160);
  const SpectralState start = s;
  const auto path = std::filesystem::temp_directory_path() / "friedlab_blowup.ck";
  friedlab::EvolveOptions opts;
  opts.checkpoint_on_failure = path;
  try {
    friedlab::evolve(tr, s, 0.1, 1e-3, 1, opts);
    FAIL() << "expected numerical-blowup";
  } catch (const friedlab::Error& e) {
    EXPECT_EQ(e.kind(), friedlab::ErrorKind::kBlowup);
  }
  const SpectralState saved = friedlab::read_checkpoint(path, tr);
  EXPECT_EQ(saved.coeffs, start.coeffs);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RoundTripAndShapeCheck) {
  const SpectralTransform tr(small_domain());
  SpectralState s = friedlab::random_band_state(tr, 1, 0, 5, 1.0);
  s.time = 0.625;
  const auto path = std::filesystem::temp_directory_path() / "friedlab_roundtrip.ck";
  friedlab::write_checkpoint(path, tr, s);
  EXPECT_EQ(std::filesystem::file_size(path), 8u + 4u + 4u + 8u + 16u * tr.size());
  const SpectralState back = friedlab::read_checkpoint(path, tr);
  EXPECT_EQ(back.coeffs, s.coeffs);
  EXPECT_EQ(back.time, 0.625);
  PeriodizedDomain other = small_domain();
  other.n_y = 8;
  const SpectralTransform tr2(other);
  EXPECT_THROW(friedlab::read_checkpoint(path, tr2), friedlab::Error);
  std::filesystem::remove(path);
}

TEST(GrowthReport, Calibration) {
  std::vector<double> t, n;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.1 * i);
    n.push_back(2.0 * std::exp(0.3 * t.back()));
  }
  const auto r = friedlab::growth_report(t, n, 10.0);
  EXPECT_NEAR(r.envelope_rate, 0.3, 1e-6);
  EXPECT_TRUE(r.pass);
  n[50] *= 3.0;
  EXPECT_FALSE(friedlab::growth_report(t, n, 10.0).pass);
  t.resize(50);
  n.resize(50);
  EXPECT_THROW(friedlab::growth_report(t, n, 10.0), friedlab::Error);
}

TEST(GrowthReport, LinearFlowHasZeroRate) {
  const SpectralTransform tr(small_domain());
  SpectralState s = friedlab::random_band_state(tr, 12, 0, 6, 1.0);
  friedlab::EvolveOptions opts;
  opts.observe_every = 0.5;
  const auto series = friedlab::evolve(tr, s, 10.0, 0.05, 0, opts);
  EXPECT_NEAR(friedlab::growth_report(series, 2).envelope_rate, 0.0, 1e-10);
}

}  // namespace
