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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "airy_internal.hpp"
#include "friedlab/airy.hpp"
#include "friedlab/error.hpp"
#include "friedlab/quadrature.hpp"

namespace friedlab {
namespace {

constexpr double kPi = std::numbers::pi;

// b_1, b_3, b_5, b_7 of B(u) ~ sum b_k u^{-k}.
constexpr double kRemainder[4] = {
    5.0 / 24.0,
    -1105.0 / 4608.0,
    82825.0 / 49152.0,
    -1282031525.0 / 44040192.0,
};

double leading_phase(double omega) {
  return 4.0 / 3.0 * omega * std::sqrt(omega) + 0.5 * kPi;
}

}  // namespace

double phase_L_direct(double omega) {
  if (!std::isfinite(omega)) throw Error(ErrorKind::kDomain, "phase_L: non-finite argument");
  if (-omega > detail::table_hi()) {
    return 2.0 * std::atan(detail::ai_over_bi(-omega));
  }
  if (-omega < detail::table_lo()) {
    (void)ai(-omega);  // range guard
    double p, q;
    detail::hankel_pq(omega, p, q);
    return leading_phase(omega) - 2.0 * std::atan(q / p);
  }
  const AiryValues v = airy_all(-omega);
  // Bi(-w) > 0 for w < 1, where pi - 2 atan2(Bi, Ai) = 2 atan2(Ai, Bi).
  if (omega < 1.0) return 2.0 * std::atan2(v.ai, v.bi);
  const double raw = kPi - 2.0 * std::atan2(v.bi, v.ai);
  const double ref = leading_phase(omega);
  return raw + 2.0 * kPi * std::round((ref - raw) / (2.0 * kPi));
}

double remainder_coefficient(int index) {
  if (index < 1 || index > 7) {
    throw Error(ErrorKind::kDomain, "remainder coefficients are tabulated for 1 <= k <= 7");
  }
  if (index % 2 == 0) return 0.0;
  return kRemainder[(index - 1) / 2];
}

double phase_L_asymptotic(double omega, int series_cutoff) {
  if (omega < 1.0) throw Error(ErrorKind::kDomain, "asymptotic phase needs omega >= 1");
  if (series_cutoff < 0 || series_cutoff > 4) {
    throw Error(ErrorKind::kDomain, "series_cutoff must lie in [0, 4]");
  }
  const double u = omega * std::sqrt(omega);
  const double inv2 = 1.0 / (u * u);
  double b = 0.0;
  double up = 1.0 / u;
  for (int j = 0; j < series_cutoff; ++j) {
    b += kRemainder[j] * up;
    up *= inv2;
  }
  return leading_phase(omega) - b;
}

double phase_L(double omega, const PhaseLConfig& cfg) {
  if (cfg.switch_point < 1.0) throw Error(ErrorKind::kDomain, "switch_point must be >= 1");
  if (omega < cfg.switch_point) return phase_L_direct(omega);
  return phase_L_asymptotic(omega, cfg.series_cutoff);
}

double phase_L_derivative(double omega) {
  if (-omega > detail::table_hi()) {
    // Ai^2 + Bi^2 ~ Bi^2; use the ratio form to avoid overflow.
    const AiryValues v = airy_all(-omega);
    if (!std::isfinite(v.bi)) return 0.0;
    return 2.0 / (kPi * (v.ai * v.ai + v.bi * v.bi));
  }
  const AiryValues v = airy_all(-omega);
  return 2.0 / (kPi * (v.ai * v.ai + v.bi * v.bi));
}

double b_remainder(double omega) {
  if (omega < 1.0) throw Error(ErrorKind::kDomain, "B is defined for omega >= 1");
  return leading_phase(omega) - phase_L_direct(omega);
}

double fit_b1(double u_lo, double u_hi, int samples) {
  if (!(u_lo > 0.0 && u_hi > u_lo) || samples < 2) {
    throw Error(ErrorKind::kDomain, "fit_b1: bad sample range");
  }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double u = u_lo * std::pow(u_hi / u_lo, static_cast<double>(i) / (samples - 1));
    const double omega = std::pow(u, 2.0 / 3.0);
    const double b = b_remainder(omega);
    num += b / u;
    den += 1.0 / (u * u);
  }
  return num / den;
}

TestFunction bump(double center, double half_width) {
  if (!(half_width > 0.0)) throw Error(ErrorKind::kDomain, "bump half width must be positive");
  TestFunction t;
  t.lo = center - half_width;
  t.hi = center + half_width;
  t.f = [center, half_width](double w) {
    const double s = (w - center) / half_width;
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  };
  return t;
}

std::vector<PoissonCheck> poisson_sum_sweep(const TestFunction& phi,
                                            const std::vector<int>& n_max) {
  if (!(phi.hi > phi.lo)) throw Error(ErrorKind::kDomain, "test function support is empty");
  int n_top = 0;
  for (int n : n_max) {
    if (n < 0) throw Error(ErrorKind::kDomain, "n_max must be >= 0");
    n_top = std::max(n_top, n);
  }
  const double span = std::abs(phase_L_direct(phi.hi) - phase_L_direct(phi.lo));
  const int base_panels =
      std::max(16, static_cast<int>(std::ceil(2.0 * n_top * span / (2.0 * kPi))) + 8);

  // Partial sums over |N| <= n. The N and -N terms are complex conjugates,
  // so the sum is real.
  auto partials = [&](int panels) {
    const CompositeRule rule = composite_gauss(phi.lo, phi.hi, panels, 16);
    std::vector<double> fw(rule.size()), lv(rule.size());
    for (std::size_t j = 0; j < rule.size(); ++j) {
      fw[j] = rule.w[j] * phi.f(rule.x[j]);
      lv[j] = phase_L_direct(rule.x[j]);
    }
    std::vector<double> re(static_cast<std::size_t>(n_top) + 1, 0.0);
    for (int n = 0; n <= n_top; ++n) {
      double c = 0.0;
      for (std::size_t j = 0; j < rule.size(); ++j) c += fw[j] * std::cos(n * lv[j]);
      re[n] = (n == 0 ? c : 2.0 * c) + (n > 0 ? re[n - 1] : 0.0);
    }
    return re;
  };

  const std::vector<double> re = partials(base_panels);
  const std::vector<double> re2 = partials(2 * base_panels);

  double rhs = 0.0;
  int k_hi = 1;
  while (airy_zero(k_hi) < phi.hi) ++k_hi;
  const AiryZeroTable zeros = airy_zeros(k_hi);
  for (int k = 1; k <= k_hi; ++k) {
    const double w = zeros.omega(k);
    if (w > phi.lo && w < phi.hi) rhs += 2.0 * kPi * phi.f(w) / zeros.lprime(k);
  }

  std::vector<PoissonCheck> out;
  out.reserve(n_max.size());
  for (int n : n_max) {
    PoissonCheck pc;
    pc.lhs_re = re2[n];
    pc.lhs_im = 0.0;
    pc.rhs = rhs;
    const double diff = std::abs(pc.lhs_re - rhs);
    pc.gap = (std::abs(rhs) > 0.0) ? diff / std::abs(rhs) : diff;
    pc.quadrature_err = std::abs(re2[n] - re[n]);
    out.push_back(pc);
  }
  return out;
}

PoissonCheck poisson_sum_check(const TestFunction& phi, int n_max) {
  return poisson_sum_sweep(phi, {n_max}).front();
}

}  // namespace friedlab
