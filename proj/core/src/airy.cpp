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

#include "friedlab/airy.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>

#include "airy_internal.hpp"
#include "friedlab/error.hpp"
#include "friedlab/quadrature.hpp"

namespace friedlab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.7724538509055160273;

// Table of Ai, Ai', Bi, Bi' at x_j = kLo + j kStep.
constexpr double kLo = -32.0;
constexpr double kHi = 10.0;
constexpr double kStep = 0.125;
constexpr int kCenters = 337;
constexpr int kZeroIndex = 256;

// Guard below which the oscillatory phase loses all significant digits.
constexpr double kPhaseGuard = -1e6;

constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
constexpr long double kAip0 = -0.258819403792806798405183560189203963L;
constexpr long double kBi0 = 0.614926627446000735150922369093613553L;
constexpr long double kBip0 = 0.448288357353826357914823710398828390L;

constexpr int kHankelTerms = 60;

struct HankelCoefficients {
  std::array<long double, kHankelTerms> u{};
  std::array<long double, kHankelTerms> v{};
  HankelCoefficients() {
    u[0] = 1.0L;
    v[0] = 1.0L;
    for (int k = 1; k < kHankelTerms; ++k) {
      const long double kk = k;
      u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) /
             ((2 * kk - 1) * 216 * kk);
      v[k] = -u[k] * (6 * kk + 1) / (6 * kk - 1);
    }
  }
};

const HankelCoefficients& hankel() {
  static const HankelCoefficients c;
  return c;
}

// Sums s_k c_k zeta^-k with alternating sign if `alternate`, stopping at the
// smallest term.
template <typename T>
T asymptotic_sum(const std::array<long double, kHankelTerms>& c, T zeta,
                 bool alternate) {
  T sum = 1;
  T term = 1;
  T last = 1;
  for (int k = 1; k < kHankelTerms; ++k) {
    term = static_cast<T>(c[k]) / std::pow(zeta, static_cast<T>(k));
    const T mag = std::abs(term);
    if (mag > last) break;
    sum += (alternate && (k % 2 == 1)) ? -term : term;
    if (mag < static_cast<T>(1e-21) * std::abs(sum)) break;
    last = mag;
  }
  return sum;
}

// One Taylor step of y'' = x y from x0 by h.
template <typename T>
void taylor_step(T x0, T h, T y0, T yp0, T& y, T& yp, T tol) {
  T cm1 = 0, c0 = y0, c1 = yp0;
  T hp = h;  // h^(n+1) for the current n below
  T sum = c0 + c1 * h;
  T dsum = c1;
  int small = 0;
  for (int n = 0; n < 200; ++n) {
    const T c2 = (x0 * c0 + cm1) / static_cast<T>((n + 2) * (n + 1));
    const T dterm = static_cast<T>(n + 2) * c2 * hp;
    hp *= h;
    const T term = c2 * hp;
    sum += term;
    dsum += dterm;
    cm1 = c0;
    c0 = c1;
    c1 = c2;
    if (std::abs(term) <= tol && std::abs(dterm) <= tol) {
      if (++small >= 3) break;
    } else {
      small = 0;
    }
  }
  y = sum;
  yp = dsum;
}

struct AiryTable {
  std::array<double, kCenters> ai{}, aip{}, bi{}, bip{};

  AiryTable() {
    using LD = long double;
    auto xj = [](int j) { return static_cast<LD>(kLo) + j * static_cast<LD>(kStep); };
    const LD tol = 1e-24L;

    std::array<LD, kCenters> a{}, ap{}, b{}, bp{};
    a[kZeroIndex] = kAi0;
    ap[kZeroIndex] = kAip0;
    b[kZeroIndex] = kBi0;
    bp[kZeroIndex] = kBip0;
    for (int j = kZeroIndex; j > 0; --j) {
      taylor_step<LD>(xj(j), -static_cast<LD>(kStep), a[j], ap[j], a[j - 1], ap[j - 1], tol);
      taylor_step<LD>(xj(j), -static_cast<LD>(kStep), b[j], bp[j], b[j - 1], bp[j - 1], tol);
    }
    for (int j = kZeroIndex; j < kCenters - 1; ++j) {
      taylor_step<LD>(xj(j), static_cast<LD>(kStep), b[j], bp[j], b[j + 1], bp[j + 1],
                      tol * std::max<LD>(1, std::abs(b[j])));
    }
    // Ai is recessive for x > 0: start from the expansion at kHi and march
    // back towards the origin.
    {
      const LD x = kHi;
      const LD zeta = 2.0L / 3.0L * x * std::sqrt(x);
      const LD e = std::exp(-zeta);
      const LD q = std::pow(x, 0.25L);
      a[kCenters - 1] = e / (2 * static_cast<LD>(kSqrtPi) * q) *
                        asymptotic_sum<LD>(hankel().u, zeta, true);
      ap[kCenters - 1] = -q * e / (2 * static_cast<LD>(kSqrtPi)) *
                         asymptotic_sum<LD>(hankel().v, zeta, true);
      for (int j = kCenters - 1; j > kZeroIndex + 1; --j) {
        taylor_step<LD>(xj(j), -static_cast<LD>(kStep), a[j], ap[j], a[j - 1], ap[j - 1],
                        tol * std::abs(a[j]));
      }
    }
    for (int j = 0; j < kCenters; ++j) {
      ai[j] = static_cast<double>(a[j]);
      aip[j] = static_cast<double>(ap[j]);
      bi[j] = static_cast<double>(b[j]);
      bip[j] = static_cast<double>(bp[j]);
    }
  }
};

const AiryTable& table() {
  static const AiryTable t;
  return t;
}

void check_range(double x) {
  if (std::isnan(x)) throw Error(ErrorKind::kDomain, "Airy argument is NaN");
  if (x < kPhaseGuard) {
    throw Error(ErrorKind::kPhaseUnresolvable,
                "Airy argument below -1e6; oscillation phase not resolvable in double precision");
  }
}

// Hankel expansion for x < kLo.
AiryValues oscillatory(double x) {
  const double z = -x;
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const auto& c = hankel();
  double p = 0, q = 0, r = 0, s = 0;
  double zk = 1.0;
  for (int k = 0; k < kHankelTerms; ++k) {
    const double tu = static_cast<double>(c.u[k]) * zk;
    const double tv = static_cast<double>(c.v[k]) * zk;
    // (-1)^{floor(k/2)} sign pattern of the even and odd sums.
    const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sgn * tu;
      r += sgn * tv;
    } else {
      q += sgn * tu;
      s += sgn * tv;
    }
    if (std::abs(tu) < 1e-18 && std::abs(tv) < 1e-18) break;
    zk /= zeta;
  }
  const double chi = zeta - 0.25 * kPi;
  const double cs = std::cos(chi), sn = std::sin(chi);
  const double z4 = std::sqrt(std::sqrt(z));
  const double amp = 1.0 / (kSqrtPi * z4);
  const double damp = z4 / kSqrtPi;
  AiryValues out;
  out.ai = amp * (cs * p + sn * q);
  out.bi = amp * (-sn * p + cs * q);
  out.aip = damp * (sn * r - cs * s);
  out.bip = damp * (cs * r + sn * s);
  return out;
}

// Exponential expansions for x > kHi.
AiryValues monotone(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double x4 = std::sqrt(std::sqrt(x));
  const double em = std::exp(-zeta);
  const double ep = std::exp(zeta);
  const auto& c = hankel();
  AiryValues out;
  out.ai = em / (2 * kSqrtPi * x4) * asymptotic_sum<double>(c.u, zeta, true);
  out.aip = -x4 * em / (2 * kSqrtPi) * asymptotic_sum<double>(c.v, zeta, true);
  out.bi = ep / (kSqrtPi * x4) * asymptotic_sum<double>(c.u, zeta, false);
  out.bip = x4 * ep / kSqrtPi * asymptotic_sum<double>(c.v, zeta, false);
  return out;
}

inline int nearest_center(double x) {
  int j = static_cast<int>(std::lround((x - kLo) / kStep));
  if (j < 0) j = 0;
  if (j >= kCenters) j = kCenters - 1;
  return j;
}

inline void from_table(const std::array<double, kCenters>& f,
                       const std::array<double, kCenters>& fp, double x,
                       double& y, double& yp) {
  const int j = nearest_center(x);
  const double x0 = kLo + j * kStep;
  const double tol = 1e-19 * (std::abs(f[j]) + std::abs(fp[j]));
  taylor_step<double>(x0, x - x0, f[j], fp[j], y, yp, tol);
}

}  // namespace

namespace detail {

void hankel_pq(double z, double& p, double& q) {
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const auto& c = hankel();
  p = 0;
  q = 0;
  double zk = 1.0;
  for (int k = 0; k < kHankelTerms; ++k) {
    const double tu = static_cast<double>(c.u[k]) * zk;
    const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sgn * tu;
    } else {
      q += sgn * tu;
    }
    if (std::abs(tu) < 1e-18) break;
    zk /= zeta;
  }
}

double ai_over_bi(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const auto& c = hankel();
  return 0.5 * std::exp(-2.0 * zeta) * asymptotic_sum<double>(c.u, zeta, true) /
         asymptotic_sum<double>(c.u, zeta, false);
}

double table_lo() { return kLo; }
double table_hi() { return kHi; }

}  // namespace detail

AiryValues airy_all(double x) {
  check_range(x);
  if (x < kLo) return oscillatory(x);
  if (x > kHi) return monotone(x);
  const AiryTable& t = table();
  AiryValues out;
  from_table(t.ai, t.aip, x, out.ai, out.aip);
  from_table(t.bi, t.bip, x, out.bi, out.bip);
  return out;
}

double ai(double x) {
  check_range(x);
  if (x < kLo) return oscillatory(x).ai;
  if (x > kHi) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    if (zeta > 745.0) return 0.0;
    return std::exp(-zeta) / (2 * kSqrtPi * std::sqrt(std::sqrt(x))) *
           asymptotic_sum<double>(hankel().u, zeta, true);
  }
  const AiryTable& t = table();
  double y, yp;
  from_table(t.ai, t.aip, x, y, yp);
  return y;
}

double ai_prime(double x) {
  check_range(x);
  if (x < kLo) return oscillatory(x).aip;
  if (x > kHi) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    if (zeta > 745.0) return 0.0;
    return -std::sqrt(std::sqrt(x)) * std::exp(-zeta) / (2 * kSqrtPi) *
           asymptotic_sum<double>(hankel().v, zeta, true);
  }
  const AiryTable& t = table();
  double y, yp;
  from_table(t.ai, t.aip, x, y, yp);
  return yp;
}

double bi(double x) { return airy_all(x).bi; }
double bi_prime(double x) { return airy_all(x).bip; }

std::complex<double> a_plus(double omega) {
  const AiryValues v = airy_all(-omega);
  return {0.5 * v.ai, -0.5 * v.bi};
}

std::complex<double> a_minus(double omega) { return std::conj(a_plus(omega)); }

// ---------------------------------------------------------------------------
// Zeros.

double airy_zero(int k) {
  if (k < 1) throw Error(ErrorKind::kDomain, "Airy zero index must be >= 1");
  const double t = 3.0 * kPi * (4.0 * k - 1.0) / 8.0;
  double w = std::pow(t, 2.0 / 3.0);
  const double spacing = kPi / std::sqrt(std::max(w, 1.0));
  double resid = ai(-w);
  for (int it = 0; it < 50; ++it) {
    const double d = -ai_prime(-w);
    double step = -resid / d;
    if (std::abs(step) > 0.5 * spacing) step = std::copysign(0.5 * spacing, step);
    w += step;
    resid = ai(-w);
    if (std::abs(resid) < 1e-13 || std::abs(step) < 4e-16 * w) {
      if (std::abs(resid) < 1e-12) return w;
    }
  }
  throw Error(ErrorKind::kNonConvergence,
              "Newton iteration for Airy zero " + std::to_string(k) +
                  " did not converge");
}

namespace {

struct ZeroCache {
  std::mutex mu;
  std::vector<double> omega;
  std::vector<double> cumulative;  // int_{-omega_k}^{15} Ai^2
};

ZeroCache& zero_cache() {
  static ZeroCache c;
  return c;
}

double ai_squared_integral(double lo, double hi, int panels) {
  return integrate_composite([](double s) { const double a = ai(s); return a * a; },
                             lo, hi, panels, 24);
}

}  // namespace

AiryZeroTable airy_zeros(int k_max) {
  if (k_max < 1) throw Error(ErrorKind::kDomain, "k_max must be >= 1");
  ZeroCache& c = zero_cache();
  std::lock_guard<std::mutex> lock(c.mu);
  while (static_cast<int>(c.omega.size()) < k_max) {
    const int k = static_cast<int>(c.omega.size()) + 1;
    const double w = airy_zero(k);
    double acc;
    if (k == 1) {
      // Truncated at x - omega_k = 15, where Ai^2 is below 1e-28.
      acc = ai_squared_integral(0.0, 15.0, 30) + ai_squared_integral(-w, 0.0, 4);
    } else {
      acc = c.cumulative.back() + ai_squared_integral(-w, -c.omega.back(), 1);
    }
    c.omega.push_back(w);
    c.cumulative.push_back(acc);
  }
  AiryZeroTable out;
  out.omega_.assign(c.omega.begin(), c.omega.begin() + k_max);
  out.lprime_.resize(static_cast<std::size_t>(k_max));
  for (int i = 0; i < k_max; ++i) out.lprime_[i] = 2.0 * kPi * c.cumulative[i];
  return out;
}

void AiryZeroTable::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path);
  f << "k,omega_k,lprime_k\n" << std::setprecision(17);
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    f << (i + 1) << ',' << omega_[i] << ',' << lprime_[i] << '\n';
  }
}

double phase_L_prime_at_zero(int k) { return airy_zeros(k).lprime(k); }

}  // namespace friedlab
