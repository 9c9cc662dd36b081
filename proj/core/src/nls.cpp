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

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>

#include "friedlab/airy.hpp"
#include "friedlab/error.hpp"
#include "friedlab/parallel.hpp"

namespace friedlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// The FFTW planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

struct Lobatto {
  std::vector<double> x;  // ascending, on [-1, 1], N + 1 points
  std::vector<double> w;
  std::vector<double> pn;  // P_N at the nodes
};

Lobatto lobatto(int N) {
  Lobatto g;
  g.x.resize(static_cast<std::size_t>(N + 1));
  g.pn.resize(g.x.size());
  g.w.resize(g.x.size());
  for (int j = 0; j <= N; ++j) {
    double x = -std::cos(std::numbers::pi * j / N);
    double pN = 0.0, pN1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= N; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pN = p1;
      pN1 = p0;
      if (j == 0 || j == N) break;
      const double dx = (x * pN - pN1) / ((N + 1.0) * pN);
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto s = static_cast<std::size_t>(j);
    g.x[s] = x;
    g.pn[s] = pN;
    g.w[s] = 2.0 / (N * (N + 1.0) * pN * pN);
  }
  return g;
}

void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace

void PeriodizedDomain::validate() const {
  require(x_max > 0.0, ErrorKind::kConfig, "x_max must be > 0");
  require(n_x >= 4, ErrorKind::kConfig, "n_x must be >= 4");
  require(n_y >= 2 && n_y % 2 == 0, ErrorKind::kConfig, "n_y must be even and >= 2");
  require(ell > 0.0, ErrorKind::kConfig, "ell must be > 0");
  require(k_max >= 0 && k_max <= n_x, ErrorKind::kConfig, "k_max must be in [0, n_x]");
  require(tail_buffer >= 0.0, ErrorKind::kConfig, "tail_buffer must be >= 0");
  require(form.dim() == 1, ErrorKind::kConfig, "the periodized solver is d = 2 (one y variable)");
}

struct SpectralTransform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

SpectralTransform::SpectralTransform(const PeriodizedDomain& domain)
    : domain_(domain), plans_(std::make_unique<Plans>()) {
  domain_.validate();
  const int N = domain_.n_x + 1;
  const Lobatto g = lobatto(N);
  const double X = domain_.x_max;
  x_.resize(static_cast<std::size_t>(domain_.n_x));
  wx_.resize(x_.size());
  for (int i = 1; i < N; ++i) {
    x_[static_cast<std::size_t>(i - 1)] = 0.5 * X * (1.0 + g.x[static_cast<std::size_t>(i)]);
    wx_[static_cast<std::size_t>(i - 1)] = 0.5 * X * g.w[static_cast<std::size_t>(i)];
  }
  nodes_.resize(g.x.size());
  bary_.resize(g.x.size());
  for (std::size_t l = 0; l < g.x.size(); ++l) {
    nodes_[l] = 0.5 * X * (1.0 + g.x[l]);
    // Lobatto barycentric weights are proportional to 1 / P_N(x_l).
    bary_[l] = 1.0 / g.pn[l];
  }

  // Stiffness K_ij = sum_l w_l D_li D_lj on [-1, 1]; on [0, X] it scales by 2 / X.
  Eigen::MatrixXd D(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= N; ++j) {
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      if (i != j) {
        D(i, j) = g.pn[si] / (g.pn[sj] * (g.x[si] - g.x[sj]));
      } else if (i == 0) {
        D(i, j) = -N * (N + 1.0) / 4.0;
      } else if (i == N) {
        D(i, j) = N * (N + 1.0) / 4.0;
      } else {
        D(i, j) = 0.0;
      }
    }
  }
  const int n = domain_.n_x;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int l = 0; l <= N; ++l) {
    const double wl = g.w[static_cast<std::size_t>(l)];
    for (int i = 0; i < n; ++i) {
      const double a = wl * D(l, i + 1);
      for (int j = 0; j < n; ++j) K(i, j) += a * D(l, j + 1);
    }
  }
  K *= 2.0 / X;
  Eigen::MatrixXd T(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      T(i, j) = K(i, j) / std::sqrt(wx_[static_cast<std::size_t>(i)] *
                                    wx_[static_cast<std::size_t>(j)]);
    }
  }

  const int n_abs = domain_.n_y / 2 + 1;
  lambda_.resize(static_cast<std::size_t>(n_abs));
  vectors_.resize(static_cast<std::size_t>(n_abs));
  certified_.assign(static_cast<std::size_t>(n_abs), 0);
  const double q_coeff = domain_.form.coeff(0, 0);
  int k_need = domain_.k_max;
  const AiryZeroTable zeros = airy_zeros(std::max(1, k_need));
  parallel_for(static_cast<std::size_t>(n_abs), [&](std::size_t am) {
    const double th = static_cast<double>(am) / domain_.ell;
    const double q = q_coeff * th * th;
    Eigen::MatrixXd H = T;
    for (int i = 0; i < n; ++i) H(i, i) += th * th + x_[static_cast<std::size_t>(i)] * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    Eigen::MatrixXd U = es.eigenvectors();
    for (int k = 0; k < n; ++k) {
      if (U(0, k) < 0.0) U.col(k) *= -1.0;
    }
    lambda_[am].assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    vectors_[am].assign(U.data(), U.data() + static_cast<std::ptrdiff_t>(n) * n);
    if (am == 0) return;
    const double q13 = std::cbrt(q);
    int cert = 0;
    for (int k = 1; k <= k_need; ++k) {
      if (zeros.omega(k) / q13 < domain_.x_max - domain_.tail_buffer / q13) cert = k;
    }
    certified_[am] = cert;
  });
  for (int am = 1; am < n_abs; ++am) {
    if (certified_[static_cast<std::size_t>(am)] < k_need) {
      const double q13 = std::cbrt(q_coeff * am * am / (domain_.ell * domain_.ell));
      throw Error(ErrorKind::kDomain,
                  "turning-point-overflow: mode k=" + std::to_string(k_need) + " at m=" +
                      std::to_string(am) + " turns at x=" +
                      format_double(zeros.omega(k_need) / q13) + ", needs < x_max - " +
                      format_double(domain_.tail_buffer / q13));
    }
  }

  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_complex* buf = fftw_alloc_complex(size());
  int len = domain_.n_y;
  plans_->forward = fftw_plan_many_dft(1, &len, domain_.n_x, buf, nullptr, 1, len, buf, nullptr,
                                       1, len, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_many_dft(1, &len, domain_.n_x, buf, nullptr, 1, len, buf, nullptr,
                                        1, len, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(buf);
}

SpectralTransform::~SpectralTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

double SpectralTransform::dy() const { return kTwoPi * domain_.ell / domain_.n_y; }
double SpectralTransform::y(int j) const { return j * dy(); }

int SpectralTransform::m_of(int jm) const {
  return jm < domain_.n_y / 2 ? jm : jm - domain_.n_y;
}

std::size_t SpectralTransform::abs_m_index(int jm) const {
  return static_cast<std::size_t>(std::abs(m_of(jm)));
}

double SpectralTransform::eigenvalue(int jm, int k) const {
  return lambda_[abs_m_index(jm)][static_cast<std::size_t>(k - 1)];
}

double SpectralTransform::basis(int jm, int k, int i) const {
  const auto n = static_cast<std::size_t>(domain_.n_x);
  return vectors_[abs_m_index(jm)][static_cast<std::size_t>(k - 1) * n +
                                   static_cast<std::size_t>(i)] /
         std::sqrt(wx_[static_cast<std::size_t>(i)]);
}

int SpectralTransform::certified_modes(int jm) const { return certified_[abs_m_index(jm)]; }

double SpectralTransform::tail_bound(int jm, int k) const {
  const double q = domain_.form.coeff(0, 0) * theta(jm) * theta(jm);
  if (q == 0.0) return 0.0;
  const double q13 = std::cbrt(q);
  const double w = airy_zeros(k).omega(k);
  return std::sqrt(q13) * std::abs(ai(q13 * domain_.x_max - w) / ai_prime(-w));
}

double SpectralTransform::gram_defect() const {
  const int n = domain_.n_x;
  double worst = 0.0;
  for (const auto& v : vectors_) {
    Eigen::Map<const Eigen::MatrixXd> U(v.data(), n, n);
    const Eigen::MatrixXd G = U.transpose() * U - Eigen::MatrixXd::Identity(n, n);
    worst = std::max(worst, G.cwiseAbs().maxCoeff());
  }
  return worst;
}

SpectralState SpectralTransform::to_spectral(const GridField& v) const {
  require(v.size() == size(), ErrorKind::kPrecondition, "grid shape does not match the domain");
  const int nx = domain_.n_x, ny = domain_.n_y;
  auto* buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size()));
  std::memcpy(buf, v.data(), sizeof(fftw_complex) * size());
  fftw_execute_dft(plans_->forward, buf, buf);
  const cplx* b = reinterpret_cast<const cplx*>(buf);
  const double scale = dy() / std::sqrt(kTwoPi * domain_.ell);
  SpectralState s;
  s.coeffs.assign(size(), {});
  for (int jm = 0; jm < ny; ++jm) {
    const std::vector<double>& U = vectors_[abs_m_index(jm)];
    for (int k = 0; k < nx; ++k) {
      const double* u = U.data() + static_cast<std::ptrdiff_t>(k) * nx;
      cplx acc{};
      for (int i = 0; i < nx; ++i) {
        acc += u[i] * std::sqrt(wx_[static_cast<std::size_t>(i)]) *
               b[static_cast<std::size_t>(i * ny + jm)];
      }
      s.coeffs[static_cast<std::size_t>(k * ny + jm)] = scale * acc;
    }
  }
  fftw_free(buf);
  return s;
}

GridField SpectralTransform::to_physical(const SpectralState& s) const {
  require(s.coeffs.size() == size(), ErrorKind::kPrecondition,
          "state shape does not match the domain");
  const int nx = domain_.n_x, ny = domain_.n_y;
  auto* buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size()));
  cplx* b = reinterpret_cast<cplx*>(buf);
  std::fill(b, b + size(), cplx{});
  for (int jm = 0; jm < ny; ++jm) {
    const std::vector<double>& U = vectors_[abs_m_index(jm)];
    for (int k = 0; k < nx; ++k) {
      const cplx c = s.coeffs[static_cast<std::size_t>(k * ny + jm)];
      if (c == cplx{}) continue;
      const double* u = U.data() + static_cast<std::ptrdiff_t>(k) * nx;
      for (int i = 0; i < nx; ++i) b[static_cast<std::size_t>(i * ny + jm)] += u[i] * c;
    }
  }
  const double scale = 1.0 / std::sqrt(kTwoPi * domain_.ell);
  for (int i = 0; i < nx; ++i) {
    const double f = scale / std::sqrt(wx_[static_cast<std::size_t>(i)]);
    for (int jm = 0; jm < ny; ++jm) b[static_cast<std::size_t>(i * ny + jm)] *= f;
  }
  fftw_execute_dft(plans_->backward, buf, buf);
  GridField v(b, b + size());
  fftw_free(buf);
  return v;
}

std::vector<cplx> SpectralTransform::sample_y(const SpectralState& s, double yv) const {
  const int nx = domain_.n_x, ny = domain_.n_y;
  std::vector<cplx> out(static_cast<std::size_t>(nx));
  const double scale = 1.0 / std::sqrt(kTwoPi * domain_.ell);
  for (int jm = 0; jm < ny; ++jm) {
    const cplx ph = scale * std::polar(1.0, theta(jm) * yv);
    for (int k = 1; k <= nx; ++k) {
      const cplx c = s.coeffs[static_cast<std::size_t>((k - 1) * ny + jm)];
      if (c == cplx{}) continue;
      for (int i = 0; i < nx; ++i) out[static_cast<std::size_t>(i)] += c * ph * basis(jm, k, i);
    }
  }
  return out;
}

std::vector<cplx> SpectralTransform::values_at_x(const SpectralState& s, double xv) const {
  require(xv >= 0.0 && xv <= domain_.x_max, ErrorKind::kPrecondition,
          "x=" + format_double(xv) + " is outside [0, x_max]");
  const GridField v = to_physical(s);
  const int ny = domain_.n_y;
  const std::size_t nn = nodes_.size();
  // Node values: zero at both ends, grid rows in between.
  auto row = [&](std::size_t l, int j) -> cplx {
    if (l == 0 || l + 1 == nn) return {};
    return v[(l - 1) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j)];
  };
  std::vector<cplx> out(static_cast<std::size_t>(ny));
  for (std::size_t l = 0; l < nn; ++l) {
    if (xv == nodes_[l]) {
      for (int j = 0; j < ny; ++j) out[static_cast<std::size_t>(j)] = row(l, j);
      return out;
    }
  }
  double den = 0.0;
  std::vector<double> c(nn);
  for (std::size_t l = 0; l < nn; ++l) {
    c[l] = bary_[l] / (xv - nodes_[l]);
    den += c[l];
  }
  for (int j = 0; j < ny; ++j) {
    cplx acc{};
    for (std::size_t l = 1; l + 1 < nn; ++l) acc += c[l] * row(l, j);
    out[static_cast<std::size_t>(j)] = acc / den;
  }
  return out;
}

std::vector<cplx> SpectralTransform::dirichlet_trace(const SpectralState& s) const {
  return values_at_x(s, 0.0);
}

double SpectralTransform::sup_refined(const SpectralState& s, int factor) const {
  require(factor >= 1, ErrorKind::kPrecondition, "refinement factor must be >= 1");
  const int nx = domain_.n_x, ny = domain_.n_y, nf = ny * factor;
  std::vector<cplx> b(static_cast<std::size_t>(nx * ny), cplx{});
  for (int jm = 0; jm < ny; ++jm) {
    for (int k = 1; k <= nx; ++k) {
      const cplx c = s.coeffs[static_cast<std::size_t>((k - 1) * ny + jm)];
      if (c == cplx{}) continue;
      for (int i = 0; i < nx; ++i) b[static_cast<std::size_t>(i * ny + jm)] += c * basis(jm, k, i);
    }
  }
  auto* buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nf));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(nf, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  cplx* z = reinterpret_cast<cplx*>(buf);
  const double scale = 1.0 / std::sqrt(kTwoPi * domain_.ell);
  double sup = 0.0;
  for (int i = 0; i < nx; ++i) {
    std::fill(z, z + nf, cplx{});
    for (int jm = 0; jm < ny; ++jm) {
      const int m = m_of(jm);
      z[static_cast<std::size_t>(m >= 0 ? m : m + nf)] = scale * b[static_cast<std::size_t>(i * ny + jm)];
    }
    fftw_execute(plan);
    for (int j = 0; j < nf; ++j) sup = std::max(sup, std::abs(z[static_cast<std::size_t>(j)]));
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return sup;
}

void linear_flow(const SpectralTransform& tr, SpectralState& s, double dt) {
  require(std::isfinite(dt), ErrorKind::kPrecondition, "dt must be finite");
  const int nx = tr.n_x(), ny = tr.n_y();
  // Extended precision keeps the modulus drift of repeated rotations below
  // double rounding on average.
  for (int k = 1; k <= nx; ++k) {
    for (int jm = 0; jm < ny; ++jm) {
      cplx& c = s.coeffs[static_cast<std::size_t>((k - 1) * ny + jm)];
      const long double ph = static_cast<long double>(tr.eigenvalue(jm, k)) * dt;
      const long double cr = std::cos(ph), si = std::sin(ph);
      const long double re = c.real(), im = c.imag();
      c = {static_cast<double>(re * cr - im * si), static_cast<double>(re * si + im * cr)};
    }
  }
  s.time += dt;
}

void nonlinear_phase(GridField& v, double dt, int kappa) {
  if (kappa == 0) return;
  for (cplx& z : v) z *= std::polar(1.0, kappa * std::norm(z) * dt);
}

void strang_step(const SpectralTransform& tr, SpectralState& s, double dt, int kappa) {
  if (kappa == 0) {
    linear_flow(tr, s, dt);
    return;
  }
  const double t = s.time;
  GridField v = tr.to_physical(s);
  nonlinear_phase(v, 0.5 * dt, kappa);
  s = tr.to_spectral(v);
  linear_flow(tr, s, dt);
  v = tr.to_physical(s);
  nonlinear_phase(v, 0.5 * dt, kappa);
  s = tr.to_spectral(v);
  s.time = t + dt;
}

double mass(const SpectralState& s) {
  double m = 0.0;
  for (const cplx& c : s.coeffs) m += std::norm(c);
  return m;
}

double energy(const SpectralTransform& tr, const SpectralState& s, int kappa) {
  const int nx = tr.n_x(), ny = tr.n_y();
  double kinetic = 0.0;
  for (int k = 1; k <= nx; ++k) {
    for (int jm = 0; jm < ny; ++jm) {
      kinetic += tr.eigenvalue(jm, k) * std::norm(s.coeffs[static_cast<std::size_t>((k - 1) * ny + jm)]);
    }
  }
  double quartic = 0.0;
  if (kappa != 0) {
    const GridField v = tr.to_physical(s);
    for (int i = 0; i < nx; ++i) {
      double row = 0.0;
      for (int j = 0; j < ny; ++j) {
        const double n2 = std::norm(v[static_cast<std::size_t>(i * ny + j)]);
        row += n2 * n2;
      }
      quartic += tr.x_weight(i) * tr.dy() * row;
    }
  }
  return 0.5 * kinetic + 0.25 * kappa * quartic;
}

double hm_norm(const SpectralTransform& tr, const SpectralState& s, double m) {
  const int nx = tr.n_x(), ny = tr.n_y();
  double acc = 0.0;
  for (int k = 1; k <= nx; ++k) {
    for (int jm = 0; jm < ny; ++jm) {
      acc += std::pow(1.0 + tr.eigenvalue(jm, k), m) *
             std::norm(s.coeffs[static_cast<std::size_t>((k - 1) * ny + jm)]);
    }
  }
  return std::sqrt(acc);
}

double nyquist_fraction(const SpectralTransform& tr, const SpectralState& s) {
  const int nx = tr.n_x(), ny = tr.n_y();
  double top = 0.0;
  for (int k = 0; k < nx; ++k) top += std::norm(s.coeffs[static_cast<std::size_t>(k * ny + ny / 2)]);
  const double total = mass(s);
  return total > 0.0 ? top / total : 0.0;
}

double uncertified_fraction(const SpectralTransform& tr, const SpectralState& s) {
  const int nx = tr.n_x(), ny = tr.n_y();
  double outside = 0.0;
  for (int k = 1; k <= nx; ++k) {
    for (int jm = 0; jm < ny; ++jm) {
      if (k > tr.certified_modes(jm)) {
        outside += std::norm(s.coeffs[static_cast<std::size_t>((k - 1) * ny + jm)]);
      }
    }
  }
  const double total = mass(s);
  return total > 0.0 ? outside / total : 0.0;
}

CsvTable ObservableSeries::to_csv() const {
  CsvTable t({"t", "mass", "energy", "h1", "h2", "trace"});
  for (const auto& s : samples) t.add_numeric_row({s.t, s.mass, s.energy, s.h1, s.h2, s.trace});
  return t;
}

namespace {

ObservableSample observe(const SpectralTransform& tr, const SpectralState& s, int kappa) {
  ObservableSample o;
  o.t = s.time;
  o.mass = mass(s);
  o.energy = energy(tr, s, kappa);
  o.h1 = hm_norm(tr, s, 1.0);
  o.h2 = hm_norm(tr, s, 2.0);
  for (const cplx& z : tr.dirichlet_trace(s)) o.trace = std::max(o.trace, std::abs(z));
  return o;
}

bool finite_state(const SpectralState& s) {
  for (const cplx& c : s.coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

}  // namespace

ObservableSeries evolve(const SpectralTransform& tr, SpectralState& s, double t_end, double dt,
                        int kappa, const EvolveOptions& opts) {
  require(kappa >= -1 && kappa <= 1, ErrorKind::kConfig, "kappa must be -1, 0 or 1");
  require(dt > 0.0 && t_end >= 0.0, ErrorKind::kConfig, "need dt > 0 and t_end >= 0");
  require(opts.observe_every > 0.0, ErrorKind::kConfig, "observe_every must be > 0");
  if (kappa < 0 && mass(s) > opts.focusing_mass_limit) {
    throw Error(ErrorKind::kConfig, "focusing run needs mass <= " +
                                        format_double(opts.focusing_mass_limit) + ", got " +
                                        format_double(mass(s)));
  }
  const long steps = std::lround(t_end / dt);
  const long every = std::max(1L, std::lround(opts.observe_every / dt));
  ObservableSeries series;
  const double t0 = s.time;
  series.samples.push_back(observe(tr, s, kappa));
  if (opts.on_sample) opts.on_sample(s);
  SpectralState last = s;
  for (long n = 1; n <= steps; ++n) {
    strang_step(tr, s, dt, kappa);
    s.time = t0 + static_cast<double>(n) * dt;
    if (!finite_state(s)) {
      if (!opts.checkpoint_on_failure.empty()) write_checkpoint(opts.checkpoint_on_failure, tr, last);
      s = last;
      throw Error(ErrorKind::kBlowup, "non-finite state at t=" + format_double(s.time + dt));
    }
    last = s;
    if (n % every == 0 || n == steps) {
      series.samples.push_back(observe(tr, s, kappa));
      if (opts.on_sample) opts.on_sample(s);
    }
  }
  return series;
}

GrowthReport growth_report(const std::vector<double>& t, const std::vector<double>& norm,
                           double min_span) {
  require(t.size() == norm.size() && t.size() >= 2, ErrorKind::kPrecondition,
          "growth report needs at least two samples");
  require(t.back() - t.front() >= min_span, ErrorKind::kPrecondition,
          "insufficient span: " + format_double(t.back() - t.front()) + " < " +
              format_double(min_span));
  const double n = static_cast<double>(t.size());
  double mt = 0.0, my = 0.0;
  std::vector<double> ly(norm.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    require(norm[i] > 0.0, ErrorKind::kPrecondition, "norms must be positive");
    ly[i] = std::log(norm[i]);
    mt += t[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxy += (t[i] - mt) * (ly[i] - my);
    sxx += (t[i] - mt) * (t[i] - mt);
  }
  GrowthReport r;
  r.envelope_rate = sxy / sxx;
  r.intercept = my - r.envelope_rate * mt;
  for (std::size_t i = 0; i < t.size(); ++i) {
    r.max_excess = std::max(r.max_excess, ly[i] - (r.intercept + r.envelope_rate * t[i]));
  }
  r.pass = r.max_excess <= std::log(2.0);
  return r;
}

GrowthReport growth_report(const ObservableSeries& series, int m, double min_span) {
  require(m == 1 || m == 2, ErrorKind::kPrecondition, "series carries H^1 and H^2 only");
  std::vector<double> t, v;
  for (const auto& s : series.samples) {
    t.push_back(s.t);
    v.push_back(m == 1 ? s.h1 : s.h2);
  }
  return growth_report(t, v, min_span);
}

namespace {

void normalize(SpectralState& s, double target) {
  const double m = mass(s);
  require(m > 0.0, ErrorKind::kPrecondition, "initial data vanishes on the grid");
  const double f = std::sqrt(target / m);
  for (cplx& c : s.coeffs) c *= f;
}

int jm_of(const SpectralTransform& tr, int m) {
  const int ny = tr.n_y();
  require(m >= -ny / 2 && m < ny / 2, ErrorKind::kPrecondition,
          "m=" + std::to_string(m) + " is outside the Fourier range");
  return m >= 0 ? m : m + ny;
}

}  // namespace

SpectralState mode_state(const SpectralTransform& tr, int k, int m, cplx amplitude) {
  require(k >= 1 && k <= tr.n_x(), ErrorKind::kPrecondition, "mode index out of range");
  SpectralState s;
  s.coeffs.assign(tr.size(), {});
  s.coeffs[static_cast<std::size_t>((k - 1) * tr.n_y() + jm_of(tr, m))] = amplitude;
  return s;
}

SpectralState gallery_state(const SpectralTransform& tr, int k, double m0, double dm,
                            double target_mass) {
  require(dm > 0.0, ErrorKind::kPrecondition, "envelope width must be > 0");
  SpectralState s;
  s.coeffs.assign(tr.size(), {});
  const int ny = tr.n_y();
  for (int jm = 0; jm < ny; ++jm) {
    if (tr.certified_modes(jm) < k) continue;
    const double z = (tr.m_of(jm) - m0) / dm;
    if (z * z > 80.0) continue;
    s.coeffs[static_cast<std::size_t>((k - 1) * ny + jm)] = std::exp(-0.5 * z * z);
  }
  normalize(s, target_mass);
  return s;
}

SpectralState gaussian_state(const SpectralTransform& tr, double x0, double y0, double wx,
                             double wy, double px, double py, double target_mass) {
  require(wx > 0.0 && wy > 0.0, ErrorKind::kPrecondition, "packet widths must be > 0");
  const int nx = tr.n_x(), ny = tr.n_y();
  const double period = kTwoPi * tr.domain().ell;
  GridField v(tr.size());
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double dx = tr.x(i) - x0;
      double dyv = std::remainder(tr.y(j) - y0, period);
      v[static_cast<std::size_t>(i * ny + j)] =
          std::exp(-0.5 * (dx * dx / (wx * wx) + dyv * dyv / (wy * wy))) *
          std::polar(1.0, px * tr.x(i) + py * dyv);
    }
  }
  SpectralState s = tr.to_spectral(v);
  normalize(s, target_mass);
  return s;
}

SpectralState random_band_state(const SpectralTransform& tr, std::uint64_t seed, int m_lo,
                                int m_hi, double target_mass) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralState s;
  s.coeffs.assign(tr.size(), {});
  const int ny = tr.n_y();
  for (int jm = 0; jm < ny; ++jm) {
    const int am = std::abs(tr.m_of(jm));
    for (int k = 1; k <= tr.domain().n_x; ++k) {
      // Draw for every slot so the sequence does not depend on the band.
      const double re = gauss(rng), im = gauss(rng);
      if (am < m_lo || am > m_hi || k > tr.certified_modes(jm)) continue;
      s.coeffs[static_cast<std::size_t>((k - 1) * ny + jm)] = {re, im};
    }
  }
  normalize(s, target_mass);
  return s;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char b[sizeof(T)];
  is.read(reinterpret_cast<char*>(b), sizeof(T));
  if (!is) throw Error(ErrorKind::kIo, "truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

constexpr char kMagic[8] = {'F', 'L', 'N', 'L', 'S', 'C', 'K', '1'};

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const SpectralTransform& tr,
                      const SpectralState& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  os.write(kMagic, sizeof(kMagic));
  put_le<std::int32_t>(os, tr.n_x());
  put_le<std::int32_t>(os, tr.n_y());
  put_le<double>(os, s.time);
  for (const cplx& c : s.coeffs) {
    put_le<double>(os, c.real());
    put_le<double>(os, c.imag());
  }
  if (!os) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

SpectralState read_checkpoint(const std::filesystem::path& path, const SpectralTransform& tr) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorKind::kIntegrity, "not a checkpoint: " + path.string());
  }
  const auto nx = get_le<std::int32_t>(is);
  const auto ny = get_le<std::int32_t>(is);
  if (nx != tr.n_x() || ny != tr.n_y()) {
    throw Error(ErrorKind::kIntegrity, "checkpoint shape does not match the domain");
  }
  SpectralState s;
  s.time = get_le<double>(is);
  s.coeffs.resize(tr.size());
  for (cplx& c : s.coeffs) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    c = {re, im};
  }
  return s;
}

}  // namespace friedlab
