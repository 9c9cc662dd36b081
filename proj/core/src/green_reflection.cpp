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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "eta_integral.hpp"
#include "friedlab/airy.hpp"
#include "friedlab/error.hpp"
#include "friedlab/quadrature.hpp"

namespace friedlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

struct FormAt {
  double q = 0.0;
  double qh = 0.0;  // q^{1/2}
  std::vector<double> grad;
  double norm2 = 0.0;
};

FormAt form_at(const QuadraticForm& form, std::span<const double> eta) {
  FormAt f;
  f.q = form.eval(eta);
  f.qh = std::sqrt(f.q);
  f.grad.resize(eta.size());
  form.gradient(eta, f.grad);
  for (double e : eta) f.norm2 += e * e;
  return f;
}

void check_eta(const ReflectionPhaseParams& p, std::span<const double> eta) {
  if (static_cast<int>(eta.size()) != p.model.form.dim() ||
      static_cast<int>(p.y.size()) != p.model.form.dim()) {
    throw Error(ErrorKind::kDomain, "eta/y dimension must equal d - 1");
  }
}

// The bracket multiplying gamma^{3/2} q^{1/2} in the phase.
double packet_bracket(const ReflectionPhaseParams& p, double alpha, double sigma, double s) {
  const double g = p.gamma();
  return sigma * sigma * sigma / 3.0 + sigma * (p.x / g - alpha) + s * s * s / 3.0 +
         s * (p.model.a / g - alpha) - 4.0 / 3.0 * p.N * std::pow(alpha, 1.5);
}

}  // namespace

double ReflectionPhaseParams::lambda_gamma() const {
  return std::pow(gamma(), 1.5) / model.h;
}

ReflectionPhaseParams ReflectionPhaseParams::make(const ModelParams& model, int N, double gamma,
                                                  double t, double x, double y) {
  ReflectionPhaseParams p;
  p.model = model;
  p.N = N;
  p.block = SpectralBlock{gamma, 0.5 * gamma};
  p.t = t;
  p.x = x;
  p.y = {y};
  return p;
}

double phi_N(const ReflectionPhaseParams& p, std::span<const double> eta, double alpha,
             double sigma, double s) {
  check_eta(p, eta);
  if (!(alpha > 0.0)) throw Error(ErrorKind::kDomain, "phi_N needs alpha > 0");
  const FormAt f = form_at(p.model.form, eta);
  const double g = p.gamma();
  double yeta = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) yeta += p.y[j] * eta[j];
  return yeta + p.t * f.norm2 + p.t * g * alpha * f.q +
         std::pow(g, 1.5) * f.qh * packet_bracket(p, alpha, sigma, s);
}

PhaseGradient phi_N_gradient(const ReflectionPhaseParams& p, std::span<const double> eta,
                             double alpha, double sigma, double s) {
  check_eta(p, eta);
  if (!(alpha > 0.0)) throw Error(ErrorKind::kDomain, "phi_N needs alpha > 0");
  const FormAt f = form_at(p.model.form, eta);
  const double g = p.gamma();
  const double g32 = std::pow(g, 1.5);
  const double P = packet_bracket(p, alpha, sigma, s);
  PhaseGradient out;
  out.d_alpha = p.t * g * f.q + g32 * f.qh * (-sigma - s - 2.0 * p.N * std::sqrt(alpha));
  out.d_eta.resize(eta.size());
  for (std::size_t j = 0; j < eta.size(); ++j) {
    out.d_eta[j] = p.y[j] + 2.0 * p.t * eta[j] + p.t * g * alpha * f.grad[j] +
                   g32 * P * f.grad[j] / (2.0 * f.qh);
  }
  out.d_sigma = g32 * f.qh * (sigma * sigma + p.x / g - alpha);
  out.d_s = g32 * f.qh * (s * s + p.model.a / g - alpha);
  return out;
}

std::vector<double> phi_N_hessian(const ReflectionPhaseParams& p, std::span<const double> eta,
                                  double alpha, double sigma, double s) {
  check_eta(p, eta);
  const FormAt f = form_at(p.model.form, eta);
  const int m = p.model.form.dim();
  const int n = m + 1;
  const double g = p.gamma();
  const double g32 = std::pow(g, 1.5);
  const double P = packet_bracket(p, alpha, sigma, s);
  std::vector<double> H(static_cast<std::size_t>(n * n));
  auto at = [&](int i, int j) -> double& { return H[static_cast<std::size_t>(i * n + j)]; };
  at(0, 0) = -g32 * f.qh * p.N / std::sqrt(alpha);
  for (int j = 0; j < m; ++j) {
    const double v = p.t * g * f.grad[j] +
                     g32 * f.grad[j] / (2.0 * f.qh) * (-sigma - s - 2.0 * p.N * std::sqrt(alpha));
    at(0, j + 1) = v;
    at(j + 1, 0) = v;
  }
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      const double Q = p.model.form.coeff(j, k);
      double v = 2.0 * p.t * g * alpha * Q +
                 g32 * P * (Q / f.qh - f.grad[j] * f.grad[k] / (4.0 * f.q * f.qh));
      if (j == k) v += 2.0 * p.t;
      at(j + 1, k + 1) = v;
    }
  }
  return H;
}

double window_constant(const QuadraticForm& form, double eps0) {
  return 4.0 * std::max(std::sqrt(1.5) / (form.m0() - eps0), (form.M0() + eps0) / std::sqrt(0.5));
}

std::vector<int> NWindow::members() const {
  std::vector<int> out{0};
  if (no_reflection) return out;
  for (int n = n_lo; n <= n_hi; ++n) out.push_back(n);
  return out;
}

NWindow n_window(double t, double gamma, const QuadraticForm& form, double eps0, double a) {
  if (!(t > 0.0)) throw Error(ErrorKind::kPrecondition, "n_window needs t > 0");
  if (!(gamma > 0.0)) throw Error(ErrorKind::kPrecondition, "n_window needs gamma > 0");
  NWindow w;
  const double sg = std::sqrt(gamma);
  const double threshold = (a / sg) / (2.0 * std::sqrt(1.5) * std::pow(form.M0(), 2.0 / 3.0));
  if (t < threshold) {
    w.no_reflection = true;
    w.n_lo = 1;
    w.n_hi = 0;
    return w;
  }
  const double M = window_constant(form, eps0);
  const double T = t / sg;
  w.n_lo = std::max(1, static_cast<int>(std::ceil(T / (2.0 * M))));
  w.n_hi = static_cast<int>(std::floor(M * T / 2.0));
  if (w.empty()) w.no_reflection = true;
  return w;
}

namespace {

constexpr int kMaxDim = 3;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

// Newton state for the (alpha, eta) system at fixed (sigma, s). The alpha row
// is divided by gamma^{3/2} q^{1/2} so both rows are O(1).
class CritSystem {
 public:
  CritSystem(const ReflectionPhaseParams& p, double sigma, double s)
      : p_(p), m_(p.model.form.dim()), sigma_(sigma), s_(s) {
    g_ = p.gamma();
    g32_ = std::pow(g_, 1.5);
    pre_ = sigma * sigma * sigma / 3.0 + sigma * p.x / g_ + s * s * s / 3.0 + s * p.model.a / g_;
  }

  int dim() const { return m_; }

  // Residual at z = (alpha, eta); fills the Jacobian when jac is non-null.
  void eval(const SmallVec& z, SmallVec& f, SmallMat* jac) const {
    const double alpha = z(0);
    const QuadraticForm& form = p_.model.form;
    double grad[kMaxDim - 1];
    double q = 0.0;
    for (int j = 0; j < m_; ++j) {
      double row = 0.0;
      for (int k = 0; k < m_; ++k) row += form.coeff(j, k) * z(k + 1);
      grad[j] = 2.0 * row;
      q += z(j + 1) * row;
    }
    const double qh = std::sqrt(q);
    const double sa = std::sqrt(alpha);
    const double bracket = -sigma_ - s_ - 2.0 * p_.N * sa;
    const double P = pre_ - (sigma_ + s_) * alpha - 4.0 / 3.0 * p_.N * alpha * sa;
    const double scale = g32_ * qh;
    f.resize(m_ + 1);
    f(0) = p_.t * g_ * q / scale + bracket;
    for (int j = 0; j < m_; ++j) {
      f(j + 1) = p_.y[j] + 2.0 * p_.t * z(j + 1) + p_.t * g_ * alpha * grad[j] +
                 g32_ * P * grad[j] / (2.0 * qh);
    }
    if (jac == nullptr) return;
    SmallMat& J = *jac;
    J.resize(m_ + 1, m_ + 1);
    J(0, 0) = -p_.N / sa;
    for (int j = 0; j < m_; ++j) {
      // d/d eta of t g q / (g^{3/2} q^{1/2}) = t g grad / (2 g^{3/2} q^{1/2}).
      J(0, j + 1) = p_.t * g_ * grad[j] / (2.0 * scale);
      J(j + 1, 0) = p_.t * g_ * grad[j] + g32_ * grad[j] / (2.0 * qh) * bracket;
      for (int k = 0; k < m_; ++k) {
        const double Q = form.coeff(j, k);
        double v = 2.0 * p_.t * g_ * alpha * Q +
                   g32_ * P * (Q / qh - grad[j] * grad[k] / (4.0 * q * qh));
        if (j == k) v += 2.0 * p_.t;
        J(j + 1, k + 1) = v;
      }
    }
  }

  double residual_alpha(const SmallVec& f) const { return std::abs(f(0)); }
  double residual_eta(const SmallVec& f) const { return f.tail(m_).norm(); }

 private:
  const ReflectionPhaseParams& p_;
  int m_;
  double sigma_, s_;
  double g_ = 0.0, g32_ = 0.0, pre_ = 0.0;
};

double box_margin(const SmallVec& z) {
  const double r = z.tail(z.size() - 1).norm();
  return std::min({z(0) - 0.25, 2.0 - z(0), r - 0.25, 2.0 - r});
}

void finish_hessian(const ReflectionPhaseParams& p, double sigma, double s, CriticalPoint& cp) {
  const int n = 1 + static_cast<int>(cp.eta_c.size());
  const std::vector<double> H = phi_N_hessian(p, cp.eta_c, cp.alpha_c, sigma, s);
  SmallMat M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M(i, j) = H[static_cast<std::size_t>(i * n + j)];
  }
  Eigen::SelfAdjointEigenSolver<SmallMat> es(M, Eigen::EigenvaluesOnly);
  cp.hessian_det = 1.0;
  cp.signature = 0;
  for (int i = 0; i < n; ++i) {
    const double ev = es.eigenvalues()(i);
    cp.hessian_det *= ev;
    cp.signature += ev > 0.0 ? 1 : -1;
  }
}

CriticalPoint solve_crit_from(const ReflectionPhaseParams& p, double sigma, double s,
                              const SmallVec* warm) {
  const int m = p.model.form.dim();
  if (m + 1 > kMaxDim) throw Error(ErrorKind::kConfig, "solve_crit supports d <= 3");
  if (!(p.t > 0.0)) throw Error(ErrorKind::kPrecondition, "solve_crit needs t > 0");
  if (static_cast<int>(p.y.size()) != m) throw Error(ErrorKind::kDomain, "y dimension mismatch");
  const CritSystem sys(p, sigma, s);

  SmallVec z(m + 1);
  if (warm != nullptr) {
    z = *warm;
  } else {
    for (int j = 0; j < m; ++j) z(j + 1) = -p.y[j] / (2.0 * p.t);
    const double r = z.tail(m).norm();
    if (r < 0.25 || r > 2.0) {
      const double target = std::clamp(r, 0.25, 2.0);
      if (r > 0.0) {
        z.tail(m) *= target / r;
      } else {
        z(1) = target;
      }
    }
    if (p.N >= 1) {
      std::vector<double> eta(z.data() + 1, z.data() + 1 + m);
      const double root = p.t * std::sqrt(p.model.form.eval(eta)) / (2.0 * p.N * std::sqrt(p.gamma())) -
                          (sigma + s) / (2.0 * p.N);
      z(0) = std::clamp(root > 0.0 ? root * root : 0.25, 0.25, 2.0);
    } else {
      z(0) = 0.5;
    }
  }

  SmallVec f, step, z_new, f_new;
  SmallMat J;
  sys.eval(z, f, &J);
  int stalls = 0;
  int it = 0;
  for (; it < 50; ++it) {
    if (sys.residual_alpha(f) < 1e-12 && sys.residual_eta(f) < 1e-12) break;
    step = J.partialPivLu().solve(-f);
    double damp = 1.0;
    bool moved = false;
    const double norm = f.norm();
    for (int tries = 0; tries < 30; ++tries, damp *= 0.5) {
      z_new = z + damp * step;
      if (box_margin(z_new) < 0.0) continue;
      sys.eval(z_new, f_new, nullptr);
      if (f_new.norm() < norm) {
        z = z_new;
        moved = true;
        break;
      }
    }
    if (!moved) {
      if (++stalls >= 3) break;
      continue;
    }
    stalls = 0;
    sys.eval(z, f, &J);
  }

  CriticalPoint cp;
  cp.iterations = it;
  cp.alpha_c = z(0);
  cp.eta_c.assign(z.data() + 1, z.data() + 1 + m);
  cp.residual_alpha = sys.residual_alpha(f);
  cp.residual_eta = sys.residual_eta(f);
  cp.converged = cp.residual_alpha < 1e-12 && cp.residual_eta < 1e-12;
  if (cp.converged) {
    cp.status = CritStatus::kConverged;
    finish_hessian(p, sigma, s, cp);
  } else {
    // Pinned against the box: the root, if any, lies outside [1/4, 2].
    cp.status = (stalls > 0 || box_margin(z) < 1e-6) ? CritStatus::kNoCriticalPoint
                                                     : CritStatus::kNonConvergence;
  }
  return cp;
}

}  // namespace

CriticalPoint solve_crit(const ReflectionPhaseParams& p, double sigma, double s) {
  return solve_crit_from(p, sigma, s, nullptr);
}

double k_fun(const ReflectionPhaseParams& p, std::span<const double> Y_over_4N, double T_over_2N) {
  const QuadraticForm& form = p.model.form;
  const int m = form.dim();
  if (static_cast<int>(Y_over_4N.size()) != m) throw Error(ErrorKind::kDomain, "Y dimension");
  if (!(T_over_2N > 0.0)) throw Error(ErrorKind::kDomain, "T/2N must be > 0");
  const double g = p.block.upper;
  const double tau = T_over_2N;
  Eigen::VectorXd v(m), eta(m);
  for (int j = 0; j < m; ++j) v(j) = Y_over_4N[j] / tau;
  eta = -v;
  std::vector<double> e(static_cast<std::size_t>(m)), grad(static_cast<std::size_t>(m));
  for (int it = 0; it < 60; ++it) {
    for (int j = 0; j < m; ++j) e[j] = eta(j);
    const double q = form.eval(e);
    form.gradient(e, grad);
    Eigen::VectorXd F(m);
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(m, m);
    for (int j = 0; j < m; ++j) {
      F(j) = eta(j) + 0.5 * g * tau * tau * q * grad[j] + v(j);
      for (int k = 0; k < m; ++k) {
        J(j, k) += 0.5 * g * tau * tau * (grad[j] * grad[k] + 2.0 * q * form.coeff(j, k));
      }
    }
    if (F.norm() < 1e-15 * (1.0 + v.norm())) break;
    eta -= J.fullPivLu().solve(F);
    if (!eta.allFinite()) throw Error(ErrorKind::kNonConvergence, "k_fun: Newton diverged");
  }
  for (int j = 0; j < m; ++j) e[j] = eta(j);
  return tau * std::sqrt(form.eval(e));
}

std::vector<double> swallowtail_locus(const ReflectionPhaseParams& p, int N) {
  detail::require_d2(p.model);
  if (N < 1) throw Error(ErrorKind::kDomain, "swallowtail locus needs N >= 1");
  const double sg = std::sqrt(p.block.upper);
  const double T = p.t / sg;
  const double tau = T / (2.0 * N);
  std::vector<double> out;
  for (double dir : {-1.0, 1.0}) {
    auto f = [&](double r) {
      const double Y = dir * r / (4.0 * N);
      return k_fun(p, std::span<const double>(&Y, 1), tau) - 1.0;
    };
    const double lo = 0.5 * T, hi = 4.0 * T;
    const int samples = 200;
    double a = lo, fa = f(lo);
    bool found = false;
    for (int i = 1; i <= samples && !found; ++i) {
      const double b = lo + (hi - lo) * i / samples;
      const double fb = f(b);
      if ((fa <= 0.0) != (fb <= 0.0)) {
        double x0 = a, x1 = b, f0 = fa;
        for (int it = 0; it < 200 && x1 - x0 > 1e-15 * x1; ++it) {
          const double mid = 0.5 * (x0 + x1);
          const double fm = f(mid);
          if ((f0 <= 0.0) == (fm <= 0.0)) {
            x0 = mid;
            f0 = fm;
          } else {
            x1 = mid;
          }
        }
        out.push_back(dir * sg * 0.5 * (x0 + x1));
        found = true;
      }
      a = b;
      fa = fb;
    }
    if (!found) {
      throw Error(ErrorKind::kDomain, "no-locus: K - 1 has no sign change for |Y| in [T/2, 4T]");
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_string(PacketMethod m) { return m == PacketMethod::kBrute ? "brute" : "reduced"; }

double OmegaFloor::operator()(double omega) const {
  return smooth_step((omega - omega_lo) / (omega_hi - omega_lo));
}

namespace {

// One block and the reflections to take for it.
struct BlockTerms {
  SpectralBlock block;
  std::vector<int> ns;
};

// Components are the distinct N over all blocks, ascending.
detail::EtaFieldResult reflection_components(const ModelParams& model, double t,
                                             const std::vector<double>& xs,
                                             const std::vector<double>& ys,
                                             const std::vector<BlockTerms>& blocks,
                                             const ReflectionOptions& opts,
                                             std::vector<int>& n_values, double omega_scale = 1.0) {
  detail::require_d2(model);
  std::map<int, int> index;
  for (const auto& b : blocks) {
    for (int n : b.ns) index.emplace(n, 0);
  }
  n_values.clear();
  for (auto& [n, i] : index) {
    i = static_cast<int>(n_values.size());
    n_values.push_back(n);
  }
  const int ncomp = static_cast<int>(n_values.size());
  if (ncomp == 0) throw Error(ErrorKind::kPrecondition, "no reflection terms requested");

  const double h = model.h;
  const double h23 = model.h23();
  const double a = model.a;
  const double q11 = model.form.coeff(0, 0);
  const CutoffFamily& c = model.cutoffs;
  const double q13_max = std::cbrt(q11 * 2.25);
  const double q23_max = q13_max * q13_max;

  double upper = 0.0;
  for (const auto& b : blocks) upper = std::max(upper, b.block.upper);
  const double w_lo = opts.floor.omega_lo;
  const double w_hi = upper * q13_max / h23;
  int n_abs = 0;
  for (int n : n_values) n_abs = std::max(n_abs, std::abs(n));
  double xmax = 0.0;
  for (double x : xs) xmax = std::max(xmax, x);
  const double rate = n_abs * 2.0 * std::sqrt(std::max(w_hi, 1.0)) + t * q23_max / std::cbrt(h) +
                      2.0 * std::sqrt(w_hi + 1.0);
  const int panels = std::max(
      8, static_cast<int>(std::ceil(omega_scale * rate * (w_hi - w_lo) / opts.omega_radians_per_panel)));
  const CompositeRule wr = composite_gauss(w_lo, w_hi, panels, opts.omega_order);
  const std::size_t nw = wr.size();

  // e^{-iNL(w)} times the quadrature weight and the floor.
  std::vector<cplx> kernel(nw * static_cast<std::size_t>(ncomp));
  for (std::size_t j = 0; j < nw; ++j) {
    const double L = phase_L(wr.x[j]);
    const double base = wr.w[j] * opts.floor(wr.x[j]);
    for (int ci = 0; ci < ncomp; ++ci) {
      kernel[j * ncomp + ci] = base * std::polar(1.0, -n_values[ci] * L);
    }
  }
  std::vector<std::vector<int>> block_comp(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int n : blocks[b].ns) block_comp[b].push_back(index.at(n));
  }

  auto profile = [&](std::size_t ix, std::span<const double> eta, std::span<cplx> out) {
    const double x = xs[ix];
    std::fill(out.begin(), out.end(), cplx{});
    for (std::size_t je = 0; je < eta.size(); ++je) {
      const double e = eta[je];
      const double q13 = std::cbrt(q11 * e * e);
      const double q23 = q13 * q13;
      for (std::size_t j = 0; j < nw; ++j) {
        const double w = wr.x[j];
        const double u = h23 * w / q13;
        double psi1 = opts.drop_psi1 ? 1.0 : c.psi1(std::sqrt(std::max(0.0, e * e + h23 * w * q23)));
        if (psi1 == 0.0) continue;
        double wsum_any = 0.0;
        for (const auto& b : blocks) wsum_any += std::abs(b.block.weight(c, u));
        if (wsum_any == 0.0) continue;
        const cplx amp = psi1 * q13 / h23 * ai(x * q13 / h23 - w) * ai(a * q13 / h23 - w) *
                         std::polar(1.0, t * h23 * w * q23 / h);
        for (std::size_t b = 0; b < blocks.size(); ++b) {
          const double bw = blocks[b].block.weight(c, u);
          if (bw == 0.0) continue;
          const cplx v = bw * amp;
          for (int ci : block_comp[b]) out[je * ncomp + ci] += v * kernel[j * ncomp + ci];
        }
      }
    }
  };
  const double eta_rate = t * h23 * w_hi * q23_max / h + std::sqrt(w_hi + 1.0) * (xmax + a) *
                                                            std::cbrt(q11 * 2.0) / h23;
  return detail::eta_field(xs, ys, t, h, c, profile, eta_rate, opts.eta, ncomp);
}

// Clipped (sigma, s) quadrature of one packet at one point; psi2-type blocks.
cplx brute_quadrature(const ReflectionPhaseParams& p, const ReflectionOptions& opts, double clip) {
  detail::require_d2(p.model);
  if (p.block.is_bottom()) {
    throw Error(ErrorKind::kPrecondition, "clipped quadrature needs a block bounded away from 0");
  }
  const ModelParams& m = p.model;
  const double h = m.h, g = p.gamma(), g32 = std::pow(g, 1.5);
  const double lam = g32 / h;
  const double q11 = m.form.coeff(0, 0);
  const CutoffFamily& c = m.cutoffs;
  const double y = p.y[0];
  const double al_lo = p.block.support_lo() / g, al_hi = p.block.support_hi() / g;
  const double qh_max = std::sqrt(q11) * 1.5;

  const GaussRule& gl = gauss_legendre(16);
  auto rule_for = [&](double lo, double hi, double total_phase, int min_nodes) {
    const int panels = std::max((min_nodes + 15) / 16,
                                static_cast<int>(std::ceil(total_phase / opts.omega_radians_per_panel)));
    (void)gl;
    return composite_gauss(lo, hi, panels, 16);
  };
  const double eta_phase = (std::abs(y) + 3.0 * p.t + p.t * g * al_hi * q11 * 3.0 +
                            g32 * qh_max * (4.0 / 3.0 * std::abs(p.N) * 3.0 + 10.0)) / h;
  const CompositeRule er = rule_for(0.5, 1.5, eta_phase, opts.eta_nodes);
  const double a_phase =
      (p.t * g * q11 * 2.25 + g32 * qh_max * (2.0 * std::abs(p.N) * std::sqrt(al_hi) + 4.0 * clip)) / h *
      (al_hi - al_lo);
  const CompositeRule ar = rule_for(al_lo, al_hi, a_phase, opts.alpha_nodes);

  auto airy_clip = [&](double qh, double alpha, double shift) {
    // int chi(z / (clip sqrt(alpha))) e^{i lam qh (z^3/3 + z (shift - alpha))} dz
    const double R = clip * std::sqrt(alpha);
    const double ph = lam * qh * (R * R + std::abs(shift - alpha)) * 2.0 * R;
    const CompositeRule zr = rule_for(-R, R, ph, opts.sigma_nodes);
    cplx acc{};
    for (std::size_t i = 0; i < zr.size(); ++i) {
      const double z = zr.x[i];
      const double chi = c.phi(z / R);
      if (chi == 0.0) continue;
      acc += zr.w[i] * chi * std::polar(1.0, lam * qh * (z * z * z / 3.0 + z * (shift - alpha)));
    }
    return acc;
  };

  cplx total{};
  for (double sign : {-1.0, 1.0}) {
    for (std::size_t ie = 0; ie < er.size(); ++ie) {
      const double e = sign * er.x[ie];
      const double ae = std::abs(e);
      const double q = q11 * e * e, qh = std::sqrt(q), q13 = std::cbrt(q);
      const double psi = c.psi(ae);
      if (psi == 0.0) continue;
      cplx inner{};
      for (std::size_t ia = 0; ia < ar.size(); ++ia) {
        const double al = ar.x[ia];
        const double bw = p.block.weight(c, g * al);
        if (bw == 0.0) continue;
        const double w = q13 * std::pow(lam, 2.0 / 3.0) * al;
        double sym = bw * opts.floor(w);
        if (!opts.drop_psi1) sym *= c.psi1(ae * std::sqrt(1.0 + g * al * q11));
        if (sym == 0.0) continue;
        const double phase = (p.t * g * al * q) / h - 4.0 / 3.0 * p.N * std::pow(w, 1.5);
        const cplx corr = std::polar(1.0, -p.N * (phase_L(w) - 4.0 / 3.0 * std::pow(w, 1.5)));
        inner += ar.w[ia] * sym * corr * std::polar(1.0, phase) * airy_clip(qh, al, p.x / g) *
                 airy_clip(qh, al, m.a / g);
      }
      total += er.w[ie] * q * psi * std::polar(1.0, (y * e + p.t * e * e) / h) * inner;
    }
  }
  return std::pow(kTwoPi, -3.0) * g * g / (h * h * h) * total;
}

}  // namespace

PacketValue v_n_brute(const ReflectionPhaseParams& p, const ReflectionOptions& opts) {
  PacketValue out;
  out.method = PacketMethod::kBrute;
  if (opts.sigma_s == SigmaSMethod::kClippedQuadrature) {
    out.value = brute_quadrature(p, opts, opts.clip);
    const cplx wide = brute_quadrature(p, opts, 1.5 * opts.clip);
    out.err_est = std::abs(wide - out.value);
    out.note = "sigma_s=clipped-quadrature; clip sensitivity " + format_double(out.err_est);
    return out;
  }
  std::vector<int> ns;
  const std::vector<BlockTerms> blocks{{p.block, {p.N}}};
  const auto r = reflection_components(p.model, p.t, {p.x}, p.y, blocks, opts, ns);
  const auto r2 = reflection_components(p.model, p.t, {p.x}, p.y, blocks, opts, ns, 2.0);
  out.value = r2.values[0];
  out.err_est = r.err[0] + std::abs(r2.values[0] - r.values[0]);
  out.note = "sigma_s=airy-closed-form";
  return out;
}

PacketValue v_n_free_block(const ModelParams& model, const SpectralBlock& block, double t,
                           double x, double y, const ReflectionOptions& opts);

PacketValue v_n_reduced(const ReflectionPhaseParams& p, const ReflectionOptions& opts) {
  detail::require_d2(p.model);
  if (p.N == 0) {
    PacketValue v = v_n_free_block(p.model, p.block, p.t, p.x, p.y[0], opts);
    v.method = PacketMethod::kReduced;
    return v;
  }
  const ModelParams& m = p.model;
  const double h = m.h, g = p.gamma(), lam = p.lambda_gamma();
  const double q11 = m.form.coeff(0, 0);
  const CutoffFamily& c = m.cutoffs;
  const double alpha_hi = std::min(2.0, p.block.support_hi() / g);
  const double R = opts.clip * std::sqrt(alpha_hi);
  const double shift = std::max(p.x, m.a) / g + alpha_hi;
  const double qh_max = std::sqrt(q11) * 1.5;
  const CompositeRule ax = rate_adapted_gauss(
      -R, R, [&](double z) { return lam * qh_max * (z * z + shift); },
      opts.reduced_radians_per_panel, 16, std::max(1, opts.reduced_nodes / 16));

  PacketValue out;
  out.method = PacketMethod::kReduced;
  out.note = "leading-order symbol";
  cplx acc{};
  int failures = 0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    // Warm starts follow the branch along each row; a cold start is the fallback.
    bool have_warm = false;
    SmallVec warm(2);
    for (std::size_t j = 0; j < ax.size(); ++j) {
      const double sigma = ax.x[i], s = ax.x[j];
      CriticalPoint cp = solve_crit_from(p, sigma, s, have_warm ? &warm : nullptr);
      if (!cp.converged && have_warm) cp = solve_crit_from(p, sigma, s, nullptr);
      have_warm = cp.converged;
      if (have_warm) warm << cp.alpha_c, cp.eta_c[0];
      if (cp.status == CritStatus::kNoCriticalPoint) continue;
      if (!cp.converged) {
        ++failures;
        continue;
      }
      const double rc = opts.clip * std::sqrt(cp.alpha_c);
      const double chi = c.phi(sigma / rc) * c.phi(s / rc);
      if (chi == 0.0) continue;
      const double e = cp.eta_c[0], ae = std::abs(e);
      const double q = q11 * e * e, q13 = std::cbrt(q);
      double sym = chi * q * c.psi(ae) * p.block.weight(c, g * cp.alpha_c);
      if (!opts.drop_psi1) sym *= c.psi1(ae * std::sqrt(1.0 + g * cp.alpha_c * q11));
      if (sym == 0.0) continue;
      const double w = q13 * std::pow(lam, 2.0 / 3.0) * cp.alpha_c;
      sym *= opts.floor(w);
      const cplx corr = std::polar(1.0, -p.N * (phase_L(w) - 4.0 / 3.0 * std::pow(w, 1.5)));
      const double ph = phi_N(p, cp.eta_c, cp.alpha_c, sigma, s) / h;
      acc += ax.w[i] * ax.w[j] * sym * corr * std::polar(1.0, ph + kPi * cp.signature / 4.0) /
             std::sqrt(std::abs(cp.hessian_det));
    }
  }
  if (failures > 0) {
    PacketValue b = v_n_brute(p, opts);
    b.note = "reduced solver failed at " + std::to_string(failures) + " nodes; brute fallback";
    return b;
  }
  out.value = std::pow(kTwoPi, -3.0) * g * g / (h * h * h) * kTwoPi * h * acc;
  // The leading-order symbol drops terms of relative size 1/(lambda_gamma N) and h/t.
  out.err_est = std::abs(out.value) * (1.0 / (lam * p.N) + h / p.t);
  return out;
}

namespace {

detail::EtaFieldResult free_block_field(const ModelParams& model, const SpectralBlock& block,
                                        double t, const std::vector<double>& xs,
                                        const std::vector<double>& ys,
                                        const ReflectionOptions& opts) {
  detail::require_d2(model);
  const double h = model.h, a = model.a;
  const double q11 = model.form.coeff(0, 0);
  const CutoffFamily& c = model.cutoffs;
  const double top = block.support_hi();
  const double bottom = block.is_bottom() ? 0.0 : block.support_lo();
  double x_hi = 0.0;
  for (double x : xs) x_hi = std::max(x_hi, x);

  auto profile = [&](std::size_t ix, std::span<const double> eta, std::span<cplx> out) {
    const double x = xs[ix];
    for (std::size_t je = 0; je < eta.size(); ++je) {
      const double e = eta[je];
      const double qh = std::sqrt(q11) * e;
      const double xi1 = t * qh / 2.0;
      const double room = top - xi1 * xi1 - 0.5 * (x + a);
      out[je] = 0.0;
      if (room <= 0.0) continue;
      const double xm = std::sqrt(room);
      const double rate = qh * (4.0 * xi1 * xm + std::abs(x - a)) / h;
      const int panels = std::max(
          8, static_cast<int>(std::ceil(rate * 2.0 * xm / opts.eta.radians_per_panel)));
      const CompositeRule xr = composite_gauss(-xm, xm, panels, opts.eta.order);
      cplx acc{};
      for (std::size_t i = 0; i < xr.size(); ++i) {
        const double xi2 = xr.x[i];
        const double al = xi1 * xi1 + xi2 * xi2 + 0.5 * (x + a);
        if (al < bottom) continue;
        double wgt = block.weight(c, al);
        if (!opts.drop_psi1) wgt *= c.psi1(e * std::sqrt(1.0 + al * q11));
        if (wgt == 0.0) continue;
        const double ph = qh * (2.0 / 3.0 * xi1 * xi1 * xi1 + 2.0 * xi1 * xi2 * xi2 +
                                xi1 * (x + a) + xi2 * (x - a)) / h;
        acc += xr.w[i] * wgt * std::polar(1.0, ph);
      }
      // (2 pi h) cancels the eta_field prefactor; (2 pi)^{-2} h^{-2} q^{1/2} remains.
      out[je] = kTwoPi * h * std::pow(kTwoPi, -2.0) / (h * h) * qh * acc;
    }
  };
  return detail::eta_field(xs, ys, t, h, c, profile,
                           std::sqrt(q11) * 1.5 * (t * t * q11 + 2.0 * top + x_hi + a) / h,
                           opts.eta);
}

}  // namespace

PacketValue v_n_free_block(const ModelParams& model, const SpectralBlock& block, double t,
                           double x, double y, const ReflectionOptions& opts) {
  const auto r = free_block_field(model, block, t, {x}, {y}, opts);
  PacketValue out;
  out.method = PacketMethod::kReduced;
  out.value = r.values[0];
  out.err_est = r.err[0] + std::abs(out.value) * model.h / t;
  out.note = "free flow, exact stationary phase in (xi1, alpha)";
  return out;
}

PacketValue v_0_free(const ModelParams& model, double t, double x, double y,
                     const ReflectionOptions& opts) {
  if (!(t > model.h)) throw Error(ErrorKind::kPrecondition, "free packet needs t > h");
  return v_n_free_block(model, SpectralBlock{model.eps0, 0.0}, t, x, y, opts);
}

GreenField green_field_free(const ModelParams& model, double t, const std::vector<double>& xs,
                            const std::vector<double>& ys, const ReflectionOptions& opts) {
  model.validate();
  if (!(t > model.h)) throw Error(ErrorKind::kPrecondition, "free packet needs t > h");
  if (xs.empty() || ys.empty()) throw Error(ErrorKind::kPrecondition, "empty grid");
  const auto r = free_block_field(model, SpectralBlock{model.eps0, 0.0}, t, xs, ys, opts);
  GreenField f;
  f.t = t;
  f.h = model.h;
  f.a = model.a;
  f.gamma_tag = "total";
  f.evaluator = "free";
  f.xs = xs;
  f.ys = ys;
  f.values = r.values;
  f.err = r.err;
  f.eta_nodes = r.nodes;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    f.err[k] += std::abs(f.values[k]) * model.h / t;
    f.err_max = std::max(f.err_max, f.err[k]);
  }
  f.tolerance = opts.eta.rel_tol;
  return f;
}

CsvTable ReflectionField::breakdown_csv(std::size_t ix, std::size_t iy) const {
  CsvTable table({"N", "re", "im", "abs", "method", "err_est"});
  const std::size_t k = ix * total.ys.size() + iy;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const cplx v = per_n[i][k];
    table.add_row({std::to_string(n_values[i]), format_double(v.real()), format_double(v.imag()),
                   format_double(std::abs(v)), "brute", format_double(total.err[k])});
  }
  return table;
}

namespace {

ReflectionField assemble_field(const ModelParams& model, double t, const std::vector<double>& xs,
                               const std::vector<double>& ys,
                               const std::vector<BlockTerms>& blocks,
                               const ReflectionOptions& opts) {
  ReflectionField f;
  const auto r = reflection_components(model, t, xs, ys, blocks, opts, f.n_values);
  const std::size_t plane = xs.size() * ys.size();
  f.per_n.resize(f.n_values.size());
  f.total.values.assign(plane, {});
  for (std::size_t i = 0; i < f.n_values.size(); ++i) {
    f.per_n[i].assign(r.values.begin() + static_cast<std::ptrdiff_t>(i * plane),
                      r.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * plane));
    for (std::size_t k = 0; k < plane; ++k) f.total.values[k] += f.per_n[i][k];
  }
  f.total.err.assign(plane, 0.0);
  for (std::size_t i = 0; i < f.n_values.size(); ++i) {
    for (std::size_t k = 0; k < plane; ++k) f.total.err[k] += r.err[i * plane + k];
  }
  f.total.t = t;
  f.total.h = model.h;
  f.total.a = model.a;
  f.total.gamma_tag = "total";
  f.total.evaluator = "reflection";
  f.total.xs = xs;
  f.total.ys = ys;
  f.total.eta_nodes = r.nodes;
  f.total.tolerance = opts.eta.rel_tol;
  for (double e : f.total.err) f.total.err_max = std::max(f.total.err_max, e);
  return f;
}

}  // namespace

ReflectionField packet_field(const ModelParams& model, const SpectralBlock& block, double t,
                             const std::vector<double>& xs, const std::vector<double>& ys,
                             const std::vector<int>& ns, const ReflectionOptions& opts) {
  model.validate();
  if (!(t > 0.0)) throw Error(ErrorKind::kPrecondition, "t must be > 0");
  if (ns.empty()) throw Error(ErrorKind::kPrecondition, "no reflection numbers given");
  ReflectionField f = assemble_field(model, t, xs, ys, {BlockTerms{block, ns}}, opts);
  f.total.gamma_tag = format_double(block.upper);
  return f;
}

ReflectionField green_field_reflection(const ModelParams& model, double t,
                                       const std::vector<double>& xs,
                                       const std::vector<double>& ys,
                                       const ReflectionSumOptions& opts) {
  model.validate();
  if (!(t > 0.0)) throw Error(ErrorKind::kPrecondition, "t must be > 0");
  std::vector<BlockTerms> blocks;
  for (const SpectralBlock& b : dyadic_ladder(model.gamma_min(), model.eps0)) {
    const NWindow w = n_window(t, b.upper, model.form, model.eps0, model.a);
    BlockTerms bt{b, {0}};
    if (!w.no_reflection) {
      for (int n = std::max(1, w.n_lo - opts.window_pad); n <= w.n_hi + opts.window_pad; ++n) {
        bt.ns.push_back(n);
      }
    } else {
      for (int n = 1; n <= opts.window_pad; ++n) bt.ns.push_back(n);
    }
    if (opts.include_negative) {
      const std::size_t positive = bt.ns.size();
      for (std::size_t i = 1; i < positive; ++i) bt.ns.push_back(-bt.ns[i]);
    }
    blocks.push_back(std::move(bt));
  }
  return assemble_field(model, t, xs, ys, blocks, opts.packet);
}

cplx g_reflection_total(const ModelParams& model, double t, double x, double y,
                        const ReflectionSumOptions& opts) {
  return green_field_reflection(model, t, {x}, {y}, opts).total.values[0];
}

}  // namespace friedlab
