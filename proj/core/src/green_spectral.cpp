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

#include "friedlab/green_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eta_integral.hpp"
#include "friedlab/airy.hpp"
#include "friedlab/error.hpp"
#include "json.hpp"

namespace friedlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Zero count guaranteed to pass omega (asymptotic inverse plus margin).
int zeros_past(double omega) {
  if (omega <= 0.0) return 1;
  return static_cast<int>(std::ceil(2.0 / (3.0 * std::numbers::pi) * std::pow(omega, 1.5) + 0.25)) + 4;
}

// Range of q(eta)^{1/3} over |eta| in [1/2, 3/2].
std::pair<double, double> q13_range(const QuadraticForm& form) {
  return {std::cbrt(0.25 * form.m0() * form.m0()), std::cbrt(2.25 * form.M0() * form.M0())};
}

}  // namespace

ModeWindow mode_window(const ModelParams& params, const SpectralBlock& block) {
  if (!(block.upper > 0.0)) throw Error(ErrorKind::kPrecondition, "block scale must be > 0");
  const auto [q13_lo, q13_hi] = q13_range(params.form);
  const double h23 = params.h23();
  const double w_lo = block.support_lo() * q13_lo / h23;
  const double w_hi = block.support_hi() * q13_hi / h23;
  ModeWindow win;
  win.gamma = block.upper;
  const AiryZeroTable z = airy_zeros(zeros_past(w_hi));
  int k = 1;
  while (k <= static_cast<int>(z.size()) && z.omega(k) <= w_lo) ++k;
  win.k_lo = k;
  while (k <= static_cast<int>(z.size()) && z.omega(k) < w_hi) ++k;
  win.k_hi = k - 1;
  return win;
}

ModeWindow mode_window(const ModelParams& params, double gamma) {
  if (!(gamma > 0.0) || gamma > params.eps0 * (1.0 + 1e-12)) {
    throw Error(ErrorKind::kPrecondition, "gamma must lie in (0, eps0]");
  }
  return mode_window(params, SpectralBlock{gamma, 0.5 * gamma});
}

BlockSelection BlockSelection::total(const ModelParams& params) {
  return {SpectralBlock{params.eps0, 0.0}, "total"};
}

BlockSelection BlockSelection::psi2(double gamma) {
  return {SpectralBlock{gamma, 0.5 * gamma}, format_double(gamma)};
}

BlockSelection BlockSelection::of(const SpectralBlock& block) {
  return {block, block.is_bottom() ? "bottom:" + format_double(block.upper)
                                   : format_double(block.upper)};
}

CsvTable GreenField::to_csv() const {
  CsvTable table({"t", "x", "y", "re", "im", "abs", "err_est"});
  for (std::size_t ix = 0; ix < xs.size(); ++ix) {
    for (std::size_t iy = 0; iy < ys.size(); ++iy) {
      const cplx v = at(ix, iy);
      table.add_numeric_row({t, xs[ix], ys[iy], v.real(), v.imag(), std::abs(v),
                             err[ix * ys.size() + iy]});
    }
  }
  return table;
}

GreenField green_field_spectral(const ModelParams& params, double t, const std::vector<double>& xs,
                                const std::vector<double>& ys, const BlockSelection& sel,
                                const GreenOptions& opts) {
  detail::require_d2(params);
  params.validate();
  if (!(t > 0.0) || t > params.t0) throw Error(ErrorKind::kPrecondition, "t must lie in (0, T0]");
  for (double x : xs) {
    if (x < 0.0) throw Error(ErrorKind::kDomain, "x must be >= 0");
  }

  ModeWindow win = mode_window(params, sel.block);
  win.k_lo = std::max(1, win.k_lo - opts.window_pad);
  win.k_hi += opts.window_pad;

  GreenField field;
  field.t = t;
  field.h = params.h;
  field.a = params.a;
  field.gamma_tag = sel.tag;
  field.evaluator = "spectral";
  field.xs = xs;
  field.ys = ys;
  field.tolerance = opts.eta.rel_tol;
  if (win.empty()) {
    field.values.assign(xs.size() * ys.size(), {});
    field.err.assign(xs.size() * ys.size(), 0.0);
    return field;
  }

  const AiryZeroTable z = airy_zeros(win.k_hi);
  const double h = params.h;
  const double h23 = params.h23();
  const double a = params.a;
  const double q11 = params.form.coeff(0, 0);
  const CutoffFamily& c = params.cutoffs;
  const SpectralBlock block = sel.block;

  auto profile = [&](std::size_t ix, std::span<const double> eta, std::span<cplx> out) {
    const double x = xs[ix];
    for (std::size_t j = 0; j < eta.size(); ++j) {
      const double e = eta[j];
      const double q13 = std::cbrt(q11 * e * e);
      const double q23 = q13 * q13;
      cplx acc{};
      for (int k = win.k_lo; k <= win.k_hi; ++k) {
        const double w = z.omega(k);
        double weight = block.weight(c, h23 * w / q13);
        if (weight == 0.0) continue;
        if (!opts.drop_psi1) weight *= c.psi1(std::sqrt(e * e + h23 * w * q23));
        if (weight == 0.0) continue;
        const double amp = weight * kTwoPi / z.lprime(k) * q13 / h23 * ai(x * q13 / h23 - w) *
                           ai(a * q13 / h23 - w);
        acc += amp * std::polar(1.0, t * h23 * w * q23 / h);
      }
      out[j] = acc;
    }
  };

  const double w_max = z.omega(win.k_hi);
  double xmax = 0.0;
  for (double x : xs) xmax = std::max(xmax, x);
  const double q23_max = std::cbrt(q11 * q11 * 2.25 * 2.25);
  const double rate = (4.0 / 3.0) * t * h23 * w_max * q23_max / 1.5 / h +
                      std::sqrt(w_max) * (xmax + a) * std::cbrt(q11 * 2.0) / h23;
  auto res = detail::eta_field(xs, ys, t, h, c, profile, rate, opts.eta);
  field.values = std::move(res.values);
  field.err = std::move(res.err);
  field.eta_nodes = res.nodes;
  for (double e : field.err) field.err_max = std::max(field.err_max, e);
  return field;
}

namespace {

GreenValue single_point(const ModelParams& params, double t, double x, double y,
                        const BlockSelection& sel, const GreenOptions& opts) {
  const GreenField f = green_field_spectral(params, t, {x}, {y}, sel, opts);
  return {f.values[0], f.err[0], f.eta_nodes};
}

}  // namespace

GreenValue g_gamma_spectral(const ModelParams& params, double t, double x, double y, double gamma,
                            const GreenOptions& opts) {
  if (gamma > params.eps0 * (1.0 + 1e-12)) {
    throw Error(ErrorKind::kPrecondition, "gamma must not exceed eps0");
  }
  return single_point(params, t, x, y, BlockSelection::psi2(gamma), opts);
}

GreenValue g_block_spectral(const ModelParams& params, double t, double x, double y,
                            const SpectralBlock& block, const GreenOptions& opts) {
  return single_point(params, t, x, y, BlockSelection::of(block), opts);
}

GreenValue g_total_spectral(const ModelParams& params, double t, double x, double y,
                            const GreenOptions& opts) {
  return single_point(params, t, x, y, BlockSelection::total(params), opts);
}

std::vector<ArtifactRecord> write_green_field(const GreenField& field, const ModelParams& params,
                                              const std::filesystem::path& dir,
                                              const std::string& stem) {
  std::vector<ArtifactRecord> out;
  out.push_back(write_artifact(dir, stem + ".csv", field.to_csv().str()));
  nlohmann::ordered_json j;
  j["kind"] = "green_field";
  j["evaluator"] = field.evaluator;
  j["gamma"] = field.gamma_tag;
  j["params"] = {{"t", field.t}, {"h", field.h}, {"a", field.a}, {"eps0", params.eps0},
                 {"d", params.d}, {"q", params.form.coeffs()}};
  j["grid"] = {{"nx", field.xs.size()}, {"ny", field.ys.size()}};
  j["budget"] = {{"rel_tol", field.tolerance}, {"eta_nodes", field.eta_nodes}};
  j["err_max"] = field.err_max;
  j["content"] = {{"file", out[0].name}, {"sha256", out[0].sha256}, {"bytes", out[0].bytes}};
  out.push_back(write_artifact(dir, stem + ".manifest.json", j.dump(2) + "\n"));
  return out;
}

}  // namespace friedlab
