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

#include "eta_integral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "friedlab/error.hpp"
#include "friedlab/parallel.hpp"
#include "friedlab/quadrature.hpp"

namespace friedlab::detail {

namespace {

EtaFieldResult eval_rule(const std::vector<double>& xs, const std::vector<double>& ys, double t,
                         double h, const CutoffFamily& cutoffs, const EtaProfile& profile,
                         int panels, int order, int ncomp) {
  const CompositeRule rule = composite_gauss(0.5, 1.5, panels, order);
  const std::size_t n = rule.size();
  std::vector<std::complex<double>> base(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double e = rule.x[j];
    base[j] = rule.w[j] * cutoffs.psi(e) * std::polar(1.0, t * e * e / h);
  }
  EtaFieldResult out;
  const std::size_t nc = static_cast<std::size_t>(ncomp);
  const std::size_t plane = xs.size() * ys.size();
  out.values.assign(nc * plane, {});
  out.nodes = static_cast<int>(2 * n);
  const double pref = 1.0 / (2.0 * std::numbers::pi * h);
  parallel_for(xs.size(), [&](std::size_t ix) {
    std::vector<std::complex<double>> s(n * nc);
    profile(ix, rule.x, s);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t c = 0; c < nc; ++c) s[j * nc + c] *= base[j];
    }
    std::vector<std::complex<double>> acc(nc);
    for (std::size_t iy = 0; iy < ys.size(); ++iy) {
      const double y = ys[iy];
      std::fill(acc.begin(), acc.end(), std::complex<double>{});
      for (std::size_t j = 0; j < n; ++j) {
        const double k = 2.0 * std::cos(y * rule.x[j] / h);
        for (std::size_t c = 0; c < nc; ++c) acc[c] += k * s[j * nc + c];
      }
      for (std::size_t c = 0; c < nc; ++c) out.values[c * plane + ix * ys.size() + iy] = pref * acc[c];
    }
  });
  return out;
}

}  // namespace

void require_d2(const ModelParams& params) {
  if (params.d != 2 || params.form.dim() != 1) {
    throw Error(ErrorKind::kConfig, "Green evaluators support d = 2 only");
  }
}

EtaFieldResult eta_field(const std::vector<double>& xs, const std::vector<double>& ys, double t,
                         double h, const CutoffFamily& cutoffs, const EtaProfile& profile,
                         double extra_rate, const EtaQuadrature& quad, int ncomp) {
  if (ncomp < 1) throw Error(ErrorKind::kPrecondition, "ncomp must be >= 1");
  if (xs.empty() || ys.empty()) throw Error(ErrorKind::kPrecondition, "empty grid");
  double ymax = 0.0;
  for (double y : ys) ymax = std::max(ymax, std::abs(y));
  const double rate = (ymax + 3.0 * std::abs(t)) / h + std::abs(extra_rate);
  int panels = std::max(4, static_cast<int>(std::ceil(rate / quad.radians_per_panel)));

  EtaFieldResult coarse = eval_rule(xs, ys, t, h, cutoffs, profile, panels, quad.order, ncomp);
  for (;;) {
    if (4L * panels * quad.order > quad.max_nodes) {
      std::ostringstream msg;
      msg << "eta quadrature needs more than " << quad.max_nodes
          << " nodes (phase variation ~" << rate << " rad over the eta support)";
      throw Error(ErrorKind::kUnresolvedOscillation, msg.str());
    }
    EtaFieldResult fine = eval_rule(xs, ys, t, h, cutoffs, profile, 2 * panels, quad.order, ncomp);
    double scale = 0.0;
    for (const auto& v : fine.values) scale = std::max(scale, std::abs(v));
    fine.err.resize(fine.values.size());
    bool ok = true;
    for (std::size_t i = 0; i < fine.values.size(); ++i) {
      fine.err[i] = std::abs(fine.values[i] - coarse.values[i]);
      if (fine.err[i] > quad.rel_tol * scale) ok = false;
    }
    if (ok) return fine;
    coarse = std::move(fine);
    panels *= 2;
  }
}

}  // namespace friedlab::detail
