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

#include "friedlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "friedlab/error.hpp"

namespace friedlab {
namespace {

GaussRule build_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n == 1) {
    r.nodes[0] = 0.0;
    r.weights[0] = 2.0;
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::kDomain, "gauss_legendre needs n >= 1");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

CompositeRule composite_gauss(double lo, double hi, int panels, int order) {
  if (panels < 1) throw Error(ErrorKind::kDomain, "composite_gauss needs panels >= 1");
  const GaussRule& g = gauss_legendre(order);
  CompositeRule out;
  out.x.reserve(static_cast<std::size_t>(panels) * order);
  out.w.reserve(static_cast<std::size_t>(panels) * order);
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = lo + (p + 0.5) * width;
    for (int j = 0; j < order; ++j) {
      out.x.push_back(c + 0.5 * width * g.nodes[j]);
      out.w.push_back(0.5 * width * g.weights[j]);
    }
  }
  return out;
}

CompositeRule rate_adapted_gauss(double lo, double hi, const std::function<double(double)>& rate,
                                 double radians_per_panel, int order, int min_panels) {
  if (!(hi > lo)) throw Error(ErrorKind::kDomain, "rate_adapted_gauss needs hi > lo");
  const double max_width = (hi - lo) / std::max(1, min_panels);
  std::vector<double> edges{lo};
  while (edges.back() < hi) {
    const double x = edges.back();
    const double r = rate(x);
    double width = r > 0.0 ? radians_per_panel / r : max_width;
    width = std::min(width, max_width);
    // Look ahead once so a rising rate does not overshoot the panel.
    const double r2 = rate(std::min(hi, x + width));
    if (r2 > r) width = std::min(width, radians_per_panel / r2);
    edges.push_back(std::min(hi, x + width));
  }
  const GaussRule& g = gauss_legendre(order);
  CompositeRule out;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double c = 0.5 * (edges[p] + edges[p + 1]);
    const double hw = 0.5 * (edges[p + 1] - edges[p]);
    for (int j = 0; j < order; ++j) {
      out.x.push_back(c + hw * g.nodes[j]);
      out.w.push_back(hw * g.weights[j]);
    }
  }
  return out;
}

}  // namespace friedlab
