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

#ifndef FRIEDLAB_QUADRATURE_HPP_
#define FRIEDLAB_QUADRATURE_HPP_

#include <cstddef>
#include <functional>
#include <vector>

namespace friedlab {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Returns a cached rule with n points (n >= 1). Thread safe.
const GaussRule& gauss_legendre(int n);

// Nodes and weights of a composite rule: `panels` equal panels on [lo, hi],
// each carrying an `order`-point Gauss-Legendre rule.
struct CompositeRule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

CompositeRule composite_gauss(double lo, double hi, int panels, int order);

// Composite rule whose panel widths follow a local phase rate (radians per
// unit length), so each panel spans about `radians_per_panel`. The rate is
// sampled at panel starts; it must be positive and should not jump.
CompositeRule rate_adapted_gauss(double lo, double hi, const std::function<double(double)>& rate,
                                 double radians_per_panel, int order, int min_panels = 1);

// Integrates f over [lo, hi] with a composite rule.
template <typename F>
auto integrate_composite(F&& f, double lo, double hi, int panels, int order) {
  const GaussRule& g = gauss_legendre(order);
  const double width = (hi - lo) / panels;
  decltype(f(lo)) acc{};
  for (int p = 0; p < panels; ++p) {
    const double c = lo + (p + 0.5) * width;
    for (int j = 0; j < order; ++j) {
      acc += (0.5 * width * g.weights[j]) * f(c + 0.5 * width * g.nodes[j]);
    }
  }
  return acc;
}

}  // namespace friedlab

#endif  // FRIEDLAB_QUADRATURE_HPP_
