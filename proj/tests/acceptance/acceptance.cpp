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


// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// below; the exit code is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "friedlab/airy.hpp"
#include "friedlab/dispersion.hpp"
#include "friedlab/error.hpp"
#include "friedlab/green_reflection.hpp"
#include "friedlab/green_spectral.hpp"
#include "friedlab/nls.hpp"

namespace {

using namespace friedlab;

// Criterion 1
constexpr int kZeroCount = 50;
constexpr double kAiZeroTol = 1e-12;
constexpr double kPhaseZeroTol = 1e-9;
constexpr double kPhaseOriginTol = 1e-12;
constexpr double kLPrimeTol = 1e-8;
// Criterion 2
constexpr double kPoissonTol = 1e-6;
constexpr double kPoissonHalving = 0.5;
// Criterion 3
constexpr double kCrossTol = 0.02;
// Criteria 4, 5
constexpr double kFreeExponentTol = 0.05;
constexpr double kSaturationExponentTol = 0.05;
constexpr double kSaturationAExponentTol = 0.07;
// Criteria 6, 7
constexpr double kSpreadLimit = 10.0;
// Criterion 8
constexpr double kAirySumTol = 0.05;
// Criterion 9
constexpr double kGalleryMinLoss = 1.0 / 6.0 - 0.05;
constexpr double kMaxLoss = 0.25 + 0.05;
constexpr double kFreeLossTol = 0.05;
// Criterion 10
constexpr double kMassTolPer1e4 = 1e-10;
constexpr double kEnergyTol = 1e-4;
constexpr double kEnergyOrderTol = 0.2;  // on log10 of the drift ratio for dt / 10
constexpr double kStrangOrderTol = 0.1;
constexpr double kTraceTol = 1e-10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ModelParams desk(double h, double a) {
  ModelParams p;
  p.h = h;
  p.a = a;
  p.eps0 = 0.45;
  p.form = QuadraticForm::identity(1);
  return p;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return v;
}

Outcome airy_identities() {
  const AiryZeroTable table = airy_zeros(kZeroCount);
  double zero = 0.0, phase = 0.0, lp = 0.0;
  for (int k = 1; k <= kZeroCount; ++k) {
    const double w = table.omega(k);
    zero = std::max(zero, std::abs(ai(-w)));
    phase = std::max(phase, std::abs(phase_L(w) - 2.0 * std::numbers::pi * k));
    const double closed = phase_L_derivative(w);
    lp = std::max(lp, std::abs(table.lprime(k) - closed) / closed);
  }
  const double origin = std::abs(phase_L(0.0) - std::numbers::pi / 3.0);
  return {zero < kAiZeroTol && phase < kPhaseZeroTol && origin < kPhaseOriginTol &&
              lp < kLPrimeTol,
          "max|Ai(-w_k)|=" + fmt("%.2e", zero) + " max|L(w_k)-2pi k|=" + fmt("%.2e", phase) +
              " |L(0)-pi/3|=" + fmt("%.2e", origin) + " L' rel gap=" + fmt("%.2e", lp)};
}

Outcome poisson_identity() {
  const auto checks = poisson_sum_sweep(bump(airy_zero(1), 0.25), {25, 50, 100, 200});
  bool halves = true;
  std::string gaps;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    gaps += (i ? "," : "") + fmt("%.2e", checks[i].gap);
    if (i > 0 && checks[i].gap > kPoissonHalving * checks[i - 1].gap) halves = false;
  }
  return {checks.back().gap < kPoissonTol && halves,
          "gaps(n_max=25,50,100,200)=" + gaps};
}

Outcome representation_equivalence() {
  const ModelParams m = desk(0.05, 0.25);
  const std::vector<double> xs = linspace(0.05, 0.25, 5), ys = linspace(-0.6, -1.8, 5);
  const GreenField s = green_field_spectral(m, 0.6, xs, ys, BlockSelection::total(m));
  const ReflectionField r = green_field_reflection(m, 0.6, xs, ys);
  double diff = 0.0, peak = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    diff = std::max(diff, std::abs(s.values[k] - r.total.values[k]));
    peak = std::max(peak, std::abs(s.values[k]));
  }
  return {diff < kCrossTol * peak, "max gap / max|G| = " + fmt("%.4f", diff / peak)};
}

Outcome free_decay() {
  SweepSpec s;
  s.params = desk(2e-4, 0.05);
  s.xs = {0.05};
  s.n_y = 176;
  s.t_list = logspace(0.02, 0.2, 9);
  const BoundReport r = verify_free_decay(s, kFreeExponentTol);
  return {r.pass(), "exponent=" + fmt("%.4f", r.fit.at("exponent")) + " (target -1) r2=" +
                        fmt("%.5f", r.fit.at("r_squared"))};
}

Outcome saturation() {
  SaturationSpec s;
  s.sweep.params = desk(0.02, 0.3);
  s.sweep.t_list = linspace(0.55, 0.95, 9);
  s.t_fixed = 0.75;
  s.exponent_tol = kSaturationExponentTol;
  s.a_exponent_tol = kSaturationAExponentTol;
  const BoundReport r = verify_saturation(s);
  std::ostringstream d;
  for (const auto& [k, v] : r.fit) d << k << "=" << fmt("%.4g", v) << " ";
  return {r.pass(), d.str()};
}

Outcome upper_bound() {
  struct Sweep {
    const char* name;
    double a;
    std::vector<double> t;
  };
  const double h = 0.05;
  const std::vector<Sweep> sweeps{{"tangential", 0.25, linspace(0.5, 0.9, 9)},
                                  {"gallery", std::cbrt(h * h), linspace(0.2, 0.9, 8)},
                                  {"transverse", 0.03, linspace(0.1, 0.9, 9)}};
  bool pass = true;
  std::string d;
  for (const auto& w : sweeps) {
    SweepSpec s;
    s.params = desk(h, w.a);
    s.regime = w.name;
    s.t_list = w.t;
    const BoundReport r = verify_dispersion_upper(s, kSpreadLimit);
    pass = pass && r.pass();
    d += std::string(w.name) + " spread=" + fmt("%.2f", r.fit.at("spread")) + " ";
  }
  return {pass, d};
}

Outcome packet_bounds() {
  PacketBoundSpec s;
  s.params = desk(0.01, 0.25);
  s.n_list = {1, 2, 3, 4};
  s.n_y = 60;
  s.spread_limit = kSpreadLimit;
  bool pass = true;
  std::string d;
  for (const auto& r : verify_packet_bounds(s)) {
    pass = pass && r.pass();
    d += r.claim + "=" + fmt("%.2f", ratio_spread(r.ratios)) + " ";
  }
  return {pass, "spreads: " + d};
}

Outcome airy_sums() {
  AiryScanSpec s;
  s.tol = kAirySumTol;
  const BoundReport r = airy_sum_scan(s);
  return {r.pass(), "exponent(Ai^2)=" + fmt("%.4f", r.fit.at("exponent_ai")) +
                        " exponent(Ai'^2)=" + fmt("%.4f", r.fit.at("exponent_ai_prime"))};
}

Outcome strichartz() {
  double loss[3];
  const StrichartzFamily fams[3] = {StrichartzFamily::kGallery, StrichartzFamily::kFreeLike,
                                    StrichartzFamily::kRandom};
  for (int i = 0; i < 3; ++i) {
    StrichartzSpec s;
    s.family = fams[i];
    loss[i] = strichartz_probe(s).loss;
  }
  const double worst = *std::max_element(loss, loss + 3);
  return {loss[0] >= kGalleryMinLoss && worst <= kMaxLoss && std::abs(loss[1]) <= kFreeLossTol,
          "loss gallery=" + fmt("%.4f", loss[0]) + " (need >= " + fmt("%.4f", kGalleryMinLoss) +
              ") free-like=" + fmt("%.4f", loss[1]) + " random=" + fmt("%.4f", loss[2])};
}

double coeff_distance(const SpectralState& a, const SpectralState& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) acc += std::norm(a.coeffs[i] - b.coeffs[i]);
  return std::sqrt(acc);
}

Outcome nls_solver() {
  const SpectralTransform tr(PeriodizedDomain{});
  const SpectralState s0 = gallery_state(tr, 1, 3.0, 1.5, 1.0);

  // Ten time units at dt = 1e-3: mass, trace and the H^2 envelope.
  SpectralState s = s0;
  EvolveOptions eo;
  eo.observe_every = 0.05;
  const ObservableSeries series = evolve(tr, s, 10.0, 1e-3, 1, eo);
  double mass_drift = 0.0, trace = 0.0;
  for (const auto& o : series.samples) {
    mass_drift = std::max(mass_drift, std::abs(o.mass - series.samples.front().mass));
    trace = std::max(trace, o.trace);
  }
  const GrowthReport growth = growth_report(series, 2);

  const double e0 = energy(tr, s0, 1);
  auto energy_drift = [&](double dt) {
    SpectralState w = s0;
    double worst = 0.0;
    for (const auto& o : evolve(tr, w, 1.0, dt, 1, eo).samples) {
      worst = std::max(worst, std::abs(o.energy - e0) / std::abs(e0));
    }
    return worst;
  };
  const double d3 = energy_drift(1e-3), d4 = energy_drift(1e-4);
  const double energy_order = std::log10(d3 / d4);

  const SpectralState r0 = random_band_state(tr, 8, 0, 3, 1.0);
  auto run = [&](double dt) {
    SpectralState w = r0;
    const long steps = std::lround(0.5 / dt);
    for (long n = 0; n < steps; ++n) strang_step(tr, w, dt, 1);
    return w;
  };
  const SpectralState ref = run(0.01 / 8), a = run(0.01), b = run(0.005);
  const double order = std::log2(coeff_distance(a, ref) / coeff_distance(b, ref));

  const bool pass = mass_drift < kMassTolPer1e4 && d3 < kEnergyTol &&
                    std::abs(energy_order - 2.0) <= kEnergyOrderTol &&
                    std::abs(order - 2.0) <= kStrangOrderTol && trace < kTraceTol && growth.pass;
  return {pass, "mass drift/1e4 steps=" + fmt("%.2e", mass_drift) + " energy drift(1e-3)=" +
                    fmt("%.2e", d3) + " energy order=" + fmt("%.2f", energy_order) +
                    " strang order=" + fmt("%.3f", order) + " trace=" + fmt("%.1e", trace) +
                    " H2 rate=" + fmt("%.2e", growth.envelope_rate) +
                    " excess=" + fmt("%.2e", growth.max_excess)};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "airy-identities", airy_identities},
    {2, "airy-poisson", poisson_identity},
    {3, "representation-equivalence", representation_equivalence},
    {4, "free-decay", free_decay},
    {5, "saturation", saturation},
    {6, "upper-bound", upper_bound},
    {7, "packet-bounds", packet_bounds},
    {8, "airy-sums", airy_sums},
    {9, "strichartz", strichartz},
    {10, "nls-solver", nls_solver},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"friedlab acceptance suite"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  std::setvbuf(stdout, nullptr, _IOLBF, 0);

  int passed = 0, run = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    ++run;
    passed += o.pass;
  }
  std::printf("acceptance: %d/%d criteria pass\n", passed, run);
  return passed == run ? 0 : 1;
}
