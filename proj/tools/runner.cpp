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


#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "friedlab/airy.hpp"
#include "friedlab/artifact.hpp"
#include "friedlab/dispersion.hpp"
#include "friedlab/error.hpp"
#include "friedlab/green_reflection.hpp"
#include "friedlab/green_spectral.hpp"
#include "friedlab/model.hpp"
#include "friedlab/nls.hpp"
#include "friedlab/parallel.hpp"
#include "json.hpp"

#ifndef FRIEDLAB_VERSION
#define FRIEDLAB_VERSION "unknown"
#endif
#ifndef FRIEDLAB_GIT_REVISION
#define FRIEDLAB_GIT_REVISION "unknown"
#endif

namespace friedlab::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

Error config_error(const std::string& path, const std::string& what) {
  return Error(ErrorKind::kConfig, path + ": " + what);
}

// Typed access to one JSON object. Every read records the resolved value
// (defaults included); finish() rejects keys that were never read.
class Params {
 public:
  Params(const ojson& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw config_error(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double num(const std::string& key, std::optional<double> def = std::nullopt) {
    const ojson* v = find(key, def.has_value());
    double out = def.value_or(0.0);
    if (v) {
      if (!v->is_number()) throw config_error(where(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw config_error(where(key), "must be finite");
    }
    resolved_[key] = out;
    return out;
  }

  int integer(const std::string& key, std::optional<int> def = std::nullopt) {
    const ojson* v = find(key, def.has_value());
    int out = def.value_or(0);
    if (v) {
      if (!v->is_number_integer()) throw config_error(where(key), "expected an integer");
      out = v->get<int>();
    }
    resolved_[key] = out;
    return out;
  }

  bool flag(const std::string& key, bool def) {
    const ojson* v = find(key, true);
    bool out = def;
    if (v) {
      if (!v->is_boolean()) throw config_error(where(key), "expected true or false");
      out = v->get<bool>();
    }
    resolved_[key] = out;
    return out;
  }

  std::string str(const std::string& key, std::optional<std::string> def,
                  const std::vector<std::string>& choices = {}) {
    const ojson* v = find(key, def.has_value());
    std::string out = def.value_or("");
    if (v) {
      if (!v->is_string()) throw config_error(where(key), "expected a string");
      out = v->get<std::string>();
    }
    if (!choices.empty() && std::find(choices.begin(), choices.end(), out) == choices.end()) {
      std::string list;
      for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
      throw config_error(where(key), "'" + out + "' is not one of " + list);
    }
    resolved_[key] = out;
    return out;
  }

  std::vector<double> nums(const std::string& key,
                           std::optional<std::vector<double>> def = std::nullopt) {
    const ojson* v = find(key, def.has_value());
    std::vector<double> out = def.value_or(std::vector<double>{});
    if (v) {
      if (!v->is_array()) throw config_error(where(key), "expected an array of numbers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) {
          throw config_error(where(key) + "[" + std::to_string(i) + "]", "expected a number");
        }
        out.push_back((*v)[i].get<double>());
      }
    }
    resolved_[key] = out;
    return out;
  }

  std::vector<int> ints(const std::string& key, std::optional<std::vector<int>> def = std::nullopt) {
    const ojson* v = find(key, def.has_value());
    std::vector<int> out = def.value_or(std::vector<int>{});
    if (v) {
      if (!v->is_array()) throw config_error(where(key), "expected an array of integers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number_integer()) {
          throw config_error(where(key) + "[" + std::to_string(i) + "]", "expected an integer");
        }
        out.push_back((*v)[i].get<int>());
      }
    }
    resolved_[key] = out;
    return out;
  }

  std::vector<std::string> strs(const std::string& key, std::vector<std::string> def,
                                const std::vector<std::string>& choices) {
    const ojson* v = find(key, true);
    std::vector<std::string> out = std::move(def);
    if (v) {
      if (!v->is_array()) throw config_error(where(key), "expected an array of strings");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string at = where(key) + "[" + std::to_string(i) + "]";
        if (!(*v)[i].is_string()) throw config_error(at, "expected a string");
        out.push_back((*v)[i].get<std::string>());
        if (std::find(choices.begin(), choices.end(), out.back()) == choices.end()) {
          throw config_error(at, "unknown value '" + out.back() + "'");
        }
      }
    }
    resolved_[key] = out;
    return out;
  }

  // Nested object; an absent key reads as {}. Call adopt() when done.
  Params child(const std::string& key) {
    seen_.insert(key);
    static const ojson kEmpty = ojson::object();
    return Params(j_.contains(key) ? j_.at(key) : kEmpty, where(key));
  }

  void adopt(const std::string& key, Params& c) {
    c.finish();
    resolved_[key] = c.resolved();
  }

  // Stores a value verbatim (already validated elsewhere).
  void raw(const std::string& key) {
    seen_.insert(key);
    if (j_.contains(key)) resolved_[key] = j_.at(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw config_error(where(it.key()), "unknown key");
    }
  }

  const ojson& resolved() const { return resolved_; }
  std::string where(const std::string& key) const { return path_ + "." + key; }

 private:
  const ojson* find(const std::string& key, bool optional) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (!optional) throw config_error(where(key), "required field missing");
      return nullptr;
    }
    return &j_.at(key);
  }

  const ojson& j_;
  std::string path_;
  std::set<std::string> seen_;
  ojson resolved_ = ojson::object();
};

struct Verdict {
  std::string claim;
  std::string verdict;  // PASS, FAIL, OUTSIDE-WINDOW
  std::string detail;
};

struct Context {
  fs::path out;
  bool verbose = false;
  std::uint64_t seed = 1;
  std::vector<ArtifactRecord> artifacts;
  std::vector<Verdict> verdicts;
  ojson tolerances = ojson::object();

  void add(const std::string& name, const std::string& content) {
    artifacts.push_back(write_artifact(out, name, content));
    if (verbose) std::cerr << "wrote " << (out / name).string() << "\n";
  }
  void add_existing(const std::string& name) {
    const fs::path p = out / name;
    artifacts.push_back({name, sha256_file(p), fs::file_size(p)});
  }
  void verdict(const std::string& claim, bool pass, const std::string& detail) {
    verdicts.push_back({claim, pass ? "PASS" : "FAIL", detail});
  }
  void report(const BoundReport& r) {
    add(r.claim + ".csv", r.to_csv().str());
    add(r.claim + ".json", r.to_json());
    std::ostringstream d;
    d << "regime=" << r.regime;
    for (const auto& [k, v] : r.fit) d << " " << k << "=" << format_double(v);
    verdicts.push_back({r.claim, r.verdict, d.str()});
  }
};

using Job = std::function<void(Context&)>;

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return v;
}

ModelParams model_params(Params& p) {
  ModelParams m;
  m.h = p.num("h");
  m.a = p.num("a", 0.0);
  m.eps0 = p.num("eps0", 0.45);
  m.t0 = p.num("t0", 1.0);
  m.form = QuadraticForm::identity(1);
  if (p.has("geometry")) {
    p.raw("geometry");
    ojson g = p.resolved().at("geometry");
    if (g.contains("eps0")) throw config_error(p.where("geometry.eps0"), "set eps0 in params");
    m = geometry_from_json(g.dump(), m);
  }
  try {
    m.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, std::string("params: ") + e.what());
  }
  return m;
}

EtaQuadrature eta_quadrature(Params& p) {
  EtaQuadrature q{1e-8, 1 << 18, 16, 12.0};
  q.rel_tol = p.num("eta_rel_tol", q.rel_tol);
  q.max_nodes = p.integer("eta_max_nodes", q.max_nodes);
  return q;
}

// ---- airy-check ---------------------------------------------------------

Job plan_airy_check(Params& p) {
  const int k_max = p.integer("k_max", 50);
  const double tol_zero = p.num("tol_zero", 1e-12);
  const double tol_phase = p.num("tol_phase", 1e-9);
  const double tol_origin = p.num("tol_origin", 1e-12);
  const double tol_lprime = p.num("tol_lprime", 1e-8);
  if (k_max < 1) throw config_error(p.where("k_max"), "must be >= 1");
  return [=](Context& ctx) {
    ctx.tolerances = {{"zero", tol_zero}, {"phase", tol_phase}, {"origin", tol_origin},
                      {"lprime", tol_lprime}};
    const AiryZeroTable table = airy_zeros(k_max);
    CsvTable csv({"k", "omega", "lprime_quadrature", "lprime_closed", "ai_residual",
                  "phase_residual"});
    double zero = 0.0, phase = 0.0, lp = 0.0;
    for (int k = 1; k <= k_max; ++k) {
      const double w = table.omega(k);
      const double ai_res = std::abs(ai(-w));
      const double ph_res = std::abs(phase_L(w) - 2.0 * std::numbers::pi * k);
      const double closed = phase_L_derivative(w);
      zero = std::max(zero, ai_res);
      phase = std::max(phase, ph_res);
      lp = std::max(lp, std::abs(table.lprime(k) - closed) / closed);
      csv.add_row({std::to_string(k), format_double(w), format_double(table.lprime(k)),
                   format_double(closed), format_double(ai_res), format_double(ph_res)});
    }
    ctx.add("airy_zeros.csv", csv.str());
    const double origin = std::abs(phase_L(0.0) - std::numbers::pi / 3.0);
    ctx.verdict("airy-zeros", zero < tol_zero, "max|Ai(-omega_k)|=" + sci(zero));
    ctx.verdict("phase-zeros", phase < tol_phase, "max|L(omega_k)-2pi k|=" + sci(phase));
    ctx.verdict("phase-origin", origin < tol_origin, "|L(0)-pi/3|=" + sci(origin));
    ctx.verdict("lprime-closed-form", lp < tol_lprime, "max rel gap=" + sci(lp));
  };
}

// ---- poisson-check ------------------------------------------------------

Job plan_poisson_check(Params& p) {
  const double center = p.num("center", airy_zero(1));
  const double half_width = p.num("half_width", 0.25);
  const std::vector<int> n_max = p.ints("n_max", std::vector<int>{25, 50, 100, 200});
  const double tol = p.num("tol", 1e-6);
  const double halving = p.num("halving_factor", 0.5);
  if (half_width <= 0.0) throw config_error(p.where("half_width"), "must be positive");
  if (n_max.empty()) throw config_error(p.where("n_max"), "must not be empty");
  for (std::size_t i = 0; i < n_max.size(); ++i) {
    if (n_max[i] < 1 || (i > 0 && n_max[i] <= n_max[i - 1])) {
      throw config_error(p.where("n_max"), "must be positive and increasing");
    }
  }
  return [=](Context& ctx) {
    ctx.tolerances = {{"gap", tol}, {"halving_factor", halving}};
    const auto checks = poisson_sum_sweep(bump(center, half_width), n_max);
    CsvTable csv({"n_max", "lhs_re", "lhs_im", "rhs", "gap", "quadrature_err"});
    bool halves = true;
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& c = checks[i];
      csv.add_row({std::to_string(n_max[i]), format_double(c.lhs_re), format_double(c.lhs_im),
                   format_double(c.rhs), format_double(c.gap), format_double(c.quadrature_err)});
      if (i > 0 && c.gap > halving * checks[i - 1].gap) halves = false;
    }
    ctx.add("poisson.csv", csv.str());
    ctx.verdict("poisson-gap", checks.back().gap < tol,
                "gap(n_max=" + std::to_string(n_max.back()) + ")=" + sci(checks.back().gap));
    ctx.verdict("poisson-convergence", halves, "gap shrinks by " + format_double(halving) +
                                                   " per refinement: " + (halves ? "yes" : "no"));
  };
}

// ---- green-eval ---------------------------------------------------------

Job plan_green_eval(Params& p) {
  const ModelParams m = model_params(p);
  const double t = p.num("t");
  const std::string ev = p.str("evaluator", "spectral", {"spectral", "reflection", "free"});
  const double gamma = p.num("gamma", 0.0);
  const double a_or_one = m.a > 0.0 ? m.a : 1.0;
  const std::vector<double> xs = p.nums("xs", linspace(a_or_one / 5.0, a_or_one, 5));
  const std::vector<double> ys = p.nums("ys", linspace(-0.5 * t, -3.0 * t, 6));
  GreenOptions go;
  go.eta = eta_quadrature(p);
  if (xs.empty() || ys.empty()) throw config_error(p.where("xs"), "grid must be nonempty");
  if (gamma != 0.0 && ev != "spectral") {
    throw config_error(p.where("gamma"), "single blocks are only available for 'spectral'");
  }
  return [=](Context& ctx) {
    ctx.tolerances = {{"eta_rel_tol", go.eta.rel_tol}};
    GreenField f;
    if (ev == "spectral") {
      f = green_field_spectral(m, t, xs, ys,
                               gamma == 0.0 ? BlockSelection::total(m) : BlockSelection::psi2(gamma),
                               go);
    } else {
      ReflectionOptions ro;
      ro.eta = go.eta;
      f = ev == "free" ? green_field_free(m, t, xs, ys, ro)
                       : green_field_reflection(m, t, xs, ys, {ro, 0, true}).total;
    }
    for (auto& r : write_green_field(f, m, ctx.out, "green_" + ev)) {
      ctx.artifacts.push_back(r);
    }
    double peak = 0.0;
    for (const auto& v : f.values) peak = std::max(peak, std::abs(v));
    const bool ok = f.err_max <= f.tolerance * std::max(peak, 1e-300);
    ctx.verdict("quadrature-converged", ok,
                "err_max=" + sci(f.err_max) + " peak=" + sci(peak) + " nodes=" +
                    std::to_string(f.eta_nodes));
  };
}

// ---- cross-validate -----------------------------------------------------

Job plan_cross_validate(Params& p) {
  const ModelParams m = model_params(p);
  const double t = p.num("t");
  const std::vector<double> xs = p.nums("xs", linspace(m.a / 5.0, m.a, 5));
  const std::vector<double> ys = p.nums("ys", linspace(-t, -3.0 * t, 5));
  const double tol = p.num("tol", 0.02);
  const int pad = p.integer("window_pad", 0);
  if (m.a <= 0.0) throw config_error(p.where("a"), "must be positive");
  return [=](Context& ctx) {
    ctx.tolerances = {{"relative_gap", tol}};
    const GreenField s = green_field_spectral(m, t, xs, ys, BlockSelection::total(m));
    ReflectionSumOptions ro;
    ro.window_pad = pad;
    const ReflectionField r = green_field_reflection(m, t, xs, ys, ro);
    CsvTable csv({"x", "y", "spectral_re", "spectral_im", "reflection_re", "reflection_im",
                  "abs_diff"});
    double diff = 0.0, peak = 0.0;
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      for (std::size_t iy = 0; iy < ys.size(); ++iy) {
        const cplx a = s.at(ix, iy), b = r.total.at(ix, iy);
        diff = std::max(diff, std::abs(a - b));
        peak = std::max(peak, std::abs(a));
        csv.add_numeric_row({xs[ix], ys[iy], a.real(), a.imag(), b.real(), b.imag(),
                             std::abs(a - b)});
      }
    }
    ctx.add("cross_validation.csv", csv.str());
    const double gap = diff / std::max(peak, 1e-300);
    ctx.verdict("representation-equivalence", gap < tol, "relative gap=" + sci(gap));
  };
}

// ---- dispersion sweeps --------------------------------------------------

SweepSpec sweep_spec(Params& p, const ModelParams& m, bool need_t) {
  SweepSpec s;
  s.params = m;
  s.t_list = need_t ? p.nums("t_list") : p.nums("t_list", std::vector<double>{});
  s.n_x = p.integer("n_x", s.n_x);
  s.x_extent = p.num("x_extent", s.x_extent);
  s.xs = p.nums("xs", std::vector<double>{});
  s.n_y = p.integer("n_y", s.n_y);
  s.eta_lo = p.num("eta_lo", s.eta_lo);
  s.eta_hi = p.num("eta_hi", s.eta_hi);
  s.eta = eta_quadrature(p);
  return s;
}

void validate_sweep(const SweepSpec& s) {
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, std::string("params: ") + e.what());
  }
}

Evaluator evaluator_of(const std::string& s) {
  if (s == "reflection") return Evaluator::kReflection;
  if (s == "free") return Evaluator::kFree;
  return Evaluator::kSpectral;
}

Job plan_dispersion_sweep(Params& p) {
  const std::string claim = p.str("claim", "upper", {"upper", "free-decay", "packet-bounds"});
  const ModelParams m = model_params(p);
  if (claim == "packet-bounds") {
    PacketBoundSpec s;
    s.params = m;
    s.n_list = p.ints("n_list", s.n_list);
    s.t_factors = p.nums("t_factors", s.t_factors);
    s.t_list = p.nums("t_list", std::vector<double>{});
    s.n_y = p.integer("n_y", s.n_y);
    s.spread_limit = p.num("spread_limit", s.spread_limit);
    s.packet.eta = eta_quadrature(p);
    if (m.a <= 0.0) throw config_error(p.where("a"), "must be positive");
    return [=](Context& ctx) {
      ctx.tolerances = {{"spread_limit", s.spread_limit}};
      for (const auto& r : verify_packet_bounds(s)) ctx.report(r);
    };
  }
  SweepSpec s = sweep_spec(p, m, true);
  s.regime = p.str("regime", "tangential");
  s.gamma = p.num("gamma", 0.0);
  s.evaluator = evaluator_of(
      p.str("evaluator", claim == "free-decay" ? "free" : "spectral",
            {"spectral", "reflection", "free"}));
  const double limit = claim == "upper" ? p.num("spread_limit", 10.0) : 0.0;
  const double tol = claim == "free-decay" ? p.num("tol", 0.05) : 0.0;
  validate_sweep(s);
  return [=](Context& ctx) {
    if (claim == "upper") {
      ctx.tolerances = {{"spread_limit", limit}};
      ctx.report(verify_dispersion_upper(s, limit));
    } else {
      ctx.tolerances = {{"exponent_tol", tol}};
      ctx.report(verify_free_decay(s, tol));
    }
  };
}

Job plan_saturation(Params& p) {
  const ModelParams m = model_params(p);
  SaturationSpec s;
  s.sweep = sweep_spec(p, m, true);
  s.sweep.regime = "tangential";
  s.a_list = p.nums("a_list", s.a_list);
  s.t_fixed = p.num("t_fixed", s.t_fixed);
  s.exponent_tol = p.num("exponent_tol", s.exponent_tol);
  s.a_exponent_tol = p.num("a_exponent_tol", s.a_exponent_tol);
  validate_sweep(s.sweep);
  return [=](Context& ctx) {
    ctx.tolerances = {{"exponent_tol", s.exponent_tol}, {"a_exponent_tol", s.a_exponent_tol}};
    ctx.report(verify_saturation(s));
  };
}

Job plan_transverse(Params& p) {
  const ModelParams m = model_params(p);
  SweepSpec s = sweep_spec(p, m, true);
  s.regime = "transverse";
  s.gamma = p.num("gamma");
  const double limit = p.num("spread_limit", 10.0);
  validate_sweep(s);
  return [=](Context& ctx) {
    ctx.tolerances = {{"spread_limit", limit}};
    ctx.report(verify_transverse(s, limit));
  };
}

// ---- airy-sums ----------------------------------------------------------

Job plan_airy_sums(Params& p) {
  AiryScanSpec s;
  s.l_list = p.ints("l_list", s.l_list);
  s.b_step = p.num("b_step", s.b_step);
  s.b_max = p.num("b_max", s.b_max);
  s.tol = p.num("tol", s.tol);
  if (s.l_list.size() < 2) throw config_error(p.where("l_list"), "needs at least two values");
  if (s.b_step <= 0.0) throw config_error(p.where("b_step"), "must be positive");
  return [=](Context& ctx) {
    ctx.tolerances = {{"exponent_tol", s.tol}};
    ctx.report(airy_sum_scan(s));
  };
}

// ---- strichartz-probe ---------------------------------------------------

Job plan_strichartz(Params& p) {
  const std::vector<std::string> fams =
      p.strs("families", {"gallery", "free-like", "random"}, {"gallery", "free-like", "random"});
  StrichartzSpec s;
  s.h_list = p.nums("h_list", s.h_list);
  s.q = p.num("q", s.q);
  s.t_max = p.num("t_max", s.t_max);
  s.samples_per_h = p.num("samples_per_h", s.samples_per_h);
  s.n_x = p.integer("n_x", s.n_x);
  s.x_max = p.num("x_max", s.x_max);
  s.x0 = p.num("x0", s.x0);
  s.refine = p.integer("refine", s.refine);
  const double gallery_min = p.num("gallery_min_loss", 1.0 / 6.0 - 0.05);
  const double worst_max = p.num("max_loss", 0.25 + 0.05);
  const double free_tol = p.num("free_tol", 0.05);
  if (s.h_list.size() < 2) throw config_error(p.where("h_list"), "needs at least two values");
  if (fams.empty()) throw config_error(p.where("families"), "must not be empty");
  return [=](Context& ctx) {
    ctx.tolerances = {{"gallery_min_loss", gallery_min}, {"max_loss", worst_max},
                      {"free_tol", free_tol}};
    double worst = -1e300;
    for (const auto& name : fams) {
      StrichartzSpec f = s;
      f.seed = ctx.seed;
      f.family = name == "gallery"     ? StrichartzFamily::kGallery
                 : name == "free-like" ? StrichartzFamily::kFreeLike
                                       : StrichartzFamily::kRandom;
      const StrichartzResult r = strichartz_probe(f);
      ctx.add("strichartz_" + name + ".csv", r.to_csv().str());
      worst = std::max(worst, r.loss);
      std::string flags;
      for (const auto& pt : r.points) {
        if (pt.under_resolved) flags += " under-resolved(h=" + format_double(pt.h) + ")";
      }
      const std::string d = "loss=" + format_double(r.loss) + " r2=" +
                            format_double(r.fit.r_squared) + flags;
      if (name == "gallery") ctx.verdict("strichartz-gallery-loss", r.loss >= gallery_min, d);
      if (name == "free-like") {
        ctx.verdict("strichartz-free-like", std::abs(r.loss) <= free_tol, d);
      }
      if (name == "random") ctx.verdict("strichartz-random", r.loss <= worst_max, d);
    }
    ctx.verdict("strichartz-worst-loss", worst <= worst_max, "worst=" + format_double(worst));
  };
}

// ---- nls-run / growth-report --------------------------------------------

struct NlsPlan {
  PeriodizedDomain domain;
  std::string initial;
  int k = 1, m = 1, m_lo = 2, m_hi = 6;
  double m0 = 4.0, dm = 1.0, mass = 0.5, amplitude = 1.0;
  double x0 = 2.0, y0 = 0.0, wx = 0.5, wy = 0.5, px = 0.0, py = 3.0;
  int kappa = 1;
  double dt = 1e-3, t_end = 1.0, observe_every = 0.01;
};

NlsPlan nls_plan(Params& p, double t_end_default) {
  NlsPlan n;
  Params d = p.child("domain");
  n.domain.x_max = d.num("x_max", n.domain.x_max);
  n.domain.n_x = d.integer("n_x", n.domain.n_x);
  n.domain.ell = d.num("ell", n.domain.ell);
  n.domain.n_y = d.integer("n_y", n.domain.n_y);
  n.domain.k_max = d.integer("k_max", n.domain.k_max);
  n.domain.tail_buffer = d.num("tail_buffer", n.domain.tail_buffer);
  p.adopt("domain", d);
  try {
    n.domain.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, std::string("params.domain: ") + e.what());
  }
  Params i = p.child("initial");
  n.initial = i.str("type", "gallery", {"gallery", "mode", "gaussian", "random"});
  if (n.initial == "gallery") {
    n.k = i.integer("k", n.k);
    n.m0 = i.num("m0", n.m0);
    n.dm = i.num("dm", n.dm);
    n.mass = i.num("mass", n.mass);
  } else if (n.initial == "mode") {
    n.k = i.integer("k", n.k);
    n.m = i.integer("m", n.m);
    n.amplitude = i.num("amplitude", n.amplitude);
  } else if (n.initial == "gaussian") {
    n.x0 = i.num("x0", n.x0);
    n.y0 = i.num("y0", n.y0);
    n.wx = i.num("wx", n.wx);
    n.wy = i.num("wy", n.wy);
    n.px = i.num("px", n.px);
    n.py = i.num("py", n.py);
    n.mass = i.num("mass", n.mass);
  } else {
    n.m_lo = i.integer("m_lo", n.m_lo);
    n.m_hi = i.integer("m_hi", n.m_hi);
    n.mass = i.num("mass", n.mass);
  }
  p.adopt("initial", i);
  n.kappa = p.integer("kappa", n.kappa);
  if (n.kappa != 1 && n.kappa != -1) throw config_error(p.where("kappa"), "must be 1 or -1");
  n.dt = p.num("dt", n.dt);
  n.t_end = p.num("t_end", t_end_default);
  n.observe_every = p.num("observe_every", n.observe_every);
  if (n.dt <= 0.0 || n.t_end <= 0.0 || n.observe_every <= 0.0) {
    throw config_error(p.where("dt"), "dt, t_end and observe_every must be positive");
  }
  return n;
}

SpectralState initial_state(const NlsPlan& n, const SpectralTransform& tr, std::uint64_t seed) {
  if (n.initial == "gallery") return gallery_state(tr, n.k, n.m0, n.dm, n.mass);
  if (n.initial == "mode") return mode_state(tr, n.k, n.m, n.amplitude);
  if (n.initial == "gaussian") {
    return gaussian_state(tr, n.x0, n.y0, n.wx, n.wy, n.px, n.py, n.mass);
  }
  return random_band_state(tr, seed, n.m_lo, n.m_hi, n.mass);
}

// Evolves, writes observables.csv and final.ckpt. A blow-up is recorded as a
// failed claim together with the checkpoint of the last finite state.
std::optional<ObservableSeries> run_nls(const NlsPlan& n, Context& ctx) {
  const SpectralTransform tr(n.domain);
  SpectralState s = initial_state(n, tr, ctx.seed);
  EvolveOptions eo;
  eo.observe_every = n.observe_every;
  eo.checkpoint_on_failure = ctx.out / "blowup.ckpt";
  fs::create_directories(ctx.out);
  ObservableSeries series;
  try {
    series = evolve(tr, s, n.t_end, n.dt, n.kappa, eo);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kBlowup) throw;
    ctx.add_existing("blowup.ckpt");
    ctx.verdict("nls-finite", false, e.what());
    return std::nullopt;
  }
  ctx.add("observables.csv", series.to_csv().str());
  write_checkpoint(ctx.out / "final.ckpt", tr, s);
  ctx.add_existing("final.ckpt");
  if (ctx.verbose) {
    std::cerr << "nyquist fraction " << sci(nyquist_fraction(tr, s)) << ", uncertified "
              << sci(uncertified_fraction(tr, s)) << "\n";
  }
  return series;
}

Job plan_nls_run(Params& p) {
  const NlsPlan n = nls_plan(p, 1.0);
  const double mass_tol = p.num("mass_tol_per_1e4_steps", 1e-10);
  const double energy_tol = p.num("energy_tol", 1e-4);
  const double trace_tol = p.num("trace_tol", 1e-10);
  return [=](Context& ctx) {
    ctx.tolerances = {{"mass_per_1e4_steps", mass_tol}, {"energy", energy_tol},
                      {"trace", trace_tol}};
    const auto series = run_nls(n, ctx);
    if (!series) return;
    const auto& a = series->samples.front();
    const auto& b = series->samples.back();
    const double steps = std::ceil(n.t_end / n.dt - 1e-9);
    const double mass_drift = std::abs(b.mass - a.mass) / a.mass;
    const double per_1e4 = mass_drift / std::max(1.0, steps / 1e4);
    double energy_drift = 0.0, trace = 0.0;
    for (const auto& o : series->samples) {
      energy_drift = std::max(energy_drift, std::abs(o.energy - a.energy) / std::abs(a.energy));
      trace = std::max(trace, o.trace);
    }
    ctx.verdict("nls-mass", per_1e4 < mass_tol, "drift per 1e4 steps=" + sci(per_1e4));
    ctx.verdict("nls-energy", energy_drift < energy_tol, "max rel drift=" + sci(energy_drift));
    ctx.verdict("nls-trace", trace < trace_tol, "max trace=" + sci(trace));
  };
}

Job plan_growth_report(Params& p) {
  const std::string input = p.str("observables", "");
  const int m = p.integer("m", 2);
  const double min_span = p.num("min_span", 10.0);
  if (m != 1 && m != 2) throw config_error(p.where("m"), "must be 1 or 2");
  std::optional<NlsPlan> n;
  if (input.empty()) n = nls_plan(p, 10.0);
  return [=](Context& ctx) {
    ctx.tolerances = {{"max_excess_log", std::log(2.0)}, {"min_span", min_span}};
    ObservableSeries series;
    if (n) {
      auto s = run_nls(*n, ctx);
      if (!s) return;
      series = *s;
    } else {
      const CsvTable t = CsvTable::read(input);
      const auto& h = t.header();
      auto col = [&](const std::string& name) {
        auto it = std::find(h.begin(), h.end(), name);
        if (it == h.end()) throw Error(ErrorKind::kConfig, input + ": missing column " + name);
        return static_cast<std::size_t>(it - h.begin());
      };
      const std::size_t ct = col("t"), cn = col(m == 1 ? "h1" : "h2");
      for (std::size_t r = 0; r < t.rows(); ++r) {
        ObservableSample o;
        o.t = std::stod(t.row(r)[ct]);
        (m == 1 ? o.h1 : o.h2) = std::stod(t.row(r)[cn]);
        series.samples.push_back(o);
      }
    }
    const GrowthReport g = growth_report(series, m, min_span);
    ojson j;
    j["m"] = m;
    j["envelope_rate"] = g.envelope_rate;
    j["intercept"] = g.intercept;
    j["max_excess"] = g.max_excess;
    j["verdict"] = g.pass ? "PASS" : "FAIL";
    ctx.add("growth.json", j.dump(2) + "\n");
    ctx.verdict("growth-envelope-h" + std::to_string(m), g.pass,
                "rate=" + sci(g.envelope_rate) + " max_excess=" + sci(g.max_excess));
  };
}

// ---- dispatch -----------------------------------------------------------

using Planner = Job (*)(Params&);

const std::map<std::string, Planner>& planners() {
  static const std::map<std::string, Planner> m{
      {"airy-check", plan_airy_check},
      {"poisson-check", plan_poisson_check},
      {"green-eval", plan_green_eval},
      {"cross-validate", plan_cross_validate},
      {"dispersion-sweep", plan_dispersion_sweep},
      {"saturation", plan_saturation},
      {"transverse", plan_transverse},
      {"airy-sums", plan_airy_sums},
      {"strichartz-probe", plan_strichartz},
      {"nls-run", plan_nls_run},
      {"growth-report", plan_growth_report},
  };
  return m;
}

// Smallest params object each command accepts.
ojson example_params(const std::string& command) {
  if (command == "green-eval") return {{"h", 0.05}, {"a", 0.25}, {"t", 0.6}};
  if (command == "cross-validate") return {{"h", 0.05}, {"a", 0.25}, {"t", 0.6}};
  if (command == "dispersion-sweep") {
    return {{"h", 0.05}, {"a", 0.25}, {"t_list", {0.5, 0.6, 0.7, 0.8, 0.9}}};
  }
  if (command == "saturation") {
    return {{"h", 0.02}, {"a", 0.3}, {"t_list", {0.55, 0.65, 0.75, 0.85, 0.95}}};
  }
  if (command == "transverse") {
    return {{"h", 0.01}, {"a", 0.04}, {"t0", 3.0}, {"gamma", 0.4},
            {"t_list", {0.012, 0.03, 0.08, 0.2, 0.5, 1.2, 2.5}}};
  }
  return ojson::object();
}

struct ParsedConfig {
  std::string command;
  ojson params;  // resolved
  std::string output_dir;
  std::uint64_t seed = 1;
  int workers = 0;
  Job job;
};

ParsedConfig parse_config(const ojson& j) {
  if (!j.is_object()) throw config_error("config", "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const std::set<std::string> kKeys{"command", "params", "output_dir", "seed", "workers"};
    if (!kKeys.count(it.key())) throw config_error(it.key(), "unknown key");
  }
  ParsedConfig c;
  if (!j.contains("command")) throw config_error("command", "required field missing");
  if (!j.at("command").is_string()) throw config_error("command", "expected a string");
  c.command = j.at("command").get<std::string>();
  const auto it = planners().find(c.command);
  if (it == planners().end()) throw config_error("command", "unknown command '" + c.command + "'");
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) throw config_error("output_dir", "expected a string");
    c.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      throw config_error("seed", "expected a non-negative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("workers")) {
    if (!j.at("workers").is_number_integer() || j.at("workers").get<int>() < 0) {
      throw config_error("workers", "expected a non-negative integer");
    }
    c.workers = j.at("workers").get<int>();
  }
  const ojson empty = ojson::object();
  Params p(j.contains("params") ? j.at("params") : empty, "params");
  c.job = it->second(p);
  p.finish();
  c.params = p.resolved();
  return c;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::kBudget:
    case ErrorKind::kNonConvergence:
    case ErrorKind::kUnresolvedOscillation:
      return kExitBudget;
    case ErrorKind::kBlowup:
      return kExitClaimFail;
    default:
      return kExitConfig;
  }
}

std::string manifest_hash(ojson m) {
  m.erase("manifest_sha256");
  return sha256_hex(m.dump());
}

int workers_for(const RunOptions& opts, int from_config) {
  if (opts.workers > 0) return opts.workers;
  if (const char* env = std::getenv("FRIEDLAB_WORKERS"); env && std::atoi(env) > 0) {
    return std::atoi(env);
  }
  return from_config;
}

struct RunResult {
  int code = kExitOk;
  fs::path manifest;
};

RunResult execute(const ojson& config, const RunOptions& opts, std::ostream& out) {
  RunResult res;
  ParsedConfig c;
  try {
    c = parse_config(config);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    res.code = kExitConfig;
    return res;
  }
  const int workers = workers_for(opts, c.workers);
  set_default_workers(workers);
  Context ctx;
  ctx.out = !opts.output.empty()          ? opts.output
            : !c.output_dir.empty()       ? fs::path(c.output_dir)
                                          : fs::path("friedlab-out") / c.command;
  ctx.verbose = opts.verbose;
  ctx.seed = c.seed;
  if (opts.verbose) std::cerr << c.command << " params " << c.params.dump() << "\n";

  const auto start = std::chrono::steady_clock::now();
  std::string error;
  try {
    c.job(ctx);
  } catch (const Error& e) {
    error = e.what();
    res.code = exit_code_for(e.kind());
    std::cerr << (res.code == kExitBudget ? "budget exhausted: " : "error: ") << e.what() << "\n";
  } catch (const std::exception& e) {
    error = e.what();
    res.code = kExitConfig;
    std::cerr << "error: " << e.what() << "\n";
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  for (const auto& v : ctx.verdicts) {
    out << v.verdict << " " << v.claim << " " << v.detail << "\n";
    if (res.code == kExitOk && v.verdict != "PASS") res.code = kExitClaimFail;
  }
  if (error.empty() && ctx.verdicts.empty()) res.code = kExitClaimFail;
  // Config errors raised before anything was written leave no directory.
  if (!error.empty() && ctx.artifacts.empty()) return res;

  ojson m;
  m["tool"] = "friedlab";
  m["version"] = FRIEDLAB_VERSION;
  m["revision"] = FRIEDLAB_GIT_REVISION;
  m["config"] = {{"command", c.command}, {"params", c.params}, {"seed", c.seed}};
  if (!c.output_dir.empty()) m["config"]["output_dir"] = c.output_dir;
  m["workers"] = workers > 0 ? workers : default_workers();
  m["wall_time_s"] = wall;
  m["tolerances"] = ctx.tolerances;
  m["verdicts"] = ojson::array();
  for (const auto& v : ctx.verdicts) {
    m["verdicts"].push_back({{"claim", v.claim}, {"verdict", v.verdict}, {"detail", v.detail}});
  }
  if (!error.empty()) m["error"] = error;
  m["exit_code"] = res.code;
  m["artifacts"] = ojson::array();
  for (const auto& a : ctx.artifacts) {
    m["artifacts"].push_back({{"name", a.name}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  }
  m["manifest_sha256"] = manifest_hash(m);
  write_artifact(ctx.out, "manifest.json", m.dump(2) + "\n");
  res.manifest = ctx.out / "manifest.json";
  if (opts.verbose) std::cerr << "manifest " << res.manifest.string() << "\n";
  return res;
}

ojson parse_json(const std::string& text, const std::string& what) {
  try {
    return ojson::parse(text);
  } catch (const std::exception& e) {
    throw config_error(what, e.what());
  }
}

// First differing cell of two CSV texts, or "" when identical.
std::string first_difference(const std::string& a, const std::string& b) {
  if (a == b) return "";
  const CsvTable ta = CsvTable::parse(a), tb = CsvTable::parse(b);
  if (ta.header() != tb.header()) return "header differs";
  const std::size_t rows = std::min(ta.rows(), tb.rows());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < ta.header().size(); ++c) {
      if (ta.row(r)[c] != tb.row(r)[c]) {
        return "row " + std::to_string(r + 1) + " column " + ta.header()[c] + ": " +
               ta.row(r)[c] + " vs " + tb.row(r)[c];
      }
    }
  }
  return "row count " + std::to_string(ta.rows()) + " vs " + std::to_string(tb.rows());
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : planners()) v.push_back(k);
    return v;
  }();
  return names;
}

int run_config_text(const std::string& text, const RunOptions& opts) {
  ojson j;
  try {
    j = parse_json(text, "config");
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  return execute(j, opts, std::cout).code;
}

int run_config_file(const fs::path& path, const RunOptions& opts) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  return run_config_text(text, opts);
}

int replay(const fs::path& manifest_path, const RunOptions& opts) {
  ojson m;
  try {
    m = parse_json(read_text_file(manifest_path), manifest_path.string());
  } catch (const Error& e) {
    std::cerr << "replay refused: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!m.is_object() || !m.contains("manifest_sha256") || !m.contains("config") ||
      !m.contains("artifacts")) {
    std::cerr << "replay refused: not a friedlab manifest\n";
    return kExitConfig;
  }
  if (m.at("manifest_sha256") != manifest_hash(m)) {
    std::cerr << "replay refused: manifest hash mismatch\n";
    return kExitConfig;
  }
  const fs::path src = manifest_path.parent_path();
  RunOptions ro = opts;
  if (ro.output.empty()) ro.output = src / "replay";
  if (fs::exists(ro.output) && fs::equivalent(ro.output, src)) {
    std::cerr << "replay refused: output directory is the original run\n";
    return kExitConfig;
  }
  std::ostringstream verdicts;
  const RunResult r = execute(m.at("config"), ro, verdicts);
  if (opts.verbose) std::cerr << verdicts.str();
  if (r.manifest.empty()) {
    std::cerr << "replay failed: the run produced no manifest\n";
    return r.code == kExitOk ? kExitClaimFail : r.code;
  }
  std::size_t compared = 0;
  for (const auto& a : m.at("artifacts")) {
    const std::string name = a.at("name").get<std::string>();
    if (fs::path(name).extension() != ".csv") continue;
    const fs::path fresh = ro.output / name;
    if (!fs::exists(fresh)) {
      std::cout << "MISMATCH " << name << ": not produced by the replay\n";
      return kExitClaimFail;
    }
    const std::string old_text = read_text_file(src / name);
    if (sha256_hex(old_text) != a.at("sha256").get<std::string>()) {
      std::cout << "MISMATCH " << name << ": original file does not match its manifest hash\n";
      return kExitClaimFail;
    }
    const std::string diff = first_difference(old_text, read_text_file(fresh));
    if (!diff.empty()) {
      std::cout << "MISMATCH " << name << ": " << diff << "\n";
      return kExitClaimFail;
    }
    ++compared;
  }
  std::cout << "IDENTICAL " << compared << " csv artifact(s)\n";
  return kExitOk;
}

std::string default_config(const std::string& command) {
  const auto it = planners().find(command);
  if (it == planners().end()) throw config_error("command", "unknown command '" + command + "'");
  const ojson ex = example_params(command);
  Params p(ex, "params");
  it->second(p);
  p.finish();
  ojson j;
  j["command"] = command;
  j["params"] = p.resolved();
  j["seed"] = 1;
  return j.dump(2) + "\n";
}

}  // namespace friedlab::cli
