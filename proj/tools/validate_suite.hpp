#pragma once

// Built-in invariant suite behind `capkit validate`.

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "capkit/bergman.hpp"
#include "capkit/chain.hpp"
#include "capkit/green.hpp"
#include "capkit/io.hpp"
#include "capkit/multidim.hpp"

namespace capkit::validate {

struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool at_most = true;  // pass iff measured <= threshold (else measured >= threshold)
  bool pass = false;
  std::string note;     // failure reason when the check could not be computed
};

struct CorpusEntry {
  std::string name;
  PlanarDomain domain;
  cplx pole;
};

inline std::vector<CorpusEntry> default_corpus() {
  return {
      {"disc-center", PlanarDomain::disc(0.0, 1.0), 0.0},
      {"disc-offset", PlanarDomain::disc(0.0, 1.0), 0.5},
      {"disc-r2", PlanarDomain::disc(0.0, 2.0), 0.0},
      {"ellipse", PlanarDomain::ellipse(0.0, 2.0, 1.0), 0.0},
      {"square", PlanarDomain::polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}), {0.5, 0.5}},
      {"annulus", PlanarDomain::annulus(0.0, 0.2, 1.0), 0.5},
      {"fourier", PlanarDomain::fourier({0.15, 0.0, 0.0, 1.0, 0.0}), 0.0},
  };
}

struct Settings {
  ChainConfig chain;
  std::vector<double> levels;  // interior profile levels
  double t_near_zero = -1e-4;
  double t_near_pole = -12.0;
};

class Runner {
 public:
  explicit Runner(Settings settings) : settings_(std::move(settings)) {}

  const std::vector<Check>& checks() const { return checks_; }

  bool all_pass() const {
    for (const auto& c : checks_)
      if (!c.pass) return false;
    return true;
  }

  void record(std::string name, double measured, double threshold, bool at_most = true) {
    Check c{std::move(name), measured, threshold, at_most, false, {}};
    c.pass = std::isfinite(measured) && (at_most ? measured <= threshold : measured >= threshold);
    checks_.push_back(std::move(c));
  }

  // Runs `body`; any exception becomes a failed check named `name`.
  void guarded(const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      Check c{name, std::nan(""), 0.0, true, false, e.what()};
      checks_.push_back(std::move(c));
    }
  }

  void run_entry(const CorpusEntry& e) {
    const SolverConfig& sc = settings_.chain.solver;
    const std::string tag = "[" + e.name + "]";
    guarded("solve" + tag, [&] {
      const GreenSolution sol = solve(e.domain, e.pole, sc);
      record("boundary-defect" + tag, sol.residual(), sc.defect_tolerance);
      record("negativity" + tag, max_interior_value(sol, 1000, sc.seed), 0.0);

      const double c = capacity_robin(sol);
      const double delta = e.domain.boundary_distance(e.pole);
      double worst = 0.0;
      for (double frac : {0.25, 0.5, 0.75}) worst = std::max(worst, std::abs(capacity_circle_mean(sol, frac * delta) - c));
      record("capacity-circle-mean" + tag, worst, 1e-5);

      const auto profile = sublevel_profile(sol, settings_.levels, sc);
      double flux = 0.0, coarea = 0.0, iso = 0.0, unreliable = 0.0;
      for (const auto& l : profile.levels) {
        flux = std::max(flux, std::abs(l.flux - two_pi));
        if (!l.reliable) unreliable += 1.0;
      }
      for (const auto& r : coarea_residual(profile))
        if (r.interior) coarea = std::max(coarea, r.relative);
      for (double d : isoperimetric_deficit(profile)) iso = std::min(iso, d);
      double increase = 0.0;
      for (std::size_t i = 0; i + 1 < profile.levels.size(); ++i)
        increase = std::max(increase, (profile.levels[i + 1].f - profile.levels[i].f) / profile.levels[i].f);
      record("flux" + tag, flux, 1e-3);
      record("coarea" + tag, coarea, 0.05);
      record("monotonicity" + tag, increase, 1e-3);
      record("isoperimetric" + tag, iso, -1e-3, false);
      record("monte-carlo-agreement" + tag, unreliable, 0.0);

      const auto ends = sublevel_profile(sol, {settings_.t_near_pole, settings_.t_near_zero}, sc);
      record("f-limit-pole" + tag, std::abs(ends.levels[0].f / (c * c) - 1.0), 0.02);
      record("f-limit-zero" + tag, std::abs(ends.levels[1].f / (pi / e.domain.area()) - 1.0), 0.02);

      // Chain at the pole with t = -2, -1; a violation throws.
      guarded("chain-ordering" + tag, [&] {
        const auto model = chain_model(e.domain, e.pole, settings_.chain);
        record("gram-defect" + tag, model.gram_defect(), 1e-10);
        const auto lv = sublevel_profile(sol, {-2.0, -1.0}, sc);
        const auto report = assemble_chain(model, sol, lv.levels[0], lv.levels[1], sc.equality_tolerance);
        double worst = 0.0;
        for (const auto& l : report.links) worst = std::min(worst, l.gap + l.tolerance);
        record("chain-ordering" + tag, worst, 0.0, false);
        const ChainLink& kc = report.links[1];
        if (e.domain.simply_connected()) {
          record("suita-equality" + tag, std::abs(kc.gap), std::max(sc.equality_tolerance, kc.tolerance));
        } else {
          record("suita-strict-gap" + tag, kc.gap, 10.0 * std::max(sc.equality_tolerance, kc.tolerance), false);
        }
        // Relative margin of pi K over pi / Vol, allowing the kernel tolerance.
        record("kernel-lower-bound" + tag, report.values[1] / report.values[5] - 1.0,
               -std::max(1e-12, report.tolerances[1]), false);
      });
    });
  }

  // Oracle agreements on the unit disc.
  void run_disc_oracles() {
    const SolverConfig& sc = settings_.chain.solver;
    guarded("solve-vs-oracle[disc-offset]", [&] {
      const auto sol = solve(PlanarDomain::disc(0.0, 1.0), 0.5, sc);
      const auto oracle = disc_oracle(0.0, 1.0, 0.5);
      double worst = 0.0;
      for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
          const cplx z(-0.95 + 1.9 * (i + 0.5) / 20, -0.95 + 1.9 * (j + 0.5) / 20);
          if (!sol.domain().contains(z) || std::abs(z - 0.5) < 1e-9) continue;
          worst = std::max(worst, std::abs(sol.value(z) - oracle.value(z)));
        }
      record("solve-vs-oracle[disc-offset]", worst, 1e-6);
    });
    guarded("kernel-vs-closed-form[disc]", [&] {
      const auto model = chain_model(PlanarDomain::disc(0.0, 1.0), 0.0, settings_.chain);
      double worst = 0.0;
      for (int k = 0; k < 10; ++k) {
        const cplx z = std::polar(0.78 * k / 9.0, 0.7 * k);
        const double exact = 1.0 / (pi * std::pow(1.0 - std::norm(z), 2));
        worst = std::max(worst, std::abs(model.kernel_at(z) / exact - 1.0));
      }
      record("kernel-vs-closed-form[disc]", worst, 1e-5);
    });
  }

  void run_multidim() {
    guarded("multidim-closed-forms", [&] {
      const auto ball = MultiDomain::ball({0.0, 0.0}, 1.0);
      const auto bidisc = MultiDomain::polydisc({0.0, 0.0}, {1.0, 1.0});
      const std::vector<cplx> o{0.0, 0.0};
      const double p2 = pi * pi;
      record("lemma-gap[ball]", std::abs(lemma_de_gap(ball, o)), 1e-12);
      record("lemma-gap[bidisc]", std::abs(lemma_de_gap(bidisc, o) - 1.0 / p2), 1e-12);
      record("azukawa-gap[ball]", std::abs(delta_c_gap(ball, o)), 1e-12);
      record("azukawa-gap[bidisc]", std::abs(delta_c_gap(bidisc, o) - p2 / 2.0), 1e-12);
      record("bz-gap[ball]", std::abs(bz_lower_bound_gap(ball, o)), 1e-12);
      record("bz-gap[bidisc]", std::abs(bz_lower_bound_gap(bidisc, o)), 1e-12);
    });
  }

  void run_all() {
    run_disc_oracles();
    for (const auto& e : default_corpus()) run_entry(e);
    run_multidim();
  }

  io::json to_json() const {
    io::json list = io::json::array();
    for (const auto& c : checks_) {
      io::json j = {{"name", c.name},
                    {"pass", c.pass},
                    {"relation", c.at_most ? "<=" : ">="},
                    {"threshold", c.threshold}};
      j["measured"] = std::isfinite(c.measured) ? io::json(c.measured) : io::json(nullptr);
      if (!c.note.empty()) j["error"] = c.note;
      list.push_back(std::move(j));
    }
    return list;
  }

 private:
  Settings settings_;
  std::vector<Check> checks_;
};

}  // namespace capkit::validate
