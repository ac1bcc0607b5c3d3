// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "capkit/chain.hpp"
#include "capkit/multidim.hpp"
#include "validate_suite.hpp"

namespace fs = std::filesystem;
using namespace capkit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> level_grid(double lo, double hi, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(lo + (hi - lo) * i / (n - 1));
  return t;
}

// Profiles of every corpus entry over 20 interior levels plus the two
// limit levels, shared by the monotonicity and co-area criteria.
struct CorpusProfile {
  validate::CorpusEntry entry;
  SublevelProfile interior;
  SublevelProfile limits;  // t near the pole, t near 0
  double capacity = 0.0;
};

std::vector<CorpusProfile> corpus_profiles(const SolverConfig& cfg) {
  std::vector<CorpusProfile> out;
  for (const auto& e : validate::default_corpus()) {
    const auto sol = solve(e.domain, e.pole, cfg);
    out.push_back({e, sublevel_profile(sol, level_grid(-3.0, -0.3, 20), cfg),
                   sublevel_profile(sol, {-12.0, -1e-4}, cfg), capacity_robin(sol)});
  }
  return out;
}

Outcome disc_center_chain() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = evaluate_chain(PlanarDomain::disc(0.0, 1.0), 0.0, -2.0, -1.0, ChainConfig{});
  const double elapsed = seconds_since(t0);
  double worst_k = std::abs(r.values[1] - 1.0), worst_rest = 0.0;
  for (int k : {0, 2, 3, 4, 5}) worst_rest = std::max(worst_rest, std::abs(r.values[k] - 1.0));
  return {worst_k <= 1e-4 && worst_rest <= 1e-6 && elapsed < 30.0,
          "|piK-1|=" + fmt("%.2e", worst_k) + " (<=1e-4), max other |v-1|=" + fmt("%.2e", worst_rest) +
              " (<=1e-6), " + fmt("%.1f", elapsed) + " s (<30 s)"};
}

Outcome disc_kernel_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto model = chain_model(PlanarDomain::disc(0.0, 1.0), 0.0, ChainConfig{});
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const cplx z = std::polar(0.78 * k / 9.0, 0.7 * k);
    const double exact = 1.0 / (pi * std::pow(1.0 - std::norm(z), 2));
    worst = std::max(worst, std::abs(model.kernel_at(z) / exact - 1.0));
  }
  const double elapsed = seconds_since(t0);
  return {worst < 1e-5 && elapsed < 60.0, "10 points, |z|<=0.78, degree 30: max rel err " + fmt("%.2e", worst) +
                                              " (<1e-5), " + fmt("%.2f", elapsed) + " s (<60 s)"};
}

Outcome annulus_strict_gap() {
  const auto r = evaluate_chain(PlanarDomain::annulus(0.0, 0.2, 1.0), 0.5, -2.0, -1.0, ChainConfig{});
  const auto& link = r.links[1];
  const double bound = 10.0 * std::max(link.tolerance, r.equality_tolerance);
  return {link.gap > bound,
          "(piK-c^2)/c^2=" + fmt("%.3e", link.gap) + " > 10 x max(tol " + fmt("%.1e", link.tolerance) +
              ", eq " + fmt("%.0e", r.equality_tolerance) + ")=" + fmt("%.1e", bound)};
}

Outcome capacity_cross_check() {
  const SolverConfig cfg;
  double worst = 0.0;
  for (const auto& [domain, pole] : {std::pair{PlanarDomain::disc(0.0, 1.0), cplx(0.5)},
                                     std::pair{PlanarDomain::ellipse(0.0, 2.0, 1.0), cplx(0.0)}}) {
    const auto sol = solve(domain, pole, cfg);
    const double c = capacity_robin(sol), delta = domain.boundary_distance(pole);
    for (double frac : {0.25, 0.5, 0.75}) worst = std::max(worst, std::abs(capacity_circle_mean(sol, frac * delta) - c));
  }
  return {worst < 1e-5, "max |c_robin - c_mean| over 6 radii = " + fmt("%.2e", worst) + " (<1e-5)"};
}

Outcome flux_identity(const std::vector<CorpusProfile>& corpus) {
  double worst = 0.0;
  int levels = 0;
  for (const auto& p : corpus) {
    const auto& name = p.entry.name;
    if (name != "disc-center" && name != "ellipse" && name != "square") continue;
    for (const auto& l : p.interior.levels) {
      worst = std::max(worst, std::abs(l.flux - two_pi));
      ++levels;
    }
  }
  return {worst < 1e-3 && levels == 60, std::to_string(levels) + " levels in [-3,-0.3] on disc/ellipse/square: max |flux-2pi| = " +
                                            fmt("%.2e", worst) + " (<1e-3)"};
}

Outcome monotonicity(const std::vector<CorpusProfile>& corpus) {
  double worst_increase = -1.0, worst_pole = 0.0, worst_zero = 0.0;
  for (const auto& p : corpus) {
    SublevelProfile all = p.interior;
    all.levels.insert(all.levels.begin(), p.limits.levels[0]);
    all.levels.push_back(p.limits.levels[1]);
    const auto& lv = all.levels;
    for (std::size_t i = 0; i + 1 < lv.size(); ++i)
      worst_increase = std::max(worst_increase, (lv[i + 1].f - lv[i].f) / lv[i].f);
    worst_pole = std::max(worst_pole, std::abs(p.limits.levels[0].f / (p.capacity * p.capacity) - 1.0));
    worst_zero = std::max(worst_zero, std::abs(p.limits.levels[1].f / (pi / p.entry.domain.area()) - 1.0));
  }
  return {worst_increase <= 1e-3 && worst_pole <= 0.02 && worst_zero <= 0.02,
          "7 domains x 22 levels: max relative increase of f " + fmt("%.2e", worst_increase) +
              " (<=1e-3); f(-12) vs c^2 " + fmt("%.2e", worst_pole) + ", f(-1e-4) vs pi/Vol " +
              fmt("%.2e", worst_zero) + " (<=2e-2)"};
}

Outcome square_chain_ordering() {
  const ChainConfig cfg;
  const auto square = PlanarDomain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto model = chain_model(square, {0.5, 0.5}, cfg);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int held = 0;
  std::string failure;
  for (int i = 0; i < 20; ++i) {
    cplx z;
    do z = {u(rng), u(rng)};
    while (!square.contains(z));
    try {
      evaluate_chain(model, z, -2.0, -1.0, cfg);
      ++held;
    } catch (const ChainViolation& v) {
      if (failure.empty()) failure = "; first violation " + std::string(v.link_name()) + " at " + io::complex_to_json(z).dump();
    } catch (const Error& e) {
      if (failure.empty()) failure = std::string("; ") + e.what();
    }
  }
  return {held == 20, std::to_string(held) + "/20 random points with all five links holding" + failure};
}

Outcome coarea_isoperimetric(const std::vector<CorpusProfile>& corpus) {
  double worst_coarea = 0.0, worst_iso = 0.0;
  for (const auto& p : corpus) {
    for (const auto& r : coarea_residual(p.interior))
      if (r.interior) worst_coarea = std::max(worst_coarea, r.relative);
    for (const auto* prof : {&p.interior, &p.limits})
      for (double d : isoperimetric_deficit(*prof)) worst_iso = std::min(worst_iso, d);
  }
  return {worst_coarea < 0.05 && worst_iso >= -1e-3,
          "max interior co-area residual " + fmt("%.2e", worst_coarea) + " (<5e-2); min sigma^2-4pi Vol " +
              fmt("%.2e", worst_iso) + " (>=-1e-3)"};
}

Outcome multidim_closed_forms() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<cplx> o{0.0, 0.0};
  const auto ball = MultiDomain::ball(o, 1.0);
  const auto bidisc = MultiDomain::polydisc(o, {1.0, 1.0});
  const double p2 = pi * pi;
  const double errs[] = {std::abs(lemma_de_gap(ball, o)),         std::abs(lemma_de_gap(bidisc, o) - 1.0 / p2),
                         std::abs(delta_c_gap(ball, o)),          std::abs(delta_c_gap(bidisc, o) - p2 / 2.0),
                         std::abs(bz_lower_bound_gap(ball, o)),   std::abs(bz_lower_bound_gap(bidisc, o))};
  double worst = 0.0;
  for (double e : errs) worst = std::max(worst, e);
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-12 && elapsed < 1.0,
          "6 closed-form gaps, max error " + fmt("%.1e", worst) + " (<=1e-12), " + fmt("%.4f", elapsed) + " s (<1 s)"};
}

Outcome scale_covariance() {
  double worst = 0.0;
  const auto unit = disc_chain_oracle(0.0, 1.0, 0.0, -2.0, -1.0);
  for (double radius : {0.1, 0.5, 2.0, 10.0}) {
    const auto scaled = disc_chain_oracle(0.0, radius, 0.0, -2.0, -1.0);
    for (int k = 0; k < 6; ++k) worst = std::max(worst, std::abs(scaled.values[k] * radius * radius / unit.values[k] - 1.0));
  }
  return {worst <= 1e-12, "R in {0.1,0.5,2,10}: max |R^2 v_R / v_1 - 1| = " + fmt("%.1e", worst) + " (<=1e-12)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome validate_determinism() {
  const fs::path root = fs::temp_directory_path() / "capkit_acceptance_validate";
  fs::remove_all(root);
  std::string outputs[2], reports[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = root / std::to_string(i);
    fs::create_directories(dir);
    const std::string cmd = std::string(CAPKIT_CLI_PATH) + " validate --seed 7 --out " + dir.string() + " > " +
                            (dir / "stdout.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
      return {false, "validate run " + std::to_string(i) + " exited with status " + std::to_string(status)};
    outputs[i] = slurp(dir / "stdout.txt");
    reports[i] = slurp(dir / "validate.json");
  }
  const bool same = !reports[0].empty() && reports[0] == reports[1] && outputs[0] == outputs[1];
  return {same, "two validate runs (seed 7): validate.json " + std::to_string(reports[0].size()) + " bytes, " +
                    (same ? "byte-identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  const SolverConfig cfg;
  std::vector<CorpusProfile> corpus;
  std::string corpus_error;
  try {
    corpus = corpus_profiles(cfg);
  } catch (const std::exception& e) {
    corpus_error = e.what();
  }
  auto with_corpus = [&](Outcome (*f)(const std::vector<CorpusProfile>&)) {
    return [&, f] { return corpus_error.empty() ? f(corpus) : Outcome{false, "corpus profile failed: " + corpus_error}; };
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"disc-center rigidity chain", disc_center_chain},
      {"disc kernel vs closed form", disc_kernel_oracle},
      {"annulus strict Suita gap", annulus_strict_gap},
      {"capacity cross-validation", capacity_cross_check},
      {"flux identity", with_corpus(flux_identity)},
      {"monotonicity and limits of f", with_corpus(monotonicity)},
      {"chain ordering on the square", square_chain_ordering},
      {"co-area and isoperimetric", with_corpus(coarea_isoperimetric)},
      {"multidim closed forms", multidim_closed_forms},
      {"scale covariance", scale_covariance},
      {"validate determinism", validate_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2zu %-30s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
