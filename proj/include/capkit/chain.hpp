#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "capkit/bergman.hpp"
#include "capkit/error.hpp"
#include "capkit/geometry.hpp"
#include "capkit/green.hpp"

namespace capkit {

struct ChainConfig {
  SolverConfig solver;
  int bergman_degree = 30;
  int quadrature_resolution = 400;

  void validate() const {
    solver.validate();
    if (bergman_degree < 0) throw Error(Errc::InvalidArgument, "Bergman degree must be non-negative");
    if (quadrature_resolution < 8) throw Error(Errc::ResolutionTooLow, "quadrature resolution must be at least 8");
  }
};

enum class Verdict { DiscCenteredAtZ, BiholomorphicToDiscEvidence, NoEquality, Inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::DiscCenteredAtZ: return "disc-centered-at-z";
    case Verdict::BiholomorphicToDiscEvidence: return "biholomorphic-to-disc-evidence";
    case Verdict::NoEquality: return "no-equality";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

inline constexpr std::array<std::string_view, 6> chain_value_names = {"delta_inv_sq", "pi_K",  "c_sq",
                                                                     "f_t1",         "f_t2",  "pi_over_vol"};
inline constexpr std::array<std::string_view, 5> chain_link_names = {"delta-K", "K-c", "c-f1", "f1-f2", "f2-vol"};

// Link k compares values[k] >= values[k+1] on a relative scale.
struct ChainLink {
  double gap = 0.0;        // (values[k] - values[k+1]) / values[k+1]
  double tolerance = 0.0;  // root-sum-square of the two relative operand tolerances
  bool equal = false;      // closes within the equality tolerance, and the estimators resolve it
  bool ambiguous = false;  // neither clearly equal nor clearly strict
  bool holds = true;       // gap >= -tolerance
};

struct ChainReport {
  cplx z;
  double t1 = 0.0, t2 = 0.0;
  std::array<double, 6> values{};
  std::array<double, 6> tolerances{};  // relative, per value
  std::array<ChainLink, 5> links{};
  double equality_tolerance = 1e-6;
  Verdict verdict = Verdict::Inconclusive;

  // Supporting evidence, not part of the verdict.
  double capacity_distance_gap = 0.0;  // (1/delta - c) / c, nonnegative in theory
  bool f_near_constant = false;        // f(t1) and f(t2) agree within the equality threshold
  bool kernel_converged = true;
  bool levels_reliable = true;
  double green_residual = 0.0;
  int bergman_degree = 0;
};

// A link is equal when |gap| <= max(tol, tolerance) and the operand
// tolerance itself is no coarser than tol; strict when the gap exceeds ten
// times that threshold; ambiguous in between or when the estimators are too
// coarse to decide.
inline void classify_link(ChainLink& link, double tol) {
  const double threshold = std::max(tol, link.tolerance);
  link.equal = std::abs(link.gap) <= threshold && link.tolerance <= tol;
  link.ambiguous = !link.equal && link.gap <= 10.0 * threshold;
}

// disc-centered-at-z when the distance link or any link from c^2 onward is
// equal; otherwise biholomorphic evidence when pi K = c^2 is equal;
// otherwise inconclusive if any link is ambiguous.
inline Verdict classify_rigidity(const ChainReport& report, double tol) {
  auto links = report.links;
  for (auto& l : links) classify_link(l, tol);
  if (links[0].equal || links[2].equal || links[3].equal || links[4].equal) return Verdict::DiscCenteredAtZ;
  if (links[1].equal) return Verdict::BiholomorphicToDiscEvidence;
  for (const auto& l : links)
    if (l.ambiguous) return Verdict::Inconclusive;
  return Verdict::NoEquality;
}

// Fills links, verdict and the supporting flags from values and tolerances.
inline void finalize_chain(ChainReport& r) {
  for (int k = 0; k < 5; ++k) {
    ChainLink& l = r.links[k];
    l.gap = (r.values[k] - r.values[k + 1]) / r.values[k + 1];
    l.tolerance = std::hypot(r.tolerances[k], r.tolerances[k + 1]);
    l.holds = l.gap >= -l.tolerance;
    classify_link(l, r.equality_tolerance);
  }
  r.f_near_constant = r.links[3].equal;
  const double c = std::sqrt(r.values[2]);
  r.capacity_distance_gap = (std::sqrt(r.values[0]) - c) / c;
  r.verdict = classify_rigidity(r, r.equality_tolerance);
}

class ChainViolation : public Error {
 public:
  ChainViolation(int link, ChainReport report)
      : Error(Errc::ChainViolation, "chain link " + std::string(chain_link_names[link]) + " violated: relative gap " +
                                        numerics::format17(report.links[link].gap) + " below -" +
                                        numerics::format17(report.links[link].tolerance)),
        link_(link),
        report_(std::move(report)) {}

  int link() const { return link_; }
  std::string_view link_name() const { return chain_link_names[link_]; }
  double magnitude() const { return -report_.links[link_].gap; }
  const ChainReport& report() const { return report_; }

 private:
  int link_;
  ChainReport report_;
};

inline void check_levels(double t1, double t2) {
  if (!(t1 < t2 && t2 < 0.0)) throw Error(Errc::InvalidArgument, "chain levels need t1 < t2 < 0");
}

// Interior point to expand the Bergman basis about: the annulus midline,
// otherwise the domain's natural centre when it lies inside.
inline cplx default_expansion_center(const PlanarDomain& domain, cplx fallback) {
  if (const auto* a = std::get_if<Annulus>(&domain.shape())) return a->center + 0.5 * (a->inner + a->outer);
  const cplx c = domain.center();
  return domain.contains(c) ? c : fallback;
}

// Solves, doubling the collocation and validation counts up to twice when
// the boundary defect misses its tolerance.
inline GreenSolution solve_escalating(const PlanarDomain& domain, cplx pole, SolverConfig config) {
  for (int attempt = 0;; ++attempt) {
    try {
      return solve(domain, pole, config);
    } catch (const Error& e) {
      if (e.code() != Errc::SolveFailed || attempt == 2) throw;
      config.collocation_nodes *= 2;
      config.validation_nodes *= 2;
    }
  }
}

// Chain from already computed parts; `lo` and `hi` are the profile records
// at t1 < t2. Throws ChainViolation when any link fails by more than its
// combined tolerance.
inline ChainReport assemble_chain(const BergmanModel& model, const GreenSolution& sol, const LevelRecord& lo,
                                  const LevelRecord& hi, double equality_tolerance) {
  check_levels(lo.t, hi.t);
  const PlanarDomain& domain = model.domain();
  const cplx z = sol.pole();
  const double delta = domain.boundary_distance(z);
  const double residual = sol.residual();
  const double c = capacity_robin(sol);
  const auto k = model.estimate(z);

  ChainReport r;
  r.z = z;
  r.t1 = lo.t;
  r.t2 = hi.t;
  r.equality_tolerance = equality_tolerance;
  r.values = {1.0 / (delta * delta), pi * k.value, c * c, lo.f, hi.f, pi / domain.area()};
  // A boundary defect e shifts every level by at most e, hence the 2e terms.
  const double exact = 1e-12;
  r.tolerances = {domain.kind() == "fourier" ? 1e-9 : exact,
                  k.tolerance,
                  std::max(exact, 2.0 * residual),
                  std::max(exact, lo.volume_tolerance / lo.volume + 2.0 * residual),
                  std::max(exact, hi.volume_tolerance / hi.volume + 2.0 * residual),
                  exact};
  r.kernel_converged = k.converged;
  r.levels_reliable = lo.reliable && hi.reliable;
  r.green_residual = residual;
  r.bergman_degree = model.degree();
  finalize_chain(r);
  for (int i = 0; i < 5; ++i)
    if (!r.links[i].holds) throw ChainViolation(i, r);
  return r;
}

// Chain values from a prebuilt Bergman model (reused across points).
inline ChainReport evaluate_chain(const BergmanModel& model, cplx z, double t1, double t2, const ChainConfig& config) {
  config.validate();
  check_levels(t1, t2);
  const GreenSolution sol = solve_escalating(model.domain(), z, config.solver);
  const auto profile = sublevel_profile(sol, {t1, t2}, config.solver);
  return assemble_chain(model, sol, profile.levels[0], profile.levels[1], config.solver.equality_tolerance);
}

inline BergmanModel chain_model(const PlanarDomain& domain, cplx z, const ChainConfig& config) {
  config.validate();
  const auto rule = build_quadrature(domain, config.quadrature_resolution);
  return build_model(domain, default_expansion_center(domain, z), config.bergman_degree, rule);
}

inline ChainReport evaluate_chain(const PlanarDomain& domain, cplx z, double t1, double t2,
                                  const ChainConfig& config) {
  if (!domain.contains(z)) throw Error(Errc::PointOutsideDomain, "chain point not in domain");
  check_levels(t1, t2);
  return evaluate_chain(chain_model(domain, z, config), z, t1, t2, config);
}

// Closed-form chain on disc(center, radius): with q = (z - center)/R and
// s = e^t, D_t is a Moebius image disc and
//   f(t) = (1 - s^2 |q|^2)^2 / (R^2 (1 - |q|^2)^2).
inline ChainReport disc_chain_oracle(cplx center, double radius, cplx z, double t1, double t2,
                                     double equality_tolerance = 1e-6) {
  check_levels(t1, t2);
  if (!(radius > 0.0)) throw Error(Errc::InvalidDomain, "radius must be positive");
  const double q2 = std::norm((z - center) / radius);
  if (!(q2 < 1.0)) throw Error(Errc::PointOutsideDomain, "chain point not in disc");
  const double r2 = radius * radius;
  const double delta = radius - std::abs(z - center);
  const double kc = 1.0 / (r2 * (1.0 - q2) * (1.0 - q2));
  auto f = [&](double t) {
    const double s2 = std::exp(2.0 * t);
    return (1.0 - s2 * q2) * (1.0 - s2 * q2) / (r2 * (1.0 - q2) * (1.0 - q2));
  };
  ChainReport r;
  r.z = z;
  r.t1 = t1;
  r.t2 = t2;
  r.equality_tolerance = equality_tolerance;
  r.values = {1.0 / (delta * delta), kc, kc, f(t1), f(t2), 1.0 / r2};
  r.tolerances.fill(1e-14);
  finalize_chain(r);
  return r;
}

struct MonotonicityViolation {
  std::size_t index = 0;  // levels index, 0 <= index < size - 1
  double t_lo = 0.0, t_hi = 0.0;
  double increase = 0.0;  // (f_hi - f_lo) / f_lo
};

// Adjacent level pairs where f grows by more than `tol` relative.
inline std::vector<MonotonicityViolation> monotonicity_check(const SublevelProfile& profile, double tol) {
  if (profile.levels.size() < 2) throw Error(Errc::InvalidArgument, "monotonicity check needs two or more levels");
  std::vector<MonotonicityViolation> out;
  const auto& lv = profile.levels;
  for (std::size_t i = 0; i + 1 < lv.size(); ++i) {
    const double inc = (lv[i + 1].f - lv[i].f) / lv[i].f;
    if (inc > tol) out.push_back({i, lv[i].t, lv[i + 1].t, inc});
  }
  return out;
}

inline std::vector<double> isoperimetric_deficit(const SublevelProfile& profile) {
  std::vector<double> out;
  out.reserve(profile.levels.size());
  for (const auto& l : profile.levels) out.push_back(l.sigma * l.sigma - 4.0 * pi * l.volume);
  return out;
}

struct CoareaResidual {
  double t = 0.0;
  double absolute = 0.0;  // |dVol/dt - integral of dsigma / |grad G||
  double relative = 0.0;  // absolute / integral
  bool interior = false;  // central difference available
};

inline std::vector<CoareaResidual> coarea_residual(const SublevelProfile& profile) {
  std::vector<CoareaResidual> out;
  const std::size_t n = profile.levels.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = profile.levels[i];
    CoareaResidual c;
    c.t = l.t;
    c.absolute = std::abs(l.dvol_dt - l.inverse_flux);
    c.relative = c.absolute / l.inverse_flux;
    c.interior = i > 0 && i + 1 < n;
    out.push_back(c);
  }
  return out;
}

}  // namespace capkit
