#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "capkit/contour.hpp"
#include "capkit/error.hpp"
#include "capkit/geometry.hpp"
#include "capkit/numerics.hpp"

namespace capkit {

struct SolverConfig {
  int collocation_nodes = 256;   // per boundary component
  double source_offset = 0.3;    // source distance / equivalent radius of the component
  int validation_nodes = 512;    // per boundary component, disjoint from collocation
  int level_grid = 256;          // marching-squares cells per side
  int mc_samples = 20000;
  std::uint64_t seed = 1;
  double defect_tolerance = 1e-7;
  double equality_tolerance = 1e-6;

  void validate() const {
    if (collocation_nodes < 8 || validation_nodes < 8 || level_grid < 8 || mc_samples < 1)
      throw Error(Errc::InvalidArgument, "solver counts must be positive (node counts >= 8)");
    if (!(source_offset > 0.0 && source_offset <= 1.0))
      throw Error(Errc::InvalidArgument, "source offset factor must lie in (0, 1]");
    if (!(defect_tolerance > 0.0) || !(equality_tolerance > 0.0))
      throw Error(Errc::InvalidArgument, "tolerances must be positive");
  }
};

// h(z) = constant + sum_j charges[j] * log|z - sources[j]|, sources outside
// the closed domain.
struct SourceExpansion {
  std::vector<cplx> sources;
  std::vector<double> charges;
  double constant = 0.0;
};

// Exact Green's function of a disc.
struct DiscClosedForm {
  cplx center;
  double radius = 1.0;
};

struct SolveDiagnostics {
  double residual = 0.0;               // max |G| on validation nodes
  double residual_near_corners = 0.0;  // polygon nodes close to a vertex
  std::size_t collocation_count = 0;
  std::size_t source_count = 0;
};

// G(z) = log|z - pole| + h(z) with h harmonic on the domain.
class GreenSolution {
 public:
  using Representation = std::variant<SourceExpansion, DiscClosedForm>;

  GreenSolution(PlanarDomain domain, cplx pole, Representation rep, SolveDiagnostics diag)
      : domain_(std::move(domain)), pole_(pole), rep_(std::move(rep)), diag_(diag) {}

  const PlanarDomain& domain() const { return domain_; }
  cplx pole() const { return pole_; }
  const Representation& representation() const { return rep_; }
  const SolveDiagnostics& diagnostics() const { return diag_; }

  // Max boundary defect; by the maximum principle it also bounds |h - h_exact|.
  double residual() const { return std::max(diag_.residual, diag_.residual_near_corners); }

  double evaluate(cplx z) const {
    if (z == pole_) throw Error(Errc::PoleEvaluation, "Green's function evaluated at its pole");
    if (!domain_.contains(z)) throw Error(Errc::PointOutsideDomain, "evaluate: point not in domain");
    return value(z);
  }

  // Unchecked evaluation of the (continued) representation; -inf at the pole.
  double value(cplx z) const noexcept {
    if (z == pole_) return -std::numeric_limits<double>::infinity();
    if (auto* d = std::get_if<DiscClosedForm>(&rep_)) {
      const double r2 = d->radius * d->radius;
      return std::log(d->radius * std::abs(z - pole_) / std::abs(r2 - (z - d->center) * std::conj(pole_ - d->center)));
    }
    return 0.5 * std::log(std::norm(z - pole_)) + correction(z);
  }

  double correction(cplx z) const noexcept {
    if (auto* d = std::get_if<DiscClosedForm>(&rep_)) {
      const double r2 = d->radius * d->radius;
      return std::log(d->radius) - std::log(std::abs(r2 - (z - d->center) * std::conj(pole_ - d->center)));
    }
    const auto& s = std::get<SourceExpansion>(rep_);
    double h = 0.0;
    for (std::size_t j = 0; j < s.sources.size(); ++j) h += s.charges[j] * std::log(std::norm(z - s.sources[j]));
    return s.constant + 0.5 * h;
  }

  // Exact gradient (as the complex number G_x + i G_y).
  cplx gradient(cplx z) const noexcept {
    cplx g = 1.0 / std::conj(z - pole_);
    if (auto* d = std::get_if<DiscClosedForm>(&rep_)) {
      const cplx denom = d->radius * d->radius - (z - d->center) * std::conj(pole_ - d->center);
      return g + (pole_ - d->center) / std::conj(denom);
    }
    const auto& s = std::get<SourceExpansion>(rep_);
    for (std::size_t j = 0; j < s.sources.size(); ++j) g += s.charges[j] / std::conj(z - s.sources[j]);
    return g;
  }

 private:
  PlanarDomain domain_;
  cplx pole_;
  Representation rep_;
  SolveDiagnostics diag_;
};

namespace detail {

// Mirror images of the pole across nearby boundary pieces. They absorb the
// sharp peak of the boundary data when the pole sits close to the boundary.
inline std::vector<cplx> image_sources(const PlanarDomain& domain, cplx pole, double reach) {
  std::vector<cplx> images;
  const double d = domain.distance_to_boundary(pole);
  auto accept = [&](cplx p) {
    if (!domain.contains(p) && domain.distance_to_boundary(p) > 0.25 * d) images.push_back(p);
  };
  auto reflect = [](cplx z, cplx a, cplx b) {
    const cplx u = (b - a) / std::abs(b - a);
    return a + u * u * std::conj(z - a);
  };
  if (auto* poly = std::get_if<Polygon>(&domain.shape())) {
    const auto& v = poly->vertices;
    const std::size_t n = v.size();
    std::vector<bool> near(n, false);
    for (std::size_t e = 0; e < n; ++e) {
      near[e] = numerics::segment_distance(pole, v[e], v[(e + 1) % n]).first < reach;
      if (near[e]) accept(reflect(pole, v[e], v[(e + 1) % n]));
    }
    for (std::size_t e = 0; e < n; ++e) {
      const std::size_t f = (e + 1) % n;
      if (near[e] && near[f]) accept(reflect(reflect(pole, v[e], v[f]), v[f], v[(f + 1) % n]));
    }
    return images;
  }
  // Circles have an exact image: the inversion of the pole.
  auto invert = [&](cplx c, double r) {
    if (std::abs(std::abs(pole - c) - r) < reach) accept(c + r * r / std::conj(pole - c));
  };
  if (auto* disc = std::get_if<Disc>(&domain.shape())) {
    invert(disc->center, disc->radius);
  } else if (auto* an = std::get_if<Annulus>(&domain.shape())) {
    invert(an->center, an->outer);
    if (pole != an->center) invert(an->center, an->inner);
  } else if (d < reach) {
    accept(2.0 * domain.closest_boundary_point(pole) - pole);
  }
  return images;
}

}  // namespace detail

// Method of fundamental solutions: h is a superposition of logarithmic
// sources on an outward offset of each boundary component (plus mirror
// images of the pole), charges fitted by least squares to h = -log|z - pole|
// on the collocation nodes, then checked on a disjoint validation set.
inline GreenSolution solve(const PlanarDomain& domain, cplx pole, const SolverConfig& config) {
  config.validate();
  if (!domain.contains(pole)) throw Error(Errc::PoleOutsideDomain, "pole must lie strictly inside the domain");

  const auto& lengths = domain.component_lengths();
  auto nodes = domain.boundary_sample(config.collocation_nodes, 0.5);
  const auto base = domain.boundary_sample(std::max(8, config.collocation_nodes / 2), 0.0);

  std::vector<cplx> sources;
  for (const auto& s : base) {
    const double offset = config.source_offset * lengths[s.component] / two_pi;
    const cplx p = s.point + offset * s.normal;
    if (!domain.contains(p) && domain.distance_to_boundary(p) >= 0.5 * offset) sources.push_back(p);
  }
  const double reach = config.source_offset * lengths[0] / two_pi;
  for (cplx p : detail::image_sources(domain, pole, reach)) sources.push_back(p);

  // Near a curved boundary without an exact image, the data -log|z - pole|
  // peaks on a stretch of width ~d: add dense nodes there and sources whose
  // offset grows with the distance from the pole.
  std::vector<BoundarySample> local_check;
  const double d = domain.distance_to_boundary(pole);
  const bool curved = std::holds_alternative<Ellipse>(domain.shape()) || std::holds_alternative<FourierCurve>(domain.shape());
  if (curved && d < reach) {
    const cplx foot = domain.closest_boundary_point(pole);
    const double window = 12.0 * d;
    const int refine = std::clamp(static_cast<int>(std::ceil(16.0 * lengths[0] / (config.collocation_nodes * d))), 1, 1024);
    const int dense = config.collocation_nodes * refine;
    auto near = [&](const BoundarySample& s) { return std::abs(s.point - foot) < window; };
    for (const auto& s : domain.boundary_sample(dense, 0.5))
      if (near(s)) nodes.push_back(s);
    cplx last = foot + 2.0 * window;
    for (const auto& s : domain.boundary_sample(dense, 0.0)) {
      if (!near(s)) continue;
      const double offset = 0.25 * std::abs(s.point - pole);
      if (std::abs(s.point - last) < 0.25 * offset) continue;
      const cplx p = s.point + offset * s.normal;
      if (!domain.contains(p) && domain.distance_to_boundary(p) >= 0.5 * offset) {
        sources.push_back(p);
        last = s.point;
      }
    }
    for (const auto& s : domain.boundary_sample(dense, 0.25))
      if (near(s)) local_check.push_back(s);
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(nodes.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(sources.size()) + 1;
  if (rows < cols) throw Error(Errc::SolveFailed, "fewer collocation nodes than unknowns; raise node count");
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const cplx z = nodes[i].point;
    a(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < cols; ++j) a(i, j) = 0.5 * std::log(std::norm(z - sources[j - 1]));
    rhs(i) = -0.5 * std::log(std::norm(z - pole));
  }
  // Column equilibration before the rank-revealing QR.
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (!(scale(j) > 0.0)) scale(j) = 1.0;
    a.col(j) /= scale(j);
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(rhs).cwiseQuotient(scale);
  if (!x.allFinite()) throw Error(Errc::SolveFailed, "least-squares solve produced non-finite charges");

  SourceExpansion rep;
  rep.constant = x(0);
  rep.sources = std::move(sources);
  rep.charges.assign(x.data() + 1, x.data() + cols);

  SolveDiagnostics diag;
  diag.collocation_count = nodes.size();
  diag.source_count = rep.sources.size();
  GreenSolution trial(domain, pole, rep, diag);

  auto check = domain.boundary_sample(config.validation_nodes, 0.25);
  check.insert(check.end(), local_check.begin(), local_check.end());
  const auto* poly = std::get_if<Polygon>(&domain.shape());
  for (const auto& s : check) {
    const double defect = std::abs(trial.value(s.point));
    bool near_corner = false;
    if (poly) {
      for (cplx v : poly->vertices) near_corner |= std::abs(s.point - v) < 0.02 * domain.diameter();
    }
    double& slot = near_corner ? diag.residual_near_corners : diag.residual;
    slot = std::max(slot, std::isfinite(defect) ? defect : std::numeric_limits<double>::infinity());
  }
  if (!(diag.residual <= config.defect_tolerance)) {
    throw Error(Errc::SolveFailed, "boundary defect " + numerics::format17(diag.residual) +
                                       " exceeds tolerance " + numerics::format17(config.defect_tolerance) +
                                       "; raise the collocation node count");
  }
  return GreenSolution(domain, pole, std::move(rep), diag);
}

// Closed-form Green's function of the disc |z - center| < radius:
// G_p(z) = log | R (z - p) / (R^2 - (z - a) conj(p - a)) |.
inline GreenSolution disc_oracle(cplx center, double radius, cplx pole) {
  PlanarDomain domain = PlanarDomain::disc(center, radius);
  if (!domain.contains(pole)) throw Error(Errc::PoleOutsideDomain, "pole must lie strictly inside the disc");
  return GreenSolution(std::move(domain), pole, DiscClosedForm{center, radius}, SolveDiagnostics{});
}

// c(z0) = exp h(z0).
inline double capacity_robin(const GreenSolution& sol) { return std::exp(sol.correction(sol.pole())); }

// Mean-value estimator c = exp(mean of G on |z - z0| = R, minus log R),
// trapezoidal rule refined until the mean stops changing.
inline double capacity_circle_mean(const GreenSolution& sol, double radius) {
  const double delta = sol.domain().boundary_distance(sol.pole());
  if (!(radius > 0.0)) throw Error(Errc::InvalidArgument, "circle radius must be positive");
  if (radius >= delta) throw Error(Errc::RadiusTooLarge, "circle radius must be below the pole's boundary distance");
  auto mean = [&](int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = sol.value(sol.pole() + std::polar(radius, two_pi * k / n));
    return numerics::pairwise_sum(v) / n;
  };
  int n = 64;
  double prev = mean(n);
  while (n < (1 << 16)) {
    n *= 2;
    const double next = mean(n);
    const bool done = std::abs(next - prev) <= 1e-15 * (1.0 + std::abs(next));
    prev = next;
    if (done) break;
  }
  return std::exp(prev - std::log(radius));
}

// Largest value of G over `count` uniformly drawn interior points.
inline double max_interior_value(const GreenSolution& sol, int count, std::uint64_t seed) {
  std::mt19937_64 rng(numerics::split_seed(seed, 0x6e6567));
  const Box box = sol.domain().bounding_box();
  std::uniform_real_distribution<double> ux(box.xmin, box.xmax), uy(box.ymin, box.ymax);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < count;) {
    const cplx z(ux(rng), uy(rng));
    if (!sol.domain().contains(z) || z == sol.pole()) continue;
    worst = std::max(worst, sol.value(z));
    ++k;
  }
  return worst;
}

struct LevelRecord {
  double t = 0.0;
  double volume = 0.0;            // Vol(D_t)
  double volume_tolerance = 0.0;  // |V(n) - V(n/2)|, widened when Monte Carlo disagrees
  double sigma = 0.0;             // level-curve length
  double flux = 0.0;              // integral of |grad G| dsigma
  double inverse_flux = 0.0;      // integral of dsigma / |grad G|
  double f = 0.0;                 // pi e^{2t} / Vol(D_t)
  double dvol_dt = std::numeric_limits<double>::quiet_NaN();
  double vol_mc = 0.0;
  double vol_mc_stderr = 0.0;
  bool reliable = true;           // grid and Monte Carlo volumes agree
  std::size_t pieces = 0;
};

struct SublevelProfile {
  cplx pole;
  std::vector<LevelRecord> levels;
  int grid_resolution = 0;
  int mc_samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {

struct LevelContour {
  std::vector<contour::Piece> pieces;
  Box box;
};

inline LevelContour locate_level(const GreenSolution& sol, double t, int n) {
  const PlanarDomain& domain = sol.domain();
  auto value = [&](cplx z) { return sol.value(z); };
  auto grad = [&](cplx z) { return sol.gradient(z); };
  auto keep = [&](cplx z) { return domain.contains(z); };
  const int coarse = std::max(32, n / 4);
  const Box domain_box = domain.bounding_box().padded(0.01 * domain.diameter());

  Box box = domain_box;
  auto pieces = contour::extract(value, grad, keep, t, box, coarse);
  if (pieces.empty()) {
    // Sublevel set smaller than a coarse cell: D_t is close to the disc of
    // radius e^t / c(z0) about the pole.
    const double radius = std::exp(t) / capacity_robin(sol);
    if (!(radius > 1e-9 * domain.diameter()))
      throw Error(Errc::ContourNotFound, "level " + numerics::format17(t) + " too negative to resolve");
    box = Box::around(sol.pole(), 4.0 * radius).intersect(domain_box);
    pieces = contour::extract(value, grad, keep, t, box, coarse);
    if (pieces.empty())
      throw Error(Errc::ContourNotFound, "no level curve found at t = " + numerics::format17(t));
  }
  // Zoom until the curve spans a decent share of the grid.
  for (int pass = 0; pass < 8; ++pass) {
    Box found = Box::empty();
    for (const auto& p : pieces) {
      found.expand(p.a);
      found.expand(p.b);
      found.expand(p.m);
    }
    const double cell = std::max(box.width(), box.height()) / coarse;
    const Box next = found.padded(2.0 * cell + 0.05 * std::max(found.width(), found.height()));
    if (std::max(next.width(), next.height()) > 0.5 * std::max(box.width(), box.height())) {
      box = next;
      break;
    }
    box = next;
    pieces = contour::extract(value, grad, keep, t, box, coarse);
    if (pieces.empty()) throw Error(Errc::ContourNotFound, "level curve lost while refining the grid");
  }
  return {contour::extract(value, grad, keep, t, box, n), box};
}

}  // namespace detail

// Per-level volume (oriented contour integral), level-curve length, flux and
// the co-area integrand, with a seeded Monte Carlo volume cross-check and
// finite-difference dVol/dt across the level grid.
inline SublevelProfile sublevel_profile(const GreenSolution& sol, const std::vector<double>& levels,
                                        const SolverConfig& config) {
  config.validate();
  if (levels.empty()) throw Error(Errc::InvalidArgument, "at least one level required");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] < 0.0)) throw Error(Errc::InvalidArgument, "levels must be negative");
    if (i > 0 && !(levels[i] > levels[i - 1])) throw Error(Errc::InvalidArgument, "levels must be strictly increasing");
  }
  const PlanarDomain& domain = sol.domain();
  auto grad = [&](cplx z) { return sol.gradient(z); };
  auto value = [&](cplx z) { return sol.value(z); };
  auto keep = [&](cplx z) { return domain.contains(z); };

  SublevelProfile profile;
  profile.pole = sol.pole();
  profile.grid_resolution = config.level_grid;
  profile.mc_samples = config.mc_samples;
  profile.seed = config.seed;

  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double t = levels[k];
    const auto located = detail::locate_level(sol, t, config.level_grid);
    const cplx origin = sol.pole();
    const auto fine = contour::integrate(located.pieces, grad, origin);
    const auto half_pieces = contour::extract(value, grad, keep, t, located.box, std::max(4, config.level_grid / 2));
    const auto half = contour::integrate(half_pieces, grad, origin);

    LevelRecord rec;
    rec.t = t;
    rec.volume = fine.area;
    rec.volume_tolerance = std::abs(fine.area - half.area);
    rec.sigma = fine.length;
    rec.flux = fine.flux;
    rec.inverse_flux = fine.inverse_flux;
    rec.f = pi * std::exp(2.0 * t) / fine.area;
    rec.pieces = located.pieces.size();

    // Monte Carlo over the contour's bounding box; one child stream per level.
    const Box box = fine.bbox.intersect(located.box);
    std::mt19937_64 rng(numerics::split_seed(config.seed, k));
    std::uniform_real_distribution<double> ux(box.xmin, box.xmax), uy(box.ymin, box.ymax);
    std::int64_t hits = 0;
    for (int s = 0; s < config.mc_samples; ++s) {
      const cplx z(ux(rng), uy(rng));
      if (domain.contains(z) && sol.value(z) < t) ++hits;
    }
    const double p = static_cast<double>(hits) / config.mc_samples;
    rec.vol_mc = p * box.area();
    rec.vol_mc_stderr = box.area() * std::sqrt(std::max(p * (1.0 - p), 1.0 / config.mc_samples) / config.mc_samples);
    const double disagreement = std::abs(rec.volume - rec.vol_mc);
    rec.reliable = disagreement <= 3.0 * std::hypot(rec.vol_mc_stderr, rec.volume_tolerance);
    // The sampled volume is independent of the grid; when the two disagree,
    // the grid-halving estimate missed part of the error.
    if (!rec.reliable) rec.volume_tolerance = disagreement + 3.0 * rec.vol_mc_stderr;
    profile.levels.push_back(rec);
  }

  // dVol/dt from the (up to) five nearest levels, centred where possible.
  auto& lv = profile.levels;
  const std::size_t n = lv.size();
  if (n >= 2) {
    const std::size_t width = std::min<std::size_t>(5, n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t start = std::min(i > width / 2 ? i - width / 2 : 0, n - width);
      std::vector<double> ts, vs;
      for (std::size_t k = start; k < start + width; ++k) {
        ts.push_back(lv[k].t);
        vs.push_back(lv[k].volume);
      }
      const auto w = numerics::derivative_weights(lv[i].t, ts);
      double d = 0.0;
      for (std::size_t k = 0; k < width; ++k) d += w[k] * vs[k];
      lv[i].dvol_dt = d;
    }
  }
  return profile;
}

}  // namespace capkit
