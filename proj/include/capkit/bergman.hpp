#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "capkit/error.hpp"
#include "capkit/geometry.hpp"
#include "capkit/numerics.hpp"

namespace capkit {

// Positive weights on strictly interior nodes realizing the L^2(D) inner
// product.
struct QuadratureRule {
  std::vector<cplx> nodes;
  std::vector<double> weights;
  int resolution = 0;
  std::string scheme;               // "polar", "log-polar", "elliptic", "triangle", "star", "masked"
  double declared_tolerance = 0.0;  // relative error bound on the weight sum

  double weight_sum() const { return numerics::pairwise_sum(weights); }
};

namespace detail {

inline void polar_rule(QuadratureRule& q, cplx center, double r0, double r1, int n_angle, int n_radial,
                       bool log_radial) {
  const auto g = log_radial ? numerics::gauss_legendre(n_radial, std::log(r0), std::log(r1))
                            : numerics::gauss_legendre(n_radial, r0, r1);
  const double dth = two_pi / n_angle;
  for (int i = 0; i < n_radial; ++i) {
    const double r = log_radial ? std::exp(g.nodes[i]) : g.nodes[i];
    const double jac = log_radial ? r * r : r;
    for (int k = 0; k < n_angle; ++k) {
      q.nodes.push_back(center + std::polar(r, dth * (k + 0.5)));
      q.weights.push_back(g.weights[i] * jac * dth);
    }
  }
}

// Ear clipping of a simple counterclockwise polygon.
inline std::vector<std::array<cplx, 3>> triangulate(const std::vector<cplx>& poly) {
  std::vector<std::array<cplx, 3>> tris;
  std::vector<std::size_t> idx(poly.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  auto inside_tri = [](cplx p, cplx a, cplx b, cplx c) {
    return numerics::cross(b - a, p - a) >= 0.0 && numerics::cross(c - b, p - b) >= 0.0 &&
           numerics::cross(a - c, p - c) >= 0.0;
  };
  std::size_t guard = 0;
  while (idx.size() > 3 && guard++ < 10 * poly.size() * poly.size()) {
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const std::size_t ip = idx[(i + idx.size() - 1) % idx.size()], ic = idx[i], in = idx[(i + 1) % idx.size()];
      const cplx a = poly[ip], b = poly[ic], c = poly[in];
      if (numerics::cross(b - a, c - b) <= 0.0) continue;  // reflex or degenerate
      bool ear = true;
      for (std::size_t j : idx) {
        if (j == ip || j == ic || j == in) continue;
        if (inside_tri(poly[j], a, b, c)) { ear = false; break; }
      }
      if (!ear) continue;
      tris.push_back({a, b, c});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) throw Error(Errc::InvalidDomain, "polygon triangulation failed");
  }
  tris.push_back({poly[idx[0]], poly[idx[1]], poly[idx[2]]});
  return tris;
}

}  // namespace detail

// Tensor-product rules per domain kind: Gauss radial x trapezoidal angular
// for discs and ellipses (log-radial on annuli), collapsed Gauss on an ear
// triangulation for polygons, a radial star map for star-shaped Fourier
// curves, and the masked cell-centre grid otherwise.
inline QuadratureRule build_quadrature(const PlanarDomain& domain, int resolution) {
  if (resolution < 8) throw Error(Errc::ResolutionTooLow, "quadrature resolution must be at least 8");
  QuadratureRule q;
  q.resolution = resolution;
  q.declared_tolerance = 1e-12;
  const int n_radial = std::max(2, resolution / 4);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disc>) {
          q.scheme = "polar";
          detail::polar_rule(q, s.center, 0.0, s.radius, resolution, n_radial, false);
        } else if constexpr (std::is_same_v<T, Annulus>) {
          q.scheme = "log-polar";
          detail::polar_rule(q, s.center, s.inner, s.outer, resolution, n_radial, true);
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          q.scheme = "elliptic";
          detail::polar_rule(q, 0.0, 0.0, 1.0, resolution, n_radial, false);
          const cplx rot = std::polar(1.0, s.angle);
          for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            q.nodes[i] = s.center + rot * cplx(s.a * q.nodes[i].real(), s.b * q.nodes[i].imag());
            q.weights[i] *= s.a * s.b;
          }
        } else if constexpr (std::is_same_v<T, Polygon>) {
          q.scheme = "triangle";
          const auto g = numerics::gauss_legendre(n_radial, 0.0, 1.0);
          for (const auto& tri : detail::triangulate(s.vertices)) {
            const cplx a = tri[0], b = tri[1], c = tri[2];
            const double jac = std::abs(numerics::cross(b - a, c - b));
            for (int i = 0; i < n_radial; ++i) {
              for (int j = 0; j < n_radial; ++j) {
                const double u = g.nodes[i], v = g.nodes[j];
                q.nodes.push_back(a + u * (b - a) + u * v * (c - b));
                q.weights.push_back(g.weights[i] * g.weights[j] * u * jac);
              }
            }
          }
        } else {
          const cplx c0 = s.coefficients[s.order()];
          bool star = domain.contains(c0);
          for (int k = 0; star && k < 4096; ++k) {
            const double th = two_pi * k / 4096;
            star = numerics::cross(s.eval(th) - c0, s.derivative(th)) > 0.0;
          }
          if (star) {
            q.scheme = "star";
            const auto g = numerics::gauss_legendre(n_radial, 0.0, 1.0);
            const double dth = two_pi / resolution;
            for (int i = 0; i < n_radial; ++i) {
              for (int k = 0; k < resolution; ++k) {
                const double th = dth * (k + 0.5);
                const cplx rim = s.eval(th) - c0;
                q.nodes.push_back(c0 + g.nodes[i] * rim);
                q.weights.push_back(g.weights[i] * g.nodes[i] * numerics::cross(rim, s.derivative(th)) * dth);
              }
            }
            return;
          }
          q.scheme = "masked";
          const Box box = domain.bounding_box();
          const double hx = box.width() / resolution, hy = box.height() / resolution;
          for (int j = 0; j < resolution; ++j) {
            for (int i = 0; i < resolution; ++i) {
              const cplx z(box.xmin + (i + 0.5) * hx, box.ymin + (j + 0.5) * hy);
              if (!domain.contains(z)) continue;
              q.nodes.push_back(z);
              q.weights.push_back(hx * hy);
            }
          }
          const double h = std::max(hx, hy);
          q.declared_tolerance = domain.component_lengths()[0] * h / domain.area();
        }
      },
      domain.shape());
  if (q.nodes.size() < 100) throw Error(Errc::ResolutionTooLow, "quadrature rule has fewer than 100 interior nodes");
  return q;
}

// One step of the multiply-and-reorthogonalize recurrence:
//   phi_k = (op(z) phi_source - sum_j coeffs[j] phi_j) / norm,
// with op(z) = 1 (k = 0 only), z - center, or 1 / (z - hole_center).
struct BasisStep {
  enum Op { Constant = 0, MultiplyShift = 1, DivideHole = 2 };
  Op op = Constant;
  int source = 0;
  int degree = 0;
  std::vector<cplx> coeffs;
  double norm = 1.0;
};

struct KernelEstimate {
  double value = 0.0;        // K_N(z)
  double previous = 0.0;     // K_{N-2}(z)
  double relative_change = 0.0;
  double tolerance = 0.0;    // relative error estimate (increment plus geometric tail)
  bool converged = false;    // relative_change < 1e-4
};

class BergmanModel {
 public:
  BergmanModel(PlanarDomain domain, cplx center, std::optional<cplx> hole, int degree, std::vector<BasisStep> steps,
               double gram_defect, std::string scheme, int resolution, std::size_t node_count, double weight_sum)
      : domain_(std::move(domain)),
        center_(center),
        hole_(hole),
        degree_(degree),
        steps_(std::move(steps)),
        gram_defect_(gram_defect),
        scheme_(std::move(scheme)),
        resolution_(resolution),
        node_count_(node_count),
        weight_sum_(weight_sum) {}

  const PlanarDomain& domain() const { return domain_; }
  cplx center() const { return center_; }
  std::optional<cplx> hole_center() const { return hole_; }
  int degree() const { return degree_; }
  const std::vector<BasisStep>& steps() const { return steps_; }
  double gram_defect() const { return gram_defect_; }
  const std::string& quadrature_scheme() const { return scheme_; }
  int quadrature_resolution() const { return resolution_; }
  std::size_t quadrature_nodes() const { return node_count_; }
  double quadrature_weight_sum() const { return weight_sum_; }

  std::vector<cplx> basis_at(cplx z) const {
    std::vector<cplx> v(steps_.size());
    for (std::size_t k = 0; k < steps_.size(); ++k) {
      const BasisStep& s = steps_[k];
      cplx acc;
      switch (s.op) {
        case BasisStep::Constant: acc = 1.0; break;
        case BasisStep::MultiplyShift: acc = (z - center_) * v[s.source]; break;
        case BasisStep::DivideHole: acc = v[s.source] / (z - *hole_); break;
      }
      for (std::size_t j = 0; j < s.coeffs.size(); ++j) acc -= s.coeffs[j] * v[j];
      v[k] = acc / s.norm;
    }
    return v;
  }

  // K_M(z) for every M <= N (index M).
  std::vector<double> kernel_by_degree(cplx z) const {
    const auto v = basis_at(z);
    std::vector<double> out(degree_ + 1, 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) out[steps_[k].degree] += std::norm(v[k]);
    for (int m = 1; m <= degree_; ++m) out[m] += out[m - 1];
    return out;
  }

  double kernel_at(cplx z) const {
    if (!domain_.contains(z)) throw Error(Errc::PointOutsideDomain, "kernel_at: point not in domain");
    return kernel_by_degree(z).back();
  }

  // K_N with the K_N vs K_{N-2} convergence certificate. The tolerance is
  // the last four-degree increment plus its geometric extrapolation; four
  // steps span the symmetry periods where odd or even degrees contribute
  // nothing at a given point.
  KernelEstimate estimate(cplx z) const {
    if (!domain_.contains(z)) throw Error(Errc::PointOutsideDomain, "kernel_at: point not in domain");
    const auto k = kernel_by_degree(z);
    KernelEstimate e;
    e.value = k.back();
    e.previous = degree_ >= 2 ? k[degree_ - 2] : 0.0;
    e.relative_change = (e.value - e.previous) / e.value;
    e.converged = e.relative_change < 1e-4;
    double increment = e.value - (degree_ >= 4 ? k[degree_ - 4] : 0.0);
    double tail = increment * std::max(degree_, 1);
    if (degree_ >= 12) {
      // Largest observed block ratio; irregular early blocks make this
      // conservative rather than optimistic.
      const double b1 = k[degree_ - 4] - k[degree_ - 8], b2 = k[degree_ - 8] - k[degree_ - 12];
      const double ratio = std::max(b1 > 0.0 ? increment / b1 : 1.0, b2 > 0.0 ? b1 / b2 : 1.0);
      if (ratio < 0.8) tail = increment * ratio / (1.0 - ratio);
      // Near corners the increments come in slow waves whose troughs mimic
      // convergence; the growth over the upper half of the degrees spans a
      // full wave.
      tail = std::max(tail, e.value - k[degree_ / 2] - increment);
    }
    e.tolerance = std::max((increment + tail) / e.value, 1e-12 + gram_defect_);
    return e;
  }

  // Monomial coefficients of each basis function in powers of (z - center);
  // simply connected models only.
  std::vector<std::vector<cplx>> monomial_coefficients() const {
    if (hole_) throw Error(Errc::InvalidArgument, "monomial expansion undefined for Laurent bases");
    std::vector<std::vector<cplx>> c(steps_.size());
    for (std::size_t k = 0; k < steps_.size(); ++k) {
      const BasisStep& s = steps_[k];
      std::vector<cplx> acc(k + 1, 0.0);
      if (s.op == BasisStep::Constant) {
        acc[0] = 1.0;
      } else {
        for (std::size_t i = 0; i < c[s.source].size(); ++i) acc[i + 1] += c[s.source][i];
      }
      for (std::size_t j = 0; j < s.coeffs.size(); ++j)
        for (std::size_t i = 0; i < c[j].size(); ++i) acc[i] -= s.coeffs[j] * c[j][i];
      for (auto& a : acc) a /= s.norm;
      c[k] = std::move(acc);
    }
    return c;
  }

 private:
  PlanarDomain domain_;
  cplx center_;
  std::optional<cplx> hole_;
  int degree_;
  std::vector<BasisStep> steps_;
  double gram_defect_;
  std::string scheme_;
  int resolution_;
  std::size_t node_count_;
  double weight_sum_;
};

// Orthonormalizes {(w - center)^k}_{k<=N} (plus (w - hole)^{-k} on the
// annulus) by Arnoldi-style recurrence against the quadrature inner product:
// each new vector is the previous one of its family times the shift,
// orthogonalized twice against everything so far.
inline BergmanModel build_model(const PlanarDomain& domain, cplx center, int degree, const QuadratureRule& rule) {
  if (degree < 0) throw Error(Errc::InvalidArgument, "degree must be non-negative");
  if (!domain.contains(center)) throw Error(Errc::PointOutsideDomain, "expansion center must lie inside the domain");
  const std::optional<cplx> hole = domain.hole_center();
  const std::size_t m = rule.nodes.size();
  const auto& w = rule.weights;

  auto inner = [&](const std::vector<cplx>& f, const std::vector<cplx>& g) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w[i] * f[i] * std::conj(g[i]);
    return s;
  };
  auto norm_of = [&](const std::vector<cplx>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w[i] * std::norm(f[i]);
    return std::sqrt(s);
  };

  std::vector<std::vector<cplx>> q;
  std::vector<BasisStep> steps;

  {
    BasisStep s;
    s.norm = std::sqrt(rule.weight_sum());
    steps.push_back(s);
    q.emplace_back(m, cplx(1.0 / s.norm));
  }

  auto extend = [&](BasisStep::Op op, int source, int deg) {
    std::vector<cplx> v(m);
    for (std::size_t i = 0; i < m; ++i)
      v[i] = op == BasisStep::MultiplyShift ? (rule.nodes[i] - center) * q[source][i]
                                            : q[source][i] / (rule.nodes[i] - *hole);
    const double before = norm_of(v);
    std::vector<cplx> h(q.size(), 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < q.size(); ++j) {
        const cplx c = inner(v, q[j]);
        h[j] += c;
        for (std::size_t i = 0; i < m; ++i) v[i] -= c * q[j][i];
      }
    }
    const double nv = norm_of(v);
    if (!(nv > 1e-13 * before))
      throw Error(Errc::BasisDegenerate, "basis vector vanished after orthogonalization; degree too high for resolution");
    for (auto& x : v) x /= nv;
    BasisStep s;
    s.op = op;
    s.source = source;
    s.degree = deg;
    s.coeffs = std::move(h);
    s.norm = nv;
    steps.push_back(std::move(s));
    q.push_back(std::move(v));
    return static_cast<int>(q.size()) - 1;
  };

  int last_pos = 0, last_neg = 0;
  for (int k = 1; k <= degree; ++k) {
    last_pos = extend(BasisStep::MultiplyShift, last_pos, k);
    if (hole) last_neg = extend(BasisStep::DivideHole, last_neg, k);
  }

  double defect = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      defect = std::max(defect, std::abs(inner(q[i], q[j]) - (i == j ? 1.0 : 0.0)));
  if (defect > 1e-8)
    throw Error(Errc::BasisDegenerate, "Gram defect " + numerics::format17(defect) + " above 1e-8");

  return BergmanModel(domain, center, hole, degree, std::move(steps), defect, rule.scheme, rule.resolution,
                      rule.nodes.size(), rule.weight_sum());
}

// Bergman kernel on the diagonal of the ball B^n(center; r):
// n! r^2 / (pi^n (r^2 - |z - center|^2)^{n+1}).
inline double ball_kernel(const std::vector<cplx>& center, double radius, const std::vector<cplx>& z) {
  if (center.size() != z.size() || center.empty()) throw Error(Errc::InvalidArgument, "dimension mismatch");
  double d2 = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) d2 += std::norm(z[i] - center[i]);
  const double r2 = radius * radius;
  if (!(d2 < r2)) throw Error(Errc::PointOutsideDomain, "ball_kernel: point not in ball");
  const int n = static_cast<int>(z.size());
  return std::tgamma(n + 1.0) * r2 / (std::pow(pi, n) * std::pow(r2 - d2, n + 1));
}

// Product of one-dimensional disc kernels.
inline double polydisc_kernel(const std::vector<cplx>& center, const std::vector<double>& radii,
                              const std::vector<cplx>& z) {
  if (center.size() != z.size() || radii.size() != z.size() || z.empty())
    throw Error(Errc::InvalidArgument, "dimension mismatch");
  double k = 1.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r2 = radii[i] * radii[i], d2 = std::norm(z[i] - center[i]);
    if (!(d2 < r2)) throw Error(Errc::PointOutsideDomain, "polydisc_kernel: point not in polydisc");
    k *= r2 / (pi * (r2 - d2) * (r2 - d2));
  }
  return k;
}

}  // namespace capkit
