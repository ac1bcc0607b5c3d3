#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "capkit/error.hpp"
#include "capkit/numerics.hpp"

namespace capkit {

struct Disc {
  cplx center;
  double radius = 1.0;
};

struct Annulus {
  cplx center;
  double inner = 0.5;
  double outer = 1.0;
};

// Semi-axes a >= b > 0; angle rotates the a-axis counterclockwise from +x.
struct Ellipse {
  cplx center;
  double a = 1.0;
  double b = 1.0;
  double angle = 0.0;
};

// Counterclockwise, simple, at least three vertices.
struct Polygon {
  std::vector<cplx> vertices;
};

// Boundary gamma(theta) = sum_{k=-m}^{m} coefficients[k + m] e^{i k theta},
// traversed counterclockwise.
struct FourierCurve {
  std::vector<cplx> coefficients;

  int order() const { return static_cast<int>(coefficients.size() / 2); }

  cplx eval(double theta) const {
    const int m = order();
    cplx sum = 0.0;
    for (int k = -m; k <= m; ++k) sum += coefficients[k + m] * std::polar(1.0, k * theta);
    return sum;
  }

  cplx derivative(double theta) const {
    const int m = order();
    cplx sum = 0.0;
    for (int k = -m; k <= m; ++k)
      sum += coefficients[k + m] * cplx(0.0, k) * std::polar(1.0, k * theta);
    return sum;
  }
};

struct BoundarySample {
  cplx point;
  cplx normal;    // outward unit normal
  double weight;  // arc-length weight
  int component;  // 0 = outer boundary, 1 = inner (annulus only)
};

struct Box {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  cplx center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }

  Box padded(double margin) const {
    return {xmin - margin, xmax + margin, ymin - margin, ymax + margin};
  }

  Box intersect(const Box& o) const {
    return {std::max(xmin, o.xmin), std::min(xmax, o.xmax), std::max(ymin, o.ymin),
            std::min(ymax, o.ymax)};
  }

  void expand(cplx z) {
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, z.imag());
    ymax = std::max(ymax, z.imag());
  }

  static Box around(cplx c, double half) {
    return {c.real() - half, c.real() + half, c.imag() - half, c.imag() + half};
  }

  static Box empty() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {inf, -inf, inf, -inf};
  }
};

namespace detail {

// Closest point on the axis-aligned ellipse (x/e0)^2 + (y/e1)^2 = 1 to
// (y0, y1) in the first quadrant, e0 >= e1 > 0. Robust bisection on the
// Lagrange multiplier equation.
inline std::pair<double, double> ellipse_closest_first_quadrant(double e0, double e1, double y0,
                                                                double y1) {
  auto get_root = [](double r0, double z0, double z1, double g) {
    const double n0 = r0 * z0;
    double s0 = z1 - 1.0;
    double s1 = (g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0);
    double s = 0.0;
    for (int i = 0; i < 1100; ++i) {
      s = 0.5 * (s0 + s1);
      if (s == s0 || s == s1) break;
      const double ratio0 = n0 / (s + r0), ratio1 = z1 / (s + 1.0);
      g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
      if (g > 0.0) s0 = s;
      else if (g < 0.0) s1 = s;
      else break;
    }
    return s;
  };

  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0, z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g == 0.0) return {y0, y1};
      const double r0 = (e0 / e1) * (e0 / e1);
      const double sbar = get_root(r0, z0, z1, g);
      return {r0 * y0 / (sbar + r0), y1 / (sbar + 1.0)};
    }
    return {0.0, e1};
  }
  const double numer0 = e0 * y0, denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    return {e0 * xde0, e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0))};
  }
  return {e0, 0.0};
}

inline double polyline_signed_area(const std::vector<cplx>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    s += numerics::cross(pts[i], pts[(i + 1) % pts.size()]);
  return 0.5 * s;
}

inline bool polyline_is_simple(const std::vector<cplx>& pts) {
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = pts[i], b = pts[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the wrap
      const cplx c = pts[j], d = pts[(j + 1) % n];
      // Cheap bounding-box rejection before the exact orientation test.
      if (std::max(a.real(), b.real()) < std::min(c.real(), d.real()) ||
          std::max(c.real(), d.real()) < std::min(a.real(), b.real()) ||
          std::max(a.imag(), b.imag()) < std::min(c.imag(), d.imag()) ||
          std::max(c.imag(), d.imag()) < std::min(a.imag(), b.imag()))
        continue;
      if (numerics::segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

// Even-odd crossing test against a closed polyline.
inline bool polyline_encloses(const std::vector<cplx>& pts, cplx z) {
  bool inside = false;
  const std::size_t n = pts.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const cplx a = pts[i], b = pts[j];
    if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
      const double x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (z.real() < x) inside = !inside;
    }
  }
  return inside;
}

// Closed-polyline segments bucketed by their y-range, so crossing tests and
// short-range distance queries touch only nearby segments.
class SegmentBins {
 public:
  SegmentBins() = default;
  SegmentBins(const std::vector<cplx>& pts, int count) : bins_(count) {
    y0_ = pts[0].imag();
    double y1 = y0_;
    for (cplx p : pts) {
      y0_ = std::min(y0_, p.imag());
      y1 = std::max(y1, p.imag());
    }
    dy_ = (y1 - y0_) / count;
    if (!(dy_ > 0.0)) dy_ = 1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const cplx a = pts[i], b = pts[(i + 1) % pts.size()];
      const int lo = bin(std::min(a.imag(), b.imag())), hi = bin(std::max(a.imag(), b.imag()));
      for (int k = lo; k <= hi; ++k) bins_[k].push_back(static_cast<std::uint32_t>(i));
    }
  }

  // Same even-odd rule as polyline_encloses, restricted to z's bucket.
  bool encloses(const std::vector<cplx>& pts, cplx z) const {
    if (bins_.empty() || z.imag() < y0_ || z.imag() > y0_ + dy_ * bins_.size()) return false;
    bool inside = false;
    for (std::uint32_t i : bins_[bin(z.imag())]) {
      const cplx a = pts[(i + 1) % pts.size()], b = pts[i];
      if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
        const double x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
        if (z.real() < x) inside = !inside;
      }
    }
    return inside;
  }

  // Distance to the nearest segment if below `radius`, otherwise `radius`.
  double min_distance(const std::vector<cplx>& pts, cplx z, double radius) const {
    double best = radius;
    if (bins_.empty()) return best;
    const int lo = bin(z.imag() - radius), hi = bin(z.imag() + radius);
    for (int k = lo; k <= hi; ++k)
      for (std::uint32_t i : bins_[k])
        best = std::min(best, numerics::segment_distance(z, pts[i], pts[(i + 1) % pts.size()]).first);
    return best;
  }

 private:
  int bin(double y) const {
    const int k = static_cast<int>(std::floor((y - y0_) / dy_));
    return std::clamp(k, 0, static_cast<int>(bins_.size()) - 1);
  }

  double y0_ = 0.0, dy_ = 1.0;
  std::vector<std::vector<std::uint32_t>> bins_;
};

// Algebraic clustering toward both ends of [0, 1].
inline double graded(double u) {
  const double p = u * u, q = (1.0 - u) * (1.0 - u);
  return p / (p + q);
}

}  // namespace detail

// Bounded planar domain. Boundary points count as outside (open domain).
class PlanarDomain {
 public:
  using Shape = std::variant<Disc, Annulus, Ellipse, Polygon, FourierCurve>;

  // Refinement of the dense polyline proxy used by Fourier-curve membership,
  // distance and simplicity checks.
  static constexpr int kDefaultProxy = 4096;

  explicit PlanarDomain(Shape shape, int proxy_refinement = kDefaultProxy)
      : shape_(std::move(shape)) {
    validate(proxy_refinement);
  }

  static PlanarDomain disc(cplx center, double radius) { return PlanarDomain(Disc{center, radius}); }
  static PlanarDomain annulus(cplx center, double inner, double outer) {
    return PlanarDomain(Annulus{center, inner, outer});
  }
  static PlanarDomain ellipse(cplx center, double a, double b, double angle = 0.0) {
    return PlanarDomain(Ellipse{center, a, b, angle});
  }
  static PlanarDomain polygon(std::vector<cplx> vertices) {
    return PlanarDomain(Polygon{std::move(vertices)});
  }
  static PlanarDomain fourier(std::vector<cplx> coefficients) {
    return PlanarDomain(FourierCurve{std::move(coefficients)});
  }

  const Shape& shape() const { return shape_; }

  std::string_view kind() const {
    static constexpr std::string_view names[] = {"disc", "annulus", "ellipse", "polygon", "fourier"};
    return names[shape_.index()];
  }

  int component_count() const { return std::holds_alternative<Annulus>(shape_) ? 2 : 1; }
  bool simply_connected() const { return component_count() == 1; }

  // Center of the bounded complementary component, if any.
  std::optional<cplx> hole_center() const {
    if (auto* an = std::get_if<Annulus>(&shape_)) return an->center;
    return std::nullopt;
  }

  // A representative interior point used as default expansion center.
  cplx center() const {
    return std::visit(
        [&](const auto& s) -> cplx {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Polygon>) {
            return polygon_centroid(s.vertices);
          } else if constexpr (std::is_same_v<T, FourierCurve>) {
            return s.coefficients[s.order()];
          } else {
            return s.center;
          }
        },
        shape_);
  }

  const Box& bounding_box() const { return box_; }
  double diameter() const { return diameter_; }
  const std::vector<double>& component_lengths() const { return lengths_; }

  bool contains(cplx z) const {
    return std::visit(
        [&](const auto& s) -> bool {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disc>) {
            return std::abs(z - s.center) < s.radius;
          } else if constexpr (std::is_same_v<T, Annulus>) {
            const double r = std::abs(z - s.center);
            return s.inner < r && r < s.outer;
          } else if constexpr (std::is_same_v<T, Ellipse>) {
            const cplx w = (z - s.center) * std::polar(1.0, -s.angle);
            const double x = w.real() / s.a, y = w.imag() / s.b;
            return x * x + y * y < 1.0;
          } else if constexpr (std::is_same_v<T, Polygon>) {
            if (!detail::polyline_encloses(s.vertices, z)) return false;
            return distance_to_boundary(z) > 4.0 * std::numeric_limits<double>::epsilon() * diameter_;
          } else {
            if (!proxy_index_.encloses(proxy_, z)) return false;
            // The refined distance only matters within a few chords of the curve.
            if (proxy_index_.min_distance(proxy_, z, 2.0 * chord_) >= 2.0 * chord_) return true;
            return distance_to_boundary(z) > 4.0 * std::numeric_limits<double>::epsilon() * diameter_;
          }
        },
        shape_);
  }

  // Unsigned Euclidean distance to the boundary, valid for any z.
  double distance_to_boundary(cplx z) const { return std::abs(z - closest_boundary_point(z)); }

  // Distance from an interior point to the boundary.
  double boundary_distance(cplx z) const {
    if (!contains(z)) throw Error(Errc::PointOutsideDomain, "boundary_distance: point not in domain");
    return distance_to_boundary(z);
  }

  cplx closest_boundary_point(cplx z) const {
    return std::visit(
        [&](const auto& s) -> cplx {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disc>) {
            const cplx d = z - s.center;
            const double r = std::abs(d);
            return s.center + (r > 0.0 ? d / r : cplx(1.0, 0.0)) * s.radius;
          } else if constexpr (std::is_same_v<T, Annulus>) {
            const cplx d = z - s.center;
            const double r = std::abs(d);
            const cplx u = r > 0.0 ? d / r : cplx(1.0, 0.0);
            const double target = std::abs(r - s.inner) < std::abs(r - s.outer) ? s.inner : s.outer;
            return s.center + u * target;
          } else if constexpr (std::is_same_v<T, Ellipse>) {
            const cplx rot = std::polar(1.0, s.angle);
            const cplx w = (z - s.center) / rot;
            auto [x, y] = detail::ellipse_closest_first_quadrant(s.a, s.b, std::abs(w.real()),
                                                                 std::abs(w.imag()));
            return s.center + rot * cplx(std::copysign(x, w.real()), std::copysign(y, w.imag()));
          } else if constexpr (std::is_same_v<T, Polygon>) {
            return closest_on_polyline(s.vertices, z).first;
          } else {
            return closest_on_fourier(s, z);
          }
        },
        shape_);
  }

  // Euclidean area: closed forms for the canonical kinds, shoelace for
  // polygons, and the exact boundary integral pi * sum k |c_k|^2 for
  // Fourier curves.
  double area() const {
    return std::visit(
        [&](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disc>) {
            return pi * s.radius * s.radius;
          } else if constexpr (std::is_same_v<T, Annulus>) {
            return pi * (s.outer * s.outer - s.inner * s.inner);
          } else if constexpr (std::is_same_v<T, Ellipse>) {
            return pi * s.a * s.b;
          } else if constexpr (std::is_same_v<T, Polygon>) {
            return detail::polyline_signed_area(s.vertices);
          } else {
            return fourier_area(s);
          }
        },
        shape_);
  }

  // `count` nodes per boundary component, ordered along each component with
  // the domain on the left. `phase` in [0, 1) shifts nodes by a fraction of
  // the parameter step (0.5 = cell midpoints); held-out validation sets use
  // other phases.
  std::vector<BoundarySample> boundary_sample(int count, double phase = 0.5) const {
    if (count < 8) throw Error(Errc::InvalidCount, "boundary_sample: need at least 8 nodes per component");
    std::vector<BoundarySample> out;
    out.reserve(static_cast<std::size_t>(count) * component_count());
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disc>) {
            sample_circle(out, s.center, s.radius, count, phase, false, 0);
          } else if constexpr (std::is_same_v<T, Annulus>) {
            sample_circle(out, s.center, s.outer, count, phase, false, 0);
            sample_circle(out, s.center, s.inner, count, phase, true, 1);
          } else if constexpr (std::is_same_v<T, Ellipse>) {
            const cplx rot = std::polar(1.0, s.angle);
            sample_parametric(
                out, count, phase,
                [&](double th) { return s.center + rot * cplx(s.a * std::cos(th), s.b * std::sin(th)); },
                [&](double th) { return rot * cplx(-s.a * std::sin(th), s.b * std::cos(th)); });
          } else if constexpr (std::is_same_v<T, Polygon>) {
            sample_polygon(out, s.vertices, count, phase);
          } else {
            sample_parametric(
                out, count, phase, [&](double th) { return s.eval(th); },
                [&](double th) { return s.derivative(th); });
          }
        },
        shape_);
    return out;
  }

 private:
  static cplx polygon_centroid(const std::vector<cplx>& v) {
    double a = 0.0;
    cplx c = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const cplx p = v[i], q = v[(i + 1) % v.size()];
      const double cr = numerics::cross(p, q);
      a += cr;
      c += (p + q) * cr;
    }
    return c / (3.0 * a);
  }

  static double fourier_area(const FourierCurve& s) {
    const int m = s.order();
    double sum = 0.0;
    for (int k = -m; k <= m; ++k) sum += k * std::norm(s.coefficients[k + m]);
    return pi * sum;
  }

  static std::pair<cplx, std::size_t> closest_on_polyline(const std::vector<cplx>& pts, cplx z) {
    double best = std::numeric_limits<double>::infinity();
    cplx point;
    std::size_t index = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const cplx a = pts[i], b = pts[(i + 1) % pts.size()];
      auto [d, u] = numerics::segment_distance(z, a, b);
      if (d < best) {
        best = d;
        point = a + u * (b - a);
        index = i;
      }
    }
    return {point, index};
  }

  // Polyline proxy locates the nearest arc; golden-section search on the
  // true parametrization polishes it.
  cplx closest_on_fourier(const FourierCurve& s, cplx z) const {
    const auto [proxy_point, index] = closest_on_polyline(proxy_, z);
    const double step = two_pi / static_cast<double>(proxy_.size());
    double lo = (static_cast<double>(index) - 1.0) * step, hi = (static_cast<double>(index) + 2.0) * step;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    auto dist = [&](double th) { return std::norm(s.eval(th) - z); };
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = dist(x1), f2 = dist(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        hi = x2; x2 = x1; f2 = f1;
        x1 = hi - g * (hi - lo); f1 = dist(x1);
      } else {
        lo = x1; x1 = x2; f1 = f2;
        x2 = lo + g * (hi - lo); f2 = dist(x2);
      }
    }
    const cplx refined = s.eval(0.5 * (lo + hi));
    return std::abs(refined - z) <= std::abs(proxy_point - z) ? refined : proxy_point;
  }

  static void sample_circle(std::vector<BoundarySample>& out, cplx c, double r, int n, double phase,
                            bool reversed, int component) {
    const double w = two_pi * r / n;
    for (int i = 0; i < n; ++i) {
      double th = two_pi * (i + phase) / n;
      if (reversed) th = -th;
      const cplx u = std::polar(1.0, th);
      out.push_back({c + r * u, reversed ? -u : u, w, component});
    }
  }

  // Trapezoidal sampling of a smooth periodic parametrization; spectrally
  // accurate for the arc-length sums.
  template <class Curve, class Deriv>
  static void sample_parametric(std::vector<BoundarySample>& out, int n, double phase, Curve curve,
                                Deriv deriv) {
    for (int i = 0; i < n; ++i) {
      const double th = two_pi * (i + phase) / n;
      const cplx d = deriv(th);
      const double speed = std::abs(d);
      out.push_back({curve(th), cplx(0.0, -1.0) * d / speed, speed * two_pi / n, 0});
    }
  }

  // Nodes graded toward the corners; weights are exact sub-segment lengths,
  // so each edge's weights sum to its length.
  static void sample_polygon(std::vector<BoundarySample>& out, const std::vector<cplx>& v, int count,
                             double phase) {
    const std::size_t ne = v.size();
    std::vector<double> len(ne);
    double perimeter = 0.0;
    for (std::size_t i = 0; i < ne; ++i) perimeter += len[i] = std::abs(v[(i + 1) % ne] - v[i]);
    // Largest-remainder apportionment with at least two nodes per edge.
    std::vector<int> per(ne, 2);
    int remaining = count - static_cast<int>(2 * ne);
    if (remaining > 0) {
      std::vector<std::pair<double, std::size_t>> rem;
      int assigned = 0;
      for (std::size_t i = 0; i < ne; ++i) {
        const double share = remaining * len[i] / perimeter;
        per[i] += static_cast<int>(share);
        assigned += static_cast<int>(share);
        rem.emplace_back(share - std::floor(share), i);
      }
      std::stable_sort(rem.begin(), rem.end(), [](auto& x, auto& y) { return x.first > y.first; });
      for (int k = 0; k < remaining - assigned; ++k) ++per[rem[k % ne].second];
    }
    for (std::size_t e = 0; e < ne; ++e) {
      const cplx a = v[e], b = v[(e + 1) % ne];
      const cplx tangent = (b - a) / len[e];
      const cplx normal = cplx(0.0, -1.0) * tangent;
      const int n = per[e];
      for (int i = 0; i < n; ++i) {
        const double s0 = detail::graded(static_cast<double>(i) / n);
        const double s1 = detail::graded(static_cast<double>(i + 1) / n);
        const double sm = detail::graded((i + phase) / n);
        out.push_back({a + sm * (b - a), normal, len[e] * (s1 - s0), 0});
      }
    }
  }

  void validate(int proxy_refinement) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disc>) {
            if (!(s.radius > 0.0) || !std::isfinite(s.radius))
              throw Error(Errc::InvalidDomain, "disc radius must be positive");
            box_ = Box::around(s.center, s.radius);
            diameter_ = 2.0 * s.radius;
            lengths_ = {two_pi * s.radius};
          } else if constexpr (std::is_same_v<T, Annulus>) {
            if (!(s.inner > 0.0 && s.inner < s.outer) || !std::isfinite(s.outer))
              throw Error(Errc::InvalidDomain, "annulus requires 0 < inner < outer");
            box_ = Box::around(s.center, s.outer);
            diameter_ = 2.0 * s.outer;
            lengths_ = {two_pi * s.outer, two_pi * s.inner};
          } else if constexpr (std::is_same_v<T, Ellipse>) {
            if (!(s.b > 0.0 && s.a >= s.b) || !std::isfinite(s.a) || !std::isfinite(s.angle))
              throw Error(Errc::InvalidDomain, "ellipse requires a >= b > 0");
            const double c = std::cos(s.angle), sn = std::sin(s.angle);
            const double hx = std::sqrt(s.a * s.a * c * c + s.b * s.b * sn * sn);
            const double hy = std::sqrt(s.a * s.a * sn * sn + s.b * s.b * c * c);
            box_ = {s.center.real() - hx, s.center.real() + hx, s.center.imag() - hy, s.center.imag() + hy};
            diameter_ = 2.0 * s.a;
            double perim = 0.0;
            constexpr int n = 4096;
            for (int i = 0; i < n; ++i) {
              const double th = two_pi * i / n;
              perim += std::hypot(s.a * std::sin(th), s.b * std::cos(th));
            }
            lengths_ = {perim * two_pi / n};
          } else if constexpr (std::is_same_v<T, Polygon>) {
            if (s.vertices.size() < 3) throw Error(Errc::InvalidDomain, "polygon needs at least 3 vertices");
            for (cplx p : s.vertices)
              if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
                throw Error(Errc::InvalidDomain, "polygon vertex not finite");
            if (!detail::polyline_is_simple(s.vertices))
              throw Error(Errc::InvalidDomain, "polygon is not simple");
            if (!(detail::polyline_signed_area(s.vertices) > 0.0))
              throw Error(Errc::InvalidDomain, "polygon must be counterclockwise with positive area");
            box_ = Box::empty();
            double perim = 0.0;
            for (std::size_t i = 0; i < s.vertices.size(); ++i) {
              box_.expand(s.vertices[i]);
              perim += std::abs(s.vertices[(i + 1) % s.vertices.size()] - s.vertices[i]);
            }
            diameter_ = point_set_diameter(s.vertices);
            lengths_ = {perim};
          } else {
            if (s.coefficients.size() < 3 || s.coefficients.size() % 2 == 0)
              throw Error(Errc::InvalidDomain, "fourier coefficients must be indexed -m..m with m >= 1");
            if (proxy_refinement < 64) throw Error(Errc::InvalidDomain, "proxy refinement too small");
            proxy_.resize(proxy_refinement);
            for (int i = 0; i < proxy_refinement; ++i) proxy_[i] = s.eval(two_pi * i / proxy_refinement);
            if (!(fourier_area(s) > 0.0))
              throw Error(Errc::InvalidDomain, "fourier curve must be counterclockwise with positive area");
            if (!detail::polyline_is_simple(proxy_))
              throw Error(Errc::InvalidDomain, "fourier curve is not simple");
            box_ = Box::empty();
            double perim = 0.0;
            for (int i = 0; i < proxy_refinement; ++i) {
              box_.expand(proxy_[i]);
              perim += std::abs(s.derivative(two_pi * i / proxy_refinement));
            }
            // Chords of the proxy undercut the curve by at most this much.
            const double length = perim * two_pi / proxy_refinement;
            const double chord = length / proxy_refinement;
            chord_ = chord;
            box_ = box_.padded(chord);
            proxy_index_ = detail::SegmentBins(proxy_, 256);
            std::vector<cplx> coarse;
            for (int i = 0; i < proxy_refinement; i += std::max(1, proxy_refinement / 1024)) coarse.push_back(proxy_[i]);
            diameter_ = point_set_diameter(coarse);
            lengths_ = {length};
          }
        },
        shape_);
  }

  static double point_set_diameter(const std::vector<cplx>& pts) {
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, std::abs(pts[i] - pts[j]));
    return d;
  }

  Shape shape_;
  std::vector<cplx> proxy_;
  detail::SegmentBins proxy_index_;
  double chord_ = 0.0;
  Box box_;
  double diameter_ = 0.0;
  std::vector<double> lengths_;
};

struct Ball {
  std::vector<cplx> center;
  double radius = 1.0;
};

struct Polydisc {
  std::vector<cplx> center;
  std::vector<double> radii;
};

// Closed-form domains in C^n.
class MultiDomain {
 public:
  using Shape = std::variant<Ball, Polydisc>;

  explicit MultiDomain(Shape shape) : shape_(std::move(shape)) {
    std::visit(
        [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if (s.center.empty()) throw Error(Errc::InvalidDomain, "dimension must be at least 1");
          if constexpr (std::is_same_v<T, Ball>) {
            if (!(s.radius > 0.0)) throw Error(Errc::InvalidDomain, "ball radius must be positive");
          } else {
            if (s.radii.size() != s.center.size())
              throw Error(Errc::InvalidDomain, "polydisc needs one radius per coordinate");
            for (double r : s.radii)
              if (!(r > 0.0)) throw Error(Errc::InvalidDomain, "polydisc radii must be positive");
          }
        },
        shape_);
  }

  static MultiDomain ball(std::vector<cplx> center, double radius) {
    return MultiDomain(Ball{std::move(center), radius});
  }
  static MultiDomain polydisc(std::vector<cplx> center, std::vector<double> radii) {
    return MultiDomain(Polydisc{std::move(center), std::move(radii)});
  }

  const Shape& shape() const { return shape_; }
  std::string_view kind() const { return shape_.index() == 0 ? "ball" : "polydisc"; }

  int dimension() const {
    return static_cast<int>(std::visit([](const auto& s) { return s.center.size(); }, shape_));
  }

  const std::vector<cplx>& center() const {
    return std::visit([](const auto& s) -> const std::vector<cplx>& { return s.center; }, shape_);
  }

  bool contains(const std::vector<cplx>& z) const {
    check_dimension(z);
    return std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Ball>) {
            return norm_diff(z, s.center) < s.radius;
          } else {
            for (std::size_t i = 0; i < z.size(); ++i)
              if (!(std::abs(z[i] - s.center[i]) < s.radii[i])) return false;
            return true;
          }
        },
        shape_);
  }

  double boundary_distance(const std::vector<cplx>& z) const {
    if (!contains(z)) throw Error(Errc::PointOutsideDomain, "boundary_distance: point not in domain");
    return std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Ball>) {
            return s.radius - norm_diff(z, s.center);
          } else {
            double d = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < z.size(); ++i) d = std::min(d, s.radii[i] - std::abs(z[i] - s.center[i]));
            return d;
          }
        },
        shape_);
  }

  static double norm_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
  }

 private:
  void check_dimension(const std::vector<cplx>& z) const {
    if (static_cast<int>(z.size()) != dimension())
      throw Error(Errc::InvalidArgument, "point dimension does not match domain");
  }

  Shape shape_;
};

}  // namespace capkit
