#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "capkit/geometry.hpp"
#include "capkit/numerics.hpp"

namespace capkit::contour {

// One piece of a level curve: the quadratic arc through a, m, b (m is the
// projected midpoint). Oriented so the sublevel region lies on the left.
struct Piece {
  cplx a, m, b;
};

struct Integrals {
  double area = 0.0;             // (1/2) closed-contour integral of x dy - y dx
  double length = 0.0;           // integral of dsigma
  double flux = 0.0;             // integral of |grad f| dsigma
  double inverse_flux = 0.0;     // integral of dsigma / |grad f|
  Box bbox = Box::empty();
};

namespace detail {

// Newton steps along the gradient onto {f = level}; falls back to the
// starting point if the iteration wanders off by more than `max_move`.
template <class Value, class Gradient>
cplx project(const Value& value, const Gradient& gradient, double level, cplx z, double max_move) {
  const cplx start = z;
  for (int it = 0; it < 12; ++it) {
    const double v = value(z) - level;
    const cplx g = gradient(z);
    const double n2 = std::norm(g);
    if (!std::isfinite(v) || !(n2 > 0.0) || !std::isfinite(n2)) return start;
    const cplx step = (v / n2) * g;
    z -= step;
    if (std::abs(z - start) > max_move) return start;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

}  // namespace detail

// Marching squares on an (n+1) x (n+1) node grid over `box`, linear edge
// interpolation, then every vertex is projected onto the exact level set.
// Pieces with any vertex failing `keep` are dropped (spurious curves of the
// continued function outside the domain).
//
// Only a narrow band is evaluated: block corners every `block` nodes are
// sign-tested, blocks with a sign change are flagged and dilated by one
// block, and fine nodes are evaluated inside flagged blocks only. A curve
// component that fits inside one unflagged block would be missed; callers
// zoom the box so the curve spans many blocks.
template <class Value, class Gradient, class Keep>
std::vector<Piece> extract(const Value& value, const Gradient& gradient, const Keep& keep, double level,
                           const Box& box, int n) {
  const int stride = n + 1;
  const double hx = box.width() / n, hy = box.height() / n;
  const double clamp = 1e3;
  const double unset = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> grid(static_cast<std::size_t>(stride) * stride, unset);
  auto node = [&](int i, int j) { return cplx(box.xmin + i * hx, box.ymin + j * hy); };
  auto at = [&](int i, int j) {
    double& g = grid[j * stride + i];
    if (std::isnan(g)) {
      double v = value(node(i, j)) - level;
      if (std::isnan(v)) v = clamp;
      g = std::clamp(v, -clamp, clamp);
    }
    return g;
  };

  const int block = n >= 64 ? 4 : 1;
  const int nb = (n + block - 1) / block;
  auto corner = [&](int b) { return std::min(b * block, n); };
  std::vector<char> crossed(static_cast<std::size_t>(nb) * nb, 0), flagged(crossed.size(), 0);
  for (int bj = 0; bj < nb; ++bj) {
    for (int bi = 0; bi < nb; ++bi) {
      const bool s0 = at(corner(bi), corner(bj)) < 0.0, s1 = at(corner(bi + 1), corner(bj)) < 0.0;
      const bool s2 = at(corner(bi + 1), corner(bj + 1)) < 0.0, s3 = at(corner(bi), corner(bj + 1)) < 0.0;
      crossed[bj * nb + bi] = !(s0 == s1 && s1 == s2 && s2 == s3);
    }
  }
  for (int bj = 0; bj < nb; ++bj)
    for (int bi = 0; bi < nb; ++bi) {
      if (!crossed[bj * nb + bi]) continue;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int ci = bi + di, cj = bj + dj;
          if (ci >= 0 && cj >= 0 && ci < nb && cj < nb) flagged[cj * nb + ci] = 1;
        }
    }

  // Edge points are always interpolated from the lower-index node so that
  // neighbouring cells produce bit-identical shared vertices.
  auto interp = [&](int i0, int j0, int i1, int j1) {
    const double v0 = at(i0, j0), v1 = at(i1, j1);
    const double s = v0 / (v0 - v1);
    return node(i0, j0) + s * (node(i1, j1) - node(i0, j0));
  };

  const double max_move = 2.0 * std::max(hx, hy);
  std::vector<Piece> pieces;
  auto emit = [&](cplx p, cplx q) {
    const cplx pa = detail::project(value, gradient, level, p, max_move);
    const cplx pb = detail::project(value, gradient, level, q, max_move);
    if (pa == pb) return;
    const cplx pm = detail::project(value, gradient, level, 0.5 * (pa + pb), max_move);
    if (!keep(pa) || !keep(pb) || !keep(pm)) return;
    // The sublevel region lies along -grad; put it on the left.
    const cplx left = cplx(0.0, 1.0) * (pb - pa);
    if (numerics::dot(left, -gradient(pm)) >= 0.0) pieces.push_back({pa, pm, pb});
    else pieces.push_back({pb, pm, pa});
  };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (!flagged[(j / block) * nb + i / block]) continue;
      const bool b00 = at(i, j) < 0.0, b10 = at(i + 1, j) < 0.0;
      const bool b11 = at(i + 1, j + 1) < 0.0, b01 = at(i, j + 1) < 0.0;
      const int code = b00 | (b10 << 1) | (b11 << 2) | (b01 << 3);
      if (code == 0 || code == 15) continue;
      // Edges: 0 bottom, 1 right, 2 top, 3 left.
      auto edge = [&](int e) {
        switch (e) {
          case 0: return interp(i, j, i + 1, j);
          case 1: return interp(i + 1, j, i + 1, j + 1);
          case 2: return interp(i, j + 1, i + 1, j + 1);
          default: return interp(i, j, i, j + 1);
        }
      };
      if (code == 5 || code == 10) {
        const double centre = 0.25 * (at(i, j) + at(i + 1, j) + at(i + 1, j + 1) + at(i, j + 1));
        const bool joined = (centre < 0.0) == (code == 5);
        if (joined) {
          emit(edge(0), edge(1));
          emit(edge(2), edge(3));
        } else {
          emit(edge(3), edge(0));
          emit(edge(1), edge(2));
        }
        continue;
      }
      std::array<int, 2> hit{};
      int k = 0;
      if (b00 != b10) hit[k++] = 0;
      if (b10 != b11) hit[k++] = 1;
      if (b01 != b11) hit[k++] = 2;
      if (b00 != b01) hit[k++] = 3;
      emit(edge(hit[0]), edge(hit[1]));
    }
  }
  return pieces;
}

// Area, length and gradient-weighted line integrals over the pieces:
// Simpson (exact for the quadratic arcs) for the area, three-point Gauss
// for the arc-length integrals.
template <class Gradient>
Integrals integrate(const std::vector<Piece>& pieces, const Gradient& gradient, cplx origin) {
  static constexpr double gx[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
  static constexpr double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  Integrals out;
  for (const Piece& p : pieces) {
    const cplx a = p.a - origin, m = p.m - origin, b = p.b - origin;
    auto pos = [&](double u) {
      return a * (2.0 * (u - 0.5) * (u - 1.0)) + m * (-4.0 * u * (u - 1.0)) + b * (2.0 * u * (u - 0.5));
    };
    auto vel = [&](double u) { return a * (4.0 * u - 3.0) + m * (4.0 - 8.0 * u) + b * (4.0 * u - 1.0); };
    auto w = [&](double u) { return 0.5 * (std::conj(pos(u)) * vel(u)).imag(); };
    out.area += (w(0.0) + 4.0 * w(0.5) + w(1.0)) / 6.0;
    for (int q = 0; q < 3; ++q) {
      const double speed = std::abs(vel(gx[q]));
      const double grad = std::abs(gradient(pos(gx[q]) + origin));
      out.length += gw[q] * speed;
      out.flux += gw[q] * speed * grad;
      out.inverse_flux += gw[q] * speed / grad;
    }
    out.bbox.expand(p.a);
    out.bbox.expand(p.m);
    out.bbox.expand(p.b);
  }
  return out;
}

}  // namespace capkit::contour
