#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "capkit/bergman.hpp"
#include "capkit/error.hpp"
#include "capkit/geometry.hpp"

namespace capkit {

namespace detail {

inline double factorial(int n) { return std::tgamma(n + 1.0); }

// pi^n / n! * r^{2n}: Euclidean volume of a radius-r ball in R^{2n}.
inline double ball_volume(int n, double r) { return std::pow(pi, n) / factorial(n) * std::pow(r, 2 * n); }

}  // namespace detail

// Bergman kernel on the diagonal, closed form for both kinds.
inline double kernel_at(const MultiDomain& domain, const std::vector<cplx>& z) {
  if (!domain.contains(z)) throw Error(Errc::PointOutsideDomain, "kernel: point not in domain");
  return std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) return ball_kernel(s.center, s.radius, z);
        else return polydisc_kernel(s.center, s.radii, z);
      },
      domain.shape());
}

// n! / (pi^n delta^{2n}) - K(z): the kernel of the inscribed ball about z
// minus the domain's kernel. Nonnegative; zero only for a ball centred at z.
inline double lemma_de_gap(const MultiDomain& domain, const std::vector<cplx>& z) {
  const double delta = domain.boundary_distance(z);
  const int n = domain.dimension();
  return detail::factorial(n) / (std::pow(pi, n) * std::pow(delta, 2 * n)) - kernel_at(domain, z);
}

struct IndicatrixResult {
  int n = 1;
  std::vector<cplx> z;
  double volume = 0.0;  // Vol(I^A(z)) in R^{2n}
  double bound = 0.0;   // pi^n / n! * delta^{2n}
  double gap = 0.0;     // volume - bound
};

// Azukawa indicatrix volume where the pluricomplex Green's function is
// explicit: the indicatrix of a ball or polydisc about its own centre is the
// domain translated to the origin.
inline IndicatrixResult azukawa_volume(const MultiDomain& domain, const std::vector<cplx>& z) {
  if (!domain.contains(z)) throw Error(Errc::PointOutsideDomain, "indicatrix: point not in domain");
  if (z != domain.center())
    throw Error(Errc::NoClosedForm, "indicatrix volume is implemented only at the centre of a ball or polydisc");
  IndicatrixResult r;
  r.n = domain.dimension();
  r.z = z;
  r.volume = std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return detail::ball_volume(r.n, s.radius);
        } else {
          double v = 1.0;
          for (double radius : s.radii) v *= pi * radius * radius;
          return v;
        }
      },
      domain.shape());
  r.bound = detail::ball_volume(r.n, domain.boundary_distance(z));
  r.gap = r.volume - r.bound;
  return r;
}

// K(z) - 1 / Vol(I^A(z)), nonnegative.
inline double bz_lower_bound_gap(const MultiDomain& domain, const std::vector<cplx>& z) {
  const auto ind = azukawa_volume(domain, z);
  return kernel_at(domain, z) - 1.0 / ind.volume;
}

// Vol(I^A(z)) - pi^n / n! * delta^{2n}, nonnegative; zero exactly on balls
// about z.
inline double delta_c_gap(const MultiDomain& domain, const std::vector<cplx>& z) {
  return azukawa_volume(domain, z).gap;
}

}  // namespace capkit
