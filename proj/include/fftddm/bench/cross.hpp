#pragma once

// Cross-shaped benchmark: horizontal bar [0,7L]x[2L,6L] joined with vertical
// bar [L,3L]x[0,7L], split into a centre rectangle and four arms. Outer walls
// are homogeneous Dirichlet, arm flanks are homogeneous Neumann.
//
// Node lines sit half a spacing inside every wall and interface, so with
// Δ = L/k_n each rectangle of extent a×b carries (a/Δ)×(b/Δ) nodes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "fftddm/error.hpp"
#include "fftddm/geometry.hpp"

namespace fftddm::bench {

enum class CrossConstants {
  /// (A3, B3) derived from the endpoint constraints; satisfies every wall BC.
  Corrected,
  /// A3 = -π/(56L³), B3 = -π/(28L³): p does not vanish at x = 7L, y = 7L.
  PaperLiteral,
};

struct PsiCoeffs {
  double A1 = 0, A2 = 0, A3 = 0;
  double B1 = 0, B2 = 0, B3 = 0;
};

/// Subdomain ids of the cross composite.
enum CrossPart : int { kCenter = 0, kWest = 1, kEast = 2, kSouth = 3, kNorth = 4 };

struct CrossCase {
  double L = 1.0 / 7.0;
  int kn = 1;
  double kappa = 0.0;
  CrossConstants constants = CrossConstants::Corrected;
  PsiCoeffs psi;
  CompositeDomain composite;
};

/// Coefficients of ψ(t) = t[C1 + C2(t-a) + C3(t-a)(t-b)] taking the values
/// v0, v1, v2 at t = a, b, c (Newton divided differences of ψ(t)/t).
inline std::array<double, 3> newton_coefficients(double a, double b, double c, double v0, double v1, double v2) {
  const double g0 = v0 / a;
  const double g1 = v1 / b;
  const double g2 = v2 / c;
  const double c1 = g0;
  const double c2 = (g1 - c1) / (b - a);
  const double c3 = (g2 - c1 - c2 * (c - a)) / ((c - a) * (c - b));
  return {c1, c2, c3};
}

inline PsiCoeffs cross_coefficients(double L, CrossConstants which) {
  const double pi = std::numbers::pi;
  const auto x = newton_coefficients(L, 3 * L, 7 * L, pi / 2, 3 * pi / 2, 3 * pi);
  const auto y = newton_coefficients(2 * L, 6 * L, 7 * L, pi / 2, 3 * pi / 2, 2 * pi);
  PsiCoeffs c{x[0], x[1], x[2], y[0], y[1], y[2]};
  if (which == CrossConstants::PaperLiteral) {
    c.A3 = -pi / (56 * L * L * L);
    c.B3 = -pi / (28 * L * L * L);
  }
  return c;
}

inline CompositeDomain build_cross_composite(double L, int kn, double kappa) {
  if (kn < 1) throw InvalidArgument("k_n must be >= 1");
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("L must be positive");
  const double h = L / kn;
  const auto k = static_cast<std::size_t>(kn);
  using BK = BoundaryKind;
  auto rect = [&](int id, double x0, double y0, std::size_t m, std::size_t n, BK w, BK e, BK s, BK nn) {
    RectSubdomain r;
    r.id = id;
    r.x0 = x0;
    r.y0 = y0;
    r.m = m;
    r.n = n;
    r.dx = h;
    r.dy = h;
    r.kappa = kappa;
    r.edge_bc = {w, e, s, nn};
    return r;
  };
  std::vector<RectSubdomain> subs{
      rect(kCenter, L, 2 * L, 2 * k, 4 * k, BK::Interface, BK::Interface, BK::Interface, BK::Interface),
      rect(kWest, 0.0, 2 * L, k, 4 * k, BK::DirichletFace, BK::Interface, BK::Neumann, BK::Neumann),
      rect(kEast, 3 * L, 2 * L, 4 * k, 4 * k, BK::Interface, BK::DirichletFace, BK::Neumann, BK::Neumann),
      rect(kSouth, L, 0.0, 2 * k, 2 * k, BK::Neumann, BK::Neumann, BK::DirichletFace, BK::Interface),
      rect(kNorth, L, 6 * L, 2 * k, k, BK::Neumann, BK::Neumann, BK::Interface, BK::DirichletFace),
  };
  std::vector<Interface> itfs{
      make_interface(0, subs[kWest], Edge::East, subs[kCenter], Edge::West),
      make_interface(1, subs[kCenter], Edge::East, subs[kEast], Edge::West),
      make_interface(2, subs[kSouth], Edge::North, subs[kCenter], Edge::South),
      make_interface(3, subs[kCenter], Edge::North, subs[kNorth], Edge::South),
  };
  return CompositeDomain(std::move(subs), std::move(itfs));
}

inline CrossCase build_cross(double L, int kn, double kappa = 0.0,
                             CrossConstants constants = CrossConstants::Corrected) {
  CrossCase c;
  c.L = L;
  c.kn = kn;
  c.kappa = kappa;
  c.constants = constants;
  c.psi = cross_coefficients(L, constants);
  c.composite = build_cross_composite(L, kn, kappa);
  return c;
}

namespace detail {

struct Poly {
  double c1, c2, c3;  // ψ(t) = c1 t + c2 t² + c3 t³
  double value(double t) const { return t * (c1 + t * (c2 + t * c3)); }
  double d1(double t) const { return c1 + t * (2 * c2 + 3 * c3 * t); }
  double d2(double t) const { return 2 * c2 + 6 * c3 * t; }
};

inline Poly expand(double C1, double C2, double C3, double a, double b) {
  return {C1 - C2 * a + C3 * a * b, C2 - C3 * (a + b), C3};
}

inline Poly psi_x(const CrossCase& c) { return expand(c.psi.A1, c.psi.A2, c.psi.A3, c.L, 3 * c.L); }
inline Poly psi_y(const CrossCase& c) { return expand(c.psi.B1, c.psi.B2, c.psi.B3, 2 * c.L, 6 * c.L); }

}  // namespace detail

inline double psi_x(const CrossCase& c, double x) { return detail::psi_x(c).value(x); }
inline double psi_y(const CrossCase& c, double y) { return detail::psi_y(c).value(y); }

inline bool inside_cross(const CrossCase& c, double x, double y) {
  const double L = c.L;
  const double eps = 1e-12 * L;
  const bool bar = x >= -eps && x <= 7 * L + eps && y >= 2 * L - eps && y <= 6 * L + eps;
  const bool column = x >= L - eps && x <= 3 * L + eps && y >= -eps && y <= 7 * L + eps;
  return bar || column;
}

namespace detail {
inline void require_inside(const CrossCase& c, double x, double y) {
  if (!inside_cross(c, x, y)) {
    throw InvalidArgument("point (" + std::to_string(x) + ", " + std::to_string(y) + ") lies outside the cross");
  }
}
}  // namespace detail

/// p = sin ψx(x) sin ψy(y)
inline double manufactured_solution(const CrossCase& c, double x, double y) {
  detail::require_inside(c, x, y);
  return std::sin(psi_x(c, x)) * std::sin(psi_y(c, y));
}

/// f = Δp + κp
inline double manufactured_rhs(const CrossCase& c, double x, double y) {
  detail::require_inside(c, x, y);
  const auto px = detail::psi_x(c);
  const auto py = detail::psi_y(c);
  const double ax = px.value(x), ay = py.value(y);
  const double sx = std::sin(ax), cx = std::cos(ax);
  const double sy = std::sin(ay), cy = std::cos(ay);
  const double gx = px.d1(x), gy = py.d1(y);
  const double pxx = (px.d2(x) * cx - gx * gx * sx) * sy;
  const double pyy = sx * (py.d2(y) * cy - gy * gy * sy);
  return pxx + pyy + c.kappa * sx * sy;
}

/// (∂p/∂x, ∂p/∂y)
inline std::array<double, 2> manufactured_gradient(const CrossCase& c, double x, double y) {
  detail::require_inside(c, x, y);
  const auto px = detail::psi_x(c);
  const auto py = detail::psi_y(c);
  const double ax = px.value(x), ay = py.value(y);
  return {px.d1(x) * std::cos(ax) * std::sin(ay), std::sin(ax) * py.d1(y) * std::cos(ay)};
}

/// Samples fn(x, y) at every node, one field per subdomain.
template <class Fn>
std::vector<GridField> sample_nodes(const CompositeDomain& comp, Fn fn) {
  std::vector<GridField> out;
  for (const auto& s : comp.subdomains()) {
    GridField g = GridField::zeros(s);
    for (std::size_t i = 1; i <= s.m; ++i) {
      for (std::size_t j = 1; j <= s.n; ++j) g.values[linear_index(s, i, j)] = fn(s.node_x(i), s.node_y(j));
    }
    out.push_back(std::move(g));
  }
  return out;
}

struct BoundaryResiduals {
  double dirichlet = 0.0;  // max |p| on Dirichlet walls
  double neumann = 0.0;    // max |∂p/∂n| on Neumann walls
  std::size_t points = 0;
};

/// Evaluates the manufactured solution's boundary conditions at the wall
/// point facing every boundary-adjacent node.
inline BoundaryResiduals boundary_residuals(const CrossCase& c) {
  BoundaryResiduals r;
  for (const auto& s : c.composite.subdomains()) {
    for (Edge e : kAllEdges) {
      const BoundaryKind kind = s.bc(e);
      if (kind == BoundaryKind::Interface || kind == BoundaryKind::Periodic) continue;
      const bool vertical = normal_axis(e) == Axis::X;
      const double wall = e == Edge::West    ? s.x0
                          : e == Edge::East  ? s.x0 + s.extent_x()
                          : e == Edge::South ? s.y0
                                             : s.y0 + s.extent_y();
      const std::size_t count = vertical ? s.n : s.m;
      for (std::size_t t = 1; t <= count; ++t) {
        const double x = vertical ? wall : s.node_x(t);
        const double y = vertical ? s.node_y(t) : wall;
        ++r.points;
        if (kind == BoundaryKind::Neumann) {
          const auto g = manufactured_gradient(c, x, y);
          r.neumann = std::max(r.neumann, std::abs(vertical ? g[0] : g[1]));
        } else {
          r.dirichlet = std::max(r.dirichlet, std::abs(manufactured_solution(c, x, y)));
        }
      }
    }
  }
  return r;
}

}  // namespace fftddm::bench
