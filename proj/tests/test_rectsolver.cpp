#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fftddm/oracle.hpp"
#include "fftddm/rectsolver.hpp"

namespace fftddm {
namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

RectSubdomain rect(std::size_t m, std::size_t n, BoundaryKind w, BoundaryKind e, BoundaryKind s, BoundaryKind nn,
                   double kappa = 0.0, double dx = 1.0, double dy = 1.0) {
  RectSubdomain r;
  r.id = 7;
  r.m = m;
  r.n = n;
  r.dx = dx;
  r.dy = dy;
  r.kappa = kappa;
  r.edge_bc = {w, e, s, nn};
  return r;
}

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0, s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    d = std::max(d, std::abs(a[k] - b[k]));
    s = std::max(s, std::abs(b[k]));
  }
  return s > 0 ? d / s : d;
}

TEST(ThomasSolve, StandardThreeByThree) {
  const auto x = thomas_solve({-2, -2, -2}, 1.0, {1, 0, 0}, XSolverKind::Standard);
  EXPECT_NEAR(x[0], -0.75, 1e-15);
  EXPECT_NEAR(x[1], -0.5, 1e-15);
  EXPECT_NEAR(x[2], -0.25, 1e-15);
}

TEST(ThomasSolve, ZeroRhsGivesZero) {
  for (std::size_t m : {1u, 2u, 5u, 9u}) {
    for (auto kind : {XSolverKind::Standard, XSolverKind::CornerModified, XSolverKind::Cyclic}) {
      const auto x = thomas_solve(std::vector<double>(m, -3.0), 1.0, std::vector<double>(m, 0.0), kind);
      for (double v : x) EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(ThomasSolve, CyclicFourByFour) {
  const auto x = thomas_solve({-3, -3, -3, -3}, 1.0, {1, 1, 1, 1}, XSolverKind::Cyclic);
  for (double v : x) EXPECT_NEAR(v, -1.0, 1e-14);
}

TEST(ThomasSolve, CyclicMatchesDenseForRandomSystems) {
  for (std::size_t m : {2u, 3u, 4u, 7u, 12u}) {
    const auto d = random_vector(m, 5);
    std::vector<double> diag(m);
    for (std::size_t k = 0; k < m; ++k) diag[k] = -4.0 + d[k];
    const auto rhs = random_vector(m, 6);
    oracle::DenseMatrix a(m, m);
    for (std::size_t k = 0; k < m; ++k) {
      a(k, k) += diag[k];
      a(k, (k + 1) % m) += 0.9;
      a((k + 1) % m, k) += 0.9;
    }
    if (m == 1) continue;
    const auto ref = oracle::dense_lu_solve(a, rhs);
    EXPECT_LT(rel_diff(thomas_solve(diag, 0.9, rhs, XSolverKind::Cyclic), ref), 1e-13) << "m=" << m;
  }
}

TEST(ThomasSolve, SingularCirculantRejected) {
  EXPECT_THROW(thomas_solve({-2, -2, -2, -2}, 1.0, {1, 0, 0, 0}, XSolverKind::Cyclic), SingularError);
  EXPECT_THROW(thomas_solve({-1, -2, -1}, 1.0, {1, 0, 0}, XSolverKind::Standard), SingularError);
}

TEST(PlanRect, SingleNodeIsScalarEquation) {
  const auto s = rect(1, 1, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet,
                      BoundaryKind::Dirichlet);
  const auto plan = plan_rect(s);
  EXPECT_NEAR(plan.spectral_plan().eigenvalues()[0], -4.0, 1e-15);
  const auto p = solve_rect(plan, GridField{7, {2.0}});
  EXPECT_NEAR(p.values[0], -0.5, 1e-15);
}

TEST(PlanRect, NeumannArmUsesCornerModifiedThomas) {
  const auto s = rect(4, 6, BoundaryKind::Neumann, BoundaryKind::Neumann, BoundaryKind::Dirichlet,
                      BoundaryKind::Interface);
  const auto plan = plan_rect(s);
  EXPECT_EQ(plan.transform_axis(), Axis::Y);
  EXPECT_EQ(plan.x_solver_kind(), XSolverKind::CornerModified);
}

TEST(PlanRect, FaceDirichletOnYTransposes) {
  const auto s = rect(4, 6, BoundaryKind::Neumann, BoundaryKind::Neumann, BoundaryKind::DirichletFace,
                      BoundaryKind::Interface);
  const auto plan = plan_rect(s);
  EXPECT_EQ(plan.transform_axis(), Axis::X);
  EXPECT_EQ(plan.x_solver_kind(), XSolverKind::CornerModified);
}

TEST(PlanRect, AllNeumannWithoutShiftIsSingular) {
  const auto s = rect(3, 4, BoundaryKind::Neumann, BoundaryKind::Neumann, BoundaryKind::Neumann,
                      BoundaryKind::Neumann);
  EXPECT_THROW(plan_rect(s), SingularError);
  const auto pp = rect(4, 4, BoundaryKind::Periodic, BoundaryKind::Periodic, BoundaryKind::Periodic,
                       BoundaryKind::Periodic);
  EXPECT_THROW(plan_rect(pp), SingularError);
}

TEST(SolveRect, ZeroRhsGivesZero) {
  const auto s = rect(5, 6, BoundaryKind::Dirichlet, BoundaryKind::Interface, BoundaryKind::Periodic,
                      BoundaryKind::Periodic, 0.0);
  const auto p = solve_rect(plan_rect(s), GridField::zeros(s));
  for (double v : p.values) EXPECT_EQ(v, 0.0);
}

TEST(SolveRect, ThreeByThreeDirichletFirstUnit) {
  const auto s = rect(3, 3, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet,
                      BoundaryKind::Dirichlet);
  GridField f = GridField::zeros(s);
  f.values[0] = 1.0;
  const auto p = solve_rect(plan_rect(s), f);
  const auto ref = oracle::dense_lu_solve(oracle::assemble_rect_matrix(s), f.values);
  EXPECT_LT(rel_diff(p.values, ref), 1e-13);
}

TEST(SolveRect, SingleModeColumn) {
  const auto s = rect(3, 1, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet,
                      BoundaryKind::Dirichlet);
  const auto p = solve_rect(plan_rect(s), GridField{7, {1.0, 0.0, 0.0}});
  oracle::DenseMatrix a(3, 3);
  a.entries = {-4, 1, 0, 1, -4, 1, 0, 1, -4};
  const auto ref = oracle::dense_lu_solve(a, {1.0, 0.0, 0.0});
  EXPECT_LT(rel_diff(p.values, ref), 1e-14);
}

TEST(SolveRect, WrongSubdomainRejected) {
  const auto s = rect(2, 2, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet,
                      BoundaryKind::Dirichlet);
  const auto plan = plan_rect(s);
  EXPECT_THROW(solve_rect(plan, GridField{3, std::vector<double>(4)}), InvalidArgument);
  EXPECT_THROW(solve_rect(plan, GridField{7, std::vector<double>(5)}), InvalidArgument);
}

// Every combination of axis families and end kinds against dense LU.
TEST(SolveRectProperties, OracleEquivalence) {
  using BK = BoundaryKind;
  const std::vector<std::pair<BK, BK>> pairs{{BK::Dirichlet, BK::Dirichlet}, {BK::Neumann, BK::Neumann},
                                             {BK::Periodic, BK::Periodic},   {BK::Interface, BK::DirichletFace},
                                             {BK::DirichletFace, BK::DirichletFace}};
  int checked = 0;
  for (const auto& xp : pairs) {
    for (const auto& yp : pairs) {
      for (std::size_t m = 1; m <= 8; ++m) {
        for (std::size_t n = 1; n <= 8; ++n) {
          if ((xp.first == BK::Periodic && m % 2) || (yp.first == BK::Periodic && n % 2)) continue;
          const bool no_dirichlet = (xp.first == BK::Neumann || xp.first == BK::Periodic) &&
                                    (yp.first == BK::Neumann || yp.first == BK::Periodic);
          auto s = rect(m, n, xp.first, xp.second, yp.first, yp.second, no_dirichlet ? 1.0 : 0.0, 0.7, 1.3);
          if (!s.transformable(Axis::X) && !s.transformable(Axis::Y)) continue;
          const auto plan = plan_rect(s);
          const auto f = random_vector(m * n, static_cast<unsigned>(m * 31 + n));
          std::vector<double> p(m * n);
          plan.solve(f, p);
          const auto ref = oracle::dense_lu_solve(oracle::assemble_rect_matrix(s), f);
          EXPECT_LT(rel_diff(p, ref), 1e-10) << "m=" << m << " n=" << n << " x=" << to_string(xp.first) << "/"
                                             << to_string(xp.second) << " y=" << to_string(yp.first) << "/"
                                             << to_string(yp.second);
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(SolveRectProperties, ResidualContractAt64) {
  using BK = BoundaryKind;
  for (const auto& s : {rect(64, 64, BK::Dirichlet, BK::Dirichlet, BK::Dirichlet, BK::Dirichlet, 0.0, 1.0 / 64, 1.0 / 64),
                        rect(64, 64, BK::Neumann, BK::Neumann, BK::Dirichlet, BK::Interface, 0.0, 1.0 / 64, 1.0 / 64),
                        rect(64, 64, BK::Periodic, BK::Periodic, BK::Neumann, BK::Neumann, 1.0, 1.0 / 64, 1.0 / 64),
                        rect(64, 64, BK::Neumann, BK::Neumann, BK::DirichletFace, BK::Interface, 0.0, 1.0 / 64, 1.0 / 64)}) {
    const auto plan = plan_rect(s);
    const auto f = random_vector(s.size(), 99);
    std::vector<double> p(s.size()), ap(s.size());
    plan.solve(f, p);
    apply_rect_operator(s, p, ap);
    double r = 0.0, fmax = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      r = std::max(r, std::abs(ap[k] - f[k]));
      fmax = std::max(fmax, std::abs(f[k]));
    }
    EXPECT_LE(r, 1e-10 * fmax);
  }
}

TEST(SolveRectProperties, Linearity) {
  const auto s = rect(12, 10, BoundaryKind::Neumann, BoundaryKind::Neumann, BoundaryKind::Dirichlet,
                      BoundaryKind::Interface, 0.0, 0.1, 0.1);
  const auto plan = plan_rect(s);
  const auto f = random_vector(s.size(), 1);
  const auto g = random_vector(s.size(), 2);
  const double alpha = 1.7, beta = -0.4;
  std::vector<double> h(s.size()), pf(s.size()), pg(s.size()), ph(s.size());
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = alpha * f[k] + beta * g[k];
  plan.solve(f, pf);
  plan.solve(g, pg);
  plan.solve(h, ph);
  double d = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    d = std::max(d, std::abs(ph[k] - (alpha * pf[k] + beta * pg[k])));
    scale = std::max(scale, std::abs(ph[k]));
  }
  EXPECT_LE(d, 1e-11 * std::max(1.0, scale));
}

TEST(SolveRectProperties, ApplyOperatorMatchesDenseAssembly) {
  using BK = BoundaryKind;
  const auto s = rect(5, 6, BK::Periodic, BK::Periodic, BK::DirichletFace, BK::Neumann, 0.2, 0.5, 0.8);
  const auto p = random_vector(s.size(), 4);
  std::vector<double> ap(s.size());
  apply_rect_operator(s, p, ap);
  EXPECT_LT(rel_diff(ap, oracle::matvec(oracle::assemble_rect_matrix(s), p)), 1e-14);
}

TEST(PinMean, ReturnsMeanZeroSolution) {
  using BK = BoundaryKind;
  for (const auto& s : {rect(6, 8, BK::Neumann, BK::Neumann, BK::Neumann, BK::Neumann),
                        rect(6, 8, BK::Periodic, BK::Periodic, BK::Neumann, BK::Neumann),
                        rect(4, 6, BK::Periodic, BK::Periodic, BK::Periodic, BK::Periodic),
                        rect(2, 4, BK::Periodic, BK::Periodic, BK::Neumann, BK::Neumann),
                        rect(1, 5, BK::Neumann, BK::Neumann, BK::Neumann, BK::Neumann)}) {
    const auto plan = plan_rect(s, SingularPolicy::PinMean);
    EXPECT_TRUE(plan.pinned());
    auto f = random_vector(s.size(), 8);
    double fmean = 0.0;
    for (double v : f) fmean += v;
    fmean /= static_cast<double>(f.size());
    std::vector<double> p(s.size()), ap(s.size());
    plan.solve(f, p);
    double pmean = 0.0;
    for (double v : p) pmean += v;
    EXPECT_NEAR(pmean / static_cast<double>(p.size()), 0.0, 1e-12);
    apply_rect_operator(s, p, ap);
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(ap[k], f[k] - fmean, 1e-10);
  }
}

TEST(LiftDirichlet, MatchesExplicitBoundaryValue) {
  // A linear profile p = x is reproduced by the lifted solve on [0, 1] with
  // p(0) = 0 and p(1) = 1 on a zero-ghost Dirichlet grid.
  const std::size_t m = 9;
  auto s = rect(m, 1, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Neumann,
                0.0, 0.1, 1.0);
  GridField f = GridField::zeros(s);
  const std::vector<double> g{1.0};
  lift_dirichlet(s, Edge::East, g, f);
  const auto p = solve_rect(plan_rect(s), f);
  for (std::size_t i = 1; i <= m; ++i) EXPECT_NEAR(p.values[i - 1], 0.1 * static_cast<double>(i), 1e-13);

  // Face-placed wall at x = 1 with nodes at 0.05, 0.15, ...
  auto face = rect(10, 1, BoundaryKind::DirichletFace, BoundaryKind::DirichletFace, BoundaryKind::Neumann,
                   BoundaryKind::Neumann, 0.0, 0.1, 1.0);
  GridField ff = GridField::zeros(face);
  lift_dirichlet(face, Edge::East, g, ff);
  const auto pf = solve_rect(plan_rect(face), ff);
  for (std::size_t i = 1; i <= 10; ++i) EXPECT_NEAR(pf.values[i - 1], 0.1 * (static_cast<double>(i) - 0.5), 1e-13);

  EXPECT_THROW(lift_dirichlet(s, Edge::South, g, f), InvalidArgument);
}

}  // namespace
}  // namespace fftddm
