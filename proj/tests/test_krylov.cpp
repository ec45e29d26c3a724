#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fftddm/bench/cross.hpp"
#include "fftddm/coupled.hpp"
#include "fftddm/ddm.hpp"
#include "fftddm/oracle.hpp"
#include "test_support.hpp"

namespace fftddm {
namespace {

using oracle::DenseMatrix;
using testing_support::random_vector;
using testing_support::rel_diff;

CompositeDomain cross(int kn) { return bench::build_cross(1.0 / 7.0, kn).composite; }

LinearOperator dense_op(const DenseMatrix& a) {
  return [&a](std::span<const double> x, std::span<double> y) {
    for (std::size_t r = 0; r < a.rows; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < a.cols; ++c) s += a(r, c) * x[c];
      y[r] = s;
    }
  };
}

DenseMatrix random_well_conditioned(std::size_t n, unsigned seed) {
  DenseMatrix a(n, n);
  a.entries = random_vector(n * n, seed);
  for (auto& v : a.entries) v *= 0.5 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) a(k, k) += 2.0;
  return a;
}

// Residual history must not grow inside a restart cycle. Entry 0 and each
// multiple of m start a cycle.
void expect_monotone_cycles(const SolveReport& rep, std::size_t m) {
  const auto& h = rep.residual_history;
  for (std::size_t k = 1; k < h.size(); ++k) {
    if ((k - 1) % m == 0) continue;
    EXPECT_LE(h[k], h[k - 1] * (1.0 + 1e-12)) << "entry " << k;
  }
}

GridField reduced_rhs(const CompositeDomain& c, unsigned seed) {
  std::vector<GridField> f;
  for (const auto& s : c.subdomains()) f.push_back(GridField{s.id, random_vector(s.size(), seed++)});
  return DdmSolver(c).reduced_rhs(f);
}

TEST(Gmres, IdentityConvergesInOneIteration) {
  const auto b = random_vector(12, 1);
  const auto r = gmres([](std::span<const double> x, std::span<double> y) { std::copy(x.begin(), x.end(), y.begin()); },
                       b, std::vector<double>(12, 0.0), {});
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 1u);
  EXPECT_LT(rel_diff(r.x, b), 1e-15);
}

TEST(Gmres, ZeroRhsReturnsImmediately) {
  const auto a = random_well_conditioned(5, 2);
  const auto r = gmres(dense_op(a), std::vector<double>(5, 0.0), std::vector<double>(5, 0.0), {});
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 0u);
  EXPECT_EQ(r.report.residual_history, (std::vector<double>{0.0}));
  for (double v : r.x) EXPECT_EQ(v, 0.0);
}

TEST(Gmres, RandomDenseMatchesLu) {
  const auto a = random_well_conditioned(20, 3);
  const auto b = random_vector(20, 4);
  GmresConfig cfg;
  cfg.tol = 1e-10;
  const auto r = gmres(dense_op(a), b, std::vector<double>(20, 0.0), cfg);
  ASSERT_TRUE(r.report.converged);
  EXPECT_LE(r.report.residual_history.back(), cfg.tol);
  EXPECT_LE(rel_diff(r.x, oracle::dense_lu_solve(a, b)), cfg.tol * 10);
  EXPECT_LE(r.report.true_residual, cfg.tol);
}

TEST(Gmres, RightPreconditionerKeepsOriginalResidual) {
  const auto a = random_well_conditioned(30, 5);
  const auto b = random_vector(30, 6);
  std::vector<double> d(30);
  for (std::size_t k = 0; k < 30; ++k) d[k] = a(k, k);
  GmresConfig cfg;
  cfg.tol = 1e-11;
  const auto r = gmres(dense_op(a), b, std::vector<double>(30, 0.0), cfg, [&](std::span<const double> x, std::span<double> y) {
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] / d[k];
  });
  ASSERT_TRUE(r.report.converged);
  EXPECT_LE(rel_diff(r.x, oracle::dense_lu_solve(a, b)), 1e-9);
}

TEST(Gmres, NonzeroInitialGuess) {
  const auto a = random_well_conditioned(15, 7);
  const auto b = random_vector(15, 8);
  const auto exact = oracle::dense_lu_solve(a, b);
  auto x0 = random_vector(15, 9);
  for (std::size_t k = 0; k < x0.size(); ++k) x0[k] = exact[k] + 1e-3 * x0[k];
  GmresConfig cfg;
  cfg.tol = 1e-8;
  const auto r = gmres(dense_op(a), b, x0, cfg);
  ASSERT_TRUE(r.report.converged);
  // tolerance is relative to the initial residual, which is already small
  EXPECT_LE(rel_diff(r.x, exact), 1e-9);
}

TEST(Gmres, CapReportsFailure) {
  // 1D Laplacian with a short restart converges slowly.
  const std::size_t n = 60;
  const auto a = oracle::assemble_axis_matrix(AxisBC::DD, n, 1.0, 0.0, 0.0);
  GmresConfig cfg;
  cfg.m = 3;
  cfg.max_restarts = 2;
  cfg.tol = 1e-12;
  const auto r = gmres(dense_op(a), random_vector(n, 9), std::vector<double>(n, 0.0), cfg);
  EXPECT_FALSE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 6u);
  EXPECT_EQ(r.report.residual_history.size(), 7u);
  EXPECT_GT(r.report.residual_history.back(), cfg.tol);
  expect_monotone_cycles(r.report, cfg.m);
}

TEST(Gmres, RejectsBadConfig) {
  GmresConfig cfg;
  cfg.m = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.tol = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.max_restarts = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  EXPECT_THROW(gmres(dense_op(DenseMatrix::identity(2)), std::vector<double>(2), std::vector<double>(3), {}),
               InvalidArgument);
}

TEST(GmresProperties, MonotoneWithinCycles) {
  const std::size_t n = 80;
  const auto a = oracle::assemble_axis_matrix(AxisBC::NN, n, 1.0, 0.05, 0.0);
  for (std::size_t m : {4u, 9u, 25u}) {
    GmresConfig cfg;
    cfg.m = m;
    cfg.tol = 1e-9;
    cfg.max_restarts = 500;
    const auto r = gmres(dense_op(a), random_vector(n, 10), std::vector<double>(n, 0.0), cfg);
    expect_monotone_cycles(r.report, m);
  }
}

TEST(GmresProperties, FullSubspaceConvergesWithinN) {
  for (std::size_t n : {5u, 12u, 30u}) {
    const auto a = random_well_conditioned(n, static_cast<unsigned>(n));
    GmresConfig cfg;
    cfg.m = n;
    cfg.tol = 1e-13;
    const auto r = gmres(dense_op(a), random_vector(n, 11), std::vector<double>(n, 0.0), cfg);
    EXPECT_TRUE(r.report.converged);
    EXPECT_LE(r.report.iterations, n);
  }
}

TEST(GmresProperties, OrthogonalityLossIsSmall) {
  for (std::size_t n : {20u, 60u}) {
    const auto a = random_well_conditioned(n, 12);
    GmresConfig cfg;
    cfg.m = n;
    cfg.tol = 1e-13;
    cfg.measure_orthogonality = true;
    const auto r = gmres(dense_op(a), random_vector(n, 13), std::vector<double>(n, 0.0), cfg);
    EXPECT_LE(r.report.orthogonality_loss, 1e-8);
  }
  const auto c = cross(2);
  const SchurOperator op(c, bench::kCenter);
  GmresConfig cfg;
  cfg.tol = 1e-13;
  cfg.measure_orthogonality = true;
  const auto rep = solve_coupled(op, reduced_rhs(c, 1), cfg).report;
  EXPECT_LE(rep.orthogonality_loss, 1e-8);
}

TEST(SolveCoupled, ZeroRhs) {
  const auto c = cross(2);
  const SchurOperator op(c, bench::kCenter);
  for (auto p : {Preconditioner::Fft, Preconditioner::Identity, Preconditioner::Jacobi}) {
    GmresConfig cfg;
    cfg.preconditioner = p;
    const auto r = solve_coupled(op, GridField::zeros(c.subdomain(bench::kCenter)), cfg);
    EXPECT_TRUE(r.report.converged);
    EXPECT_EQ(r.report.iterations, 0u);
    for (double v : r.solution.values) EXPECT_EQ(v, 0.0);
  }
}

TEST(SolveCoupled, AllPreconditionersMatchDenseSchurSolve) {
  for (int kn : {1, 2}) {
    const auto c = cross(kn);
    const SchurOperator op(c, bench::kCenter);
    const auto blocks = oracle::dense_schur_blocks(c, bench::kCenter);
    auto l = blocks.host;
    for (std::size_t k = 0; k < l.entries.size(); ++k) l.entries[k] -= blocks.schur_sum.entries[k];
    const auto f = reduced_rhs(c, 20);
    const auto expect = oracle::dense_lu_solve(l, f.values);
    for (auto p : {Preconditioner::Fft, Preconditioner::Identity, Preconditioner::Jacobi}) {
      GmresConfig cfg;
      cfg.tol = 1e-12;
      cfg.preconditioner = p;
      const auto r = solve_coupled(op, f, cfg);
      ASSERT_TRUE(r.report.converged) << to_string(p);
      EXPECT_LE(rel_diff(r.solution.values, expect), 1e-9) << to_string(p) << " kn=" << kn;
    }
  }
}

TEST(SolveCoupled, FftBeatsIdentityBySevenAtTightTolerance) {
  const auto c = cross(8);
  const SchurOperator op(c, bench::kCenter);
  const auto f = reduced_rhs(c, 30);
  GmresConfig cfg;
  cfg.tol = 1e-10;
  const auto fft = solve_coupled(op, f, cfg).report;
  cfg.preconditioner = Preconditioner::Identity;
  const auto id = solve_coupled(op, f, cfg).report;
  ASSERT_TRUE(fft.converged);
  EXPECT_LE(fft.iterations * 7, id.iterations);
}

TEST(SolveCoupled, WrongSubdomainRejected) {
  const auto c = cross(1);
  const SchurOperator op(c, bench::kCenter);
  EXPECT_THROW(solve_coupled(op, GridField::zeros(c.subdomain(bench::kWest)), {}), InvalidArgument);
}

TEST(FixedPoint, ZeroCouplingConvergesAtOnce) {
  const auto base = cross(2);
  auto itfs = base.interfaces();
  for (auto& itf : itfs) itf.coupling = 0.0;
  const CompositeDomain rig(base.subdomains(), itfs);
  const SchurOperator op(rig, bench::kCenter);
  const GridField f{bench::kCenter, random_vector(op.size(), 40)};
  const auto r = fixed_point(op, f, 50, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1u);
  std::vector<double> expect(op.size());
  op.solve_center(f.values, expect);
  EXPECT_LT(rel_diff(r.solution.values, expect), 1e-15);
}

TEST(FixedPoint, ZeroRhsIsImmediate) {
  const auto c = cross(2);
  const SchurOperator op(c, bench::kCenter);
  const auto r = fixed_point(op, GridField::zeros(c.subdomain(bench::kCenter)), 10, 1e-10);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0u);
  for (double v : r.solution.values) EXPECT_EQ(v, 0.0);
}

TEST(FixedPoint, RecordsHistoryOnCross) {
  const auto c = cross(8);
  const SchurOperator op(c, bench::kCenter);
  const auto r = fixed_point(op, reduced_rhs(c, 41), 200, 1e-8);
  EXPECT_FALSE(r.history.empty());
  EXPECT_LE(r.history.size(), 201u);
  EXPECT_TRUE(r.converged || r.diverged || r.history.size() == 201u);
}

TEST(JacobiDiagonal, ZeroCouplingIsStencilDiagonal) {
  const auto base = cross(2);
  auto itfs = base.interfaces();
  for (auto& itf : itfs) itf.coupling = 0.0;
  const SchurOperator op(CompositeDomain(base.subdomains(), itfs), bench::kCenter);
  const auto d = jacobi_diagonal(op);
  const auto a = oracle::assemble_rect_matrix(base.subdomain(bench::kCenter));
  for (std::size_t k = 0; k < d.size(); ++k) EXPECT_EQ(d[k], a(k, k));
}

TEST(JacobiDiagonal, MatchesDenseDiagonal) {
  for (int kn : {1, 2}) {
    const auto c = cross(kn);
    const SchurOperator op(c, bench::kCenter);
    const auto blocks = oracle::dense_schur_blocks(c, bench::kCenter);
    const auto d = jacobi_diagonal(op);
    for (std::size_t k = 0; k < d.size(); ++k) {
      const double expect = blocks.host(k, k) - blocks.schur_sum(k, k);
      EXPECT_NEAR(d[k], expect, 1e-10 * std::abs(expect)) << "kn=" << kn << " k=" << k;
    }
  }
}

TEST(JacobiDiagonal, GuardedBySize) {
  const auto c = cross(4);
  const SchurOperator op(c, bench::kCenter);
  EXPECT_THROW(jacobi_diagonal(op, 10), InvalidArgument);
}

TEST(CoupledProperties, IterationsNonincreasingInSubspace) {
  for (int kn : {8, 16}) {
    const auto c = cross(kn);
    const SchurOperator op(c, bench::kCenter);
    const auto f = reduced_rhs(c, 50);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (std::size_t m : {3u, 10u, 40u, 80u}) {
      GmresConfig cfg;
      cfg.m = m;
      cfg.tol = 1e-7;
      const auto r = solve_coupled(op, f, cfg).report;
      ASSERT_TRUE(r.converged);
      EXPECT_LE(r.iterations, prev) << "kn=" << kn << " m=" << m;
      prev = r.iterations;
    }
  }
}

TEST(CoupledProperties, PreconditionerRanking) {
  const auto c = cross(16);
  const SchurOperator op(c, bench::kCenter);
  const auto f = reduced_rhs(c, 60);
  auto run = [&](Preconditioner p) {
    GmresConfig cfg;
    cfg.tol = 1e-7;
    cfg.preconditioner = p;
    return solve_coupled(op, f, cfg).report;
  };
  const auto fft = run(Preconditioner::Fft);
  const auto jac = run(Preconditioner::Jacobi);
  const auto id = run(Preconditioner::Identity);
  ASSERT_TRUE(fft.converged);
  EXPECT_LT(fft.iterations, jac.iterations);
  EXPECT_LE(jac.iterations, id.iterations);
}

}  // namespace
}  // namespace fftddm
