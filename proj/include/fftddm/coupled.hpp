#pragma once

// Iterative solution of the host subdomain's Schur system
//   (A_c - ΣS) p = f'
// by GMRES in one of three forms, or by the plain fixed-point iteration
//   p ← A_c⁻¹ ΣS p + A_c⁻¹ f'.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fftddm/error.hpp"
#include "fftddm/geometry.hpp"
#include "fftddm/krylov.hpp"
#include "fftddm/schur.hpp"

namespace fftddm {

inline constexpr std::size_t kJacobiProbeGuard = 4096;

/// diag(A_c - ΣS) by probing with unit vectors. ΣS vanishes on unit vectors
/// away from the interface lines, so those nodes only need the stencil.
inline std::vector<double> jacobi_diagonal(const SchurOperator& op, std::size_t max_unknowns = kJacobiProbeGuard) {
  const std::size_t n = op.size();
  if (n > max_unknowns) {
    throw InvalidArgument("jacobi_diagonal probes every unknown and is limited to " + std::to_string(max_unknowns) +
                          " unknowns on the coupled subdomain (got " + std::to_string(n) +
                          "); use it at desk scale only");
  }
  std::vector<bool> on_interface(n, false);
  for (const auto& nb : op.neighbors()) {
    for (const auto& [from, to] : nb.to_neighbor.pairs) {
      (void)to;
      on_interface[from] = true;
    }
  }
  std::vector<double> diag(n), e(n, 0.0), col(n);
  const auto& sub = op.center_plan().subdomain();
  for (std::size_t k = 0; k < n; ++k) {
    e[k] = 1.0;
    if (on_interface[k]) {
      op.apply_unpreconditioned(e, col);
    } else {
      apply_rect_operator(sub, e, col);
    }
    diag[k] = col[k];
    e[k] = 0.0;
  }
  return diag;
}

struct CoupledResult {
  GridField solution;
  SolveReport report;
};

inline CoupledResult solve_coupled(const SchurOperator& op, const GridField& f_prime, const GmresConfig& cfg) {
  cfg.validate();
  if (f_prime.subdomain_id != op.coupled_id() || f_prime.values.size() != op.size()) {
    throw InvalidArgument("solve_coupled: right-hand side does not live on subdomain " +
                          std::to_string(op.coupled_id()));
  }
  const std::size_t n = op.size();
  const std::vector<double> x0(n, 0.0);
  GmresResult r;
  switch (cfg.preconditioner) {
    case Preconditioner::Fft: {
      std::vector<double> rhs(n);
      op.solve_center(f_prime.values, rhs);
      r = gmres([&](std::span<const double> x, std::span<double> y) { op.apply_preconditioned(x, y); }, rhs, x0,
                cfg);
      break;
    }
    case Preconditioner::Identity:
      r = gmres([&](std::span<const double> x, std::span<double> y) { op.apply_unpreconditioned(x, y); },
                f_prime.values, x0, cfg);
      break;
    case Preconditioner::Jacobi: {
      const auto d = jacobi_diagonal(op);
      r = gmres([&](std::span<const double> x, std::span<double> y) { op.apply_unpreconditioned(x, y); },
                f_prime.values, x0, cfg, [&](std::span<const double> x, std::span<double> y) {
                  for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] / d[k];
                });
      break;
    }
  }
  return {GridField{op.coupled_id(), std::move(r.x)}, std::move(r.report)};
}

struct FixedPointResult {
  GridField solution;
  bool converged = false;
  bool diverged = false;
  /// Index of the returned iterate.
  std::size_t iterations = 0;
  /// Entry k is ‖p_{k+1} - p_k‖₂ / ‖A_c⁻¹ f'‖₂, the residual of iterate k in
  /// the preconditioned system.
  std::vector<double> history;
};

inline FixedPointResult fixed_point(const SchurOperator& op, const GridField& f_prime, std::size_t max_iters,
                                    double tol) {
  if (f_prime.subdomain_id != op.coupled_id() || f_prime.values.size() != op.size()) {
    throw InvalidArgument("fixed_point: right-hand side does not live on subdomain " +
                          std::to_string(op.coupled_id()));
  }
  const std::size_t n = op.size();
  FixedPointResult out{GridField{op.coupled_id(), std::vector<double>(n, 0.0)}, false, false, 0, {}};
  std::vector<double> b(n);
  op.solve_center(f_prime.values, b);
  const double bnorm = detail::norm2(b);
  if (bnorm == 0.0) {
    out.converged = true;
    out.history = {0.0};
    return out;
  }
  std::vector<double> p(n, 0.0), next(n);
  for (std::size_t k = 0;; ++k) {
    // next = A_c⁻¹ ΣS p + b
    op.apply_schur(p, next);
    op.solve_center(next, next);
    double diff = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      next[t] += b[t];
      diff += (next[t] - p[t]) * (next[t] - p[t]);
    }
    const double rel = std::sqrt(diff) / bnorm;
    out.history.push_back(rel);
    if (rel <= tol) {
      out.converged = true;
      out.iterations = k;
      break;
    }
    if (!std::isfinite(rel) || rel > 1e6 * out.history.front()) {
      out.diverged = true;
      out.iterations = k;
      break;
    }
    if (k == max_iters) {
      out.iterations = k;
      break;
    }
    p.swap(next);
  }
  out.solution.values = p;
  return out;
}

}  // namespace fftddm
