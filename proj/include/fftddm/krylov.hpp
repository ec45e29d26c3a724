#pragma once

// Restarted GMRES(m): modified Gram-Schmidt Arnoldi with Givens rotations.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fftddm/error.hpp"

namespace fftddm {

enum class Preconditioner { Identity, Jacobi, Fft };

inline std::string_view to_string(Preconditioner p) {
  switch (p) {
    case Preconditioner::Identity: return "identity";
    case Preconditioner::Jacobi: return "jacobi";
    case Preconditioner::Fft: return "fft";
  }
  return "?";
}

inline constexpr double kReorthRatio = 0.7071067811865476;

struct GmresConfig {
  std::size_t m = 80;
  double tol = 1e-10;
  std::size_t max_restarts = 200;
  Preconditioner preconditioner = Preconditioner::Fft;
  /// Second Gram-Schmidt pass on every Arnoldi vector. Without it the pass
  /// still runs whenever projection removes most of the vector's norm.
  bool reorthogonalize = false;
  /// Record max |VᵀV - I| per cycle in the report (costs O(m²N)).
  bool measure_orthogonality = false;

  void validate() const {
    if (m < 1) throw InvalidArgument("GMRES subspace dimension m must be >= 1");
    if (!(tol > 0.0) || !std::isfinite(tol)) throw InvalidArgument("GMRES tolerance must be positive");
    if (max_restarts < 1) throw InvalidArgument("GMRES max_restarts must be >= 1");
  }
};

struct SolveReport {
  bool converged = false;
  /// Total inner (Arnoldi) iterations.
  std::size_t iterations = 0;
  /// Entry k is ‖r_k‖₂/‖r_0‖₂ after k inner iterations (entry 0 is the start).
  std::vector<double> residual_history;
  double wall_time = 0.0;
  /// ‖b - A x‖₂/‖r_0‖₂ recomputed at the returned solution.
  double true_residual = std::numeric_limits<double>::quiet_NaN();
  std::size_t restarts = 0;
  bool breakdown = false;
  double orthogonality_loss = 0.0;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, SolveReport report) : Error(what), report_(std::move(report)) {}
  const char* kind() const noexcept override { return "convergence"; }
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// y = A x
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct GmresResult {
  std::vector<double> x;
  SolveReport report;
};

namespace detail {
inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}
inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }
}  // namespace detail

/// Solves A x = b. With a right preconditioner M⁻¹ the iteration runs on
/// A M⁻¹ y = b and returns x = x0 + M⁻¹ y, so the monitored residual is the
/// residual of the original system.
inline GmresResult gmres(const LinearOperator& A, std::span<const double> b, std::span<const double> x0,
                         const GmresConfig& cfg, const LinearOperator& right_precond = {}) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = b.size();
  if (x0.size() != n) throw InvalidArgument("gmres: x0 and rhs lengths differ");
  GmresResult res{std::vector<double>(x0.begin(), x0.end()), {}};
  auto& rep = res.report;
  auto finish = [&] {
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  std::vector<double> r(n), tmp(n);
  auto residual = [&](std::vector<double>& out) {
    A(res.x, tmp);
    for (std::size_t k = 0; k < n; ++k) out[k] = b[k] - tmp[k];
    return detail::norm2(out);
  };
  const double beta0 = residual(r);
  if (beta0 == 0.0) {
    rep.converged = true;
    rep.residual_history = {0.0};
    rep.true_residual = 0.0;
    finish();
    return res;
  }
  if (!std::isfinite(beta0)) throw InvalidArgument("gmres: non-finite initial residual");
  rep.residual_history.push_back(1.0);

  const std::size_t m = cfg.m;
  std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
  std::vector<double> H((m + 1) * m, 0.0);  // column-major, H[i + j*(m+1)]
  std::vector<double> cs(m), sn(m), g(m + 1), y(m), w(n), z(n);
  auto h = [&](std::size_t i, std::size_t j) -> double& { return H[i + j * (m + 1)]; };

  double beta = beta0;
  for (std::size_t cycle = 0; cycle < cfg.max_restarts; ++cycle) {
    if (cycle > 0) {
      beta = residual(r);
      rep.restarts = cycle;
      if (beta / beta0 <= cfg.tol) {
        rep.converged = true;
        break;
      }
    }
    for (std::size_t k = 0; k < n; ++k) V[0][k] = r[k] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    std::size_t used = 0;
    bool done = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (right_precond) {
        right_precond(V[j], z);
        A(z, w);
      } else {
        A(V[j], w);
      }
      const double wnorm = detail::norm2(w);
      for (std::size_t i = 0; i <= j; ++i) {
        const double hij = detail::dot(w, V[i]);
        h(i, j) = hij;
        for (std::size_t k = 0; k < n; ++k) w[k] -= hij * V[i][k];
      }
      double hnext = detail::norm2(w);
      // A large drop in norm means cancellation; one more pass restores
      // orthogonality to working precision.
      if (cfg.reorthogonalize || hnext < kReorthRatio * wnorm) {
        for (std::size_t i = 0; i <= j; ++i) {
          const double c = detail::dot(w, V[i]);
          h(i, j) += c;
          for (std::size_t k = 0; k < n; ++k) w[k] -= c * V[i][k];
        }
        hnext = detail::norm2(w);
      }
      h(j + 1, j) = hnext;
      for (std::size_t i = 0; i < j; ++i) {
        const double a = h(i, j);
        const double c = h(i + 1, j);
        h(i, j) = cs[i] * a + sn[i] * c;
        h(i + 1, j) = -sn[i] * a + cs[i] * c;
      }
      const double a = h(j, j);
      const double c = h(j + 1, j);
      const double rad = std::hypot(a, c);
      cs[j] = rad == 0.0 ? 1.0 : a / rad;
      sn[j] = rad == 0.0 ? 0.0 : c / rad;
      h(j, j) = rad;
      h(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      used = j + 1;
      ++rep.iterations;
      const double rel = std::abs(g[j + 1]) / beta0;
      rep.residual_history.push_back(rel);
      const bool lucky = hnext <= 1e-14 * wnorm;
      if (rel <= cfg.tol || lucky) {
        rep.breakdown = lucky;
        done = true;
        break;
      }
      for (std::size_t k = 0; k < n; ++k) V[j + 1][k] = w[k] / hnext;
    }
    // Back substitution on the triangularized Hessenberg matrix.
    for (std::size_t i = used; i-- > 0;) {
      double s = g[i];
      for (std::size_t k = i + 1; k < used; ++k) s -= h(i, k) * y[k];
      y[i] = h(i, i) == 0.0 ? 0.0 : s / h(i, i);
    }
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t i = 0; i < used; ++i) {
      for (std::size_t k = 0; k < n; ++k) z[k] += y[i] * V[i][k];
    }
    if (right_precond) {
      right_precond(std::vector<double>(z), z);
    }
    for (std::size_t k = 0; k < n; ++k) res.x[k] += z[k];

    if (cfg.measure_orthogonality) {
      for (std::size_t i = 0; i < used; ++i) {
        for (std::size_t k = 0; k <= i; ++k) {
          const double d = detail::dot(V[i], V[k]) - (i == k ? 1.0 : 0.0);
          rep.orthogonality_loss = std::max(rep.orthogonality_loss, std::abs(d));
        }
      }
    }
    if (done) {
      const double true_rel = residual(r) / beta0;
      if (true_rel <= cfg.tol) {
        rep.converged = true;
        break;
      }
      if (rep.breakdown) break;  // invariant subspace found but residual is not small
    }
  }
  rep.true_residual = residual(r) / beta0;
  if (!rep.converged && rep.true_residual <= cfg.tol) rep.converged = true;
  finish();
  return res;
}

}  // namespace fftddm
