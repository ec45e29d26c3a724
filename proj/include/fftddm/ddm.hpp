#pragma once

// Schur-complement domain decomposition over a composite of rectangles:
//   1. q_i = A_i⁻¹ f_i on every independent subdomain
//   2. f'_c = f_c - Σ R_ci q_i
//   3. GMRES for p_c on (A_c - ΣS) p_c = f'_c
//   4. p_i = q_i - A_i⁻¹ R_ic p_c

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fftddm/coupled.hpp"
#include "fftddm/error.hpp"
#include "fftddm/geometry.hpp"
#include "fftddm/krylov.hpp"
#include "fftddm/rectsolver.hpp"
#include "fftddm/schur.hpp"

namespace fftddm {

/// y = A_global p, matrix-free. Fields are in the composite's subdomain order.
inline std::vector<GridField> apply_global_operator(const CompositeDomain& c, const std::vector<GridField>& p) {
  const auto& subs = c.subdomains();
  if (p.size() != subs.size()) throw InvalidArgument("apply_global_operator: one field per subdomain expected");
  std::vector<GridField> out;
  out.reserve(subs.size());
  for (std::size_t k = 0; k < subs.size(); ++k) out.push_back(apply_rect_operator(subs[k], p[k]));
  for (const auto& itf : c.interfaces()) {
    const std::size_t a = c.index_of(itf.side_a.subdomain_id);
    const std::size_t b = c.index_of(itf.side_b.subdomain_id);
    for (const auto& [ia, ib] : itf.index_map) {
      out[a].values[ia] += itf.coupling * p[b].values[ib];
      out[b].values[ib] += itf.coupling * p[a].values[ia];
    }
  }
  return out;
}

/// ‖A p - f‖∞ / ‖f‖∞ (absolute when f = 0).
inline double global_residual(const CompositeDomain& c, const std::vector<GridField>& p,
                              const std::vector<GridField>& f) {
  const auto ap = apply_global_operator(c, p);
  double rmax = 0.0;
  double fmax = 0.0;
  for (std::size_t k = 0; k < ap.size(); ++k) {
    for (std::size_t t = 0; t < ap[k].values.size(); ++t) {
      rmax = std::max(rmax, std::abs(ap[k].values[t] - f[k].values[t]));
      fmax = std::max(fmax, std::abs(f[k].values[t]));
    }
  }
  return fmax > 0.0 ? rmax / fmax : rmax;
}

struct DdmResult {
  /// One field per subdomain, in the composite's subdomain order.
  std::vector<GridField> fields;
  SolveReport report;
  double global_residual = 0.0;
};

class DdmSolver {
 public:
  explicit DdmSolver(CompositeDomain composite) : composite_(std::move(composite)) {
    const auto report = validate(composite_);
    if (!report.ok()) throw ValidationError("invalid composite: " + report.summary());
    const auto& subs = composite_.subdomains();
    if (subs.size() == 1) {
      single_ = std::make_shared<const RectPlan>(subs.front());
      return;
    }
    // Connected star topology leaves at most one coupled subdomain; with two
    // subdomains both are independent and the second one hosts the system.
    const int host = composite_.coupled_ids().empty() ? subs.back().id : composite_.coupled_ids().front();
    schur_.emplace(composite_, host);
  }

  const CompositeDomain& composite() const { return composite_; }
  /// Host subdomain id, or nullopt for a single rectangle.
  std::optional<int> host_id() const {
    if (schur_) return schur_->coupled_id();
    return std::nullopt;
  }
  const SchurOperator& schur() const {
    if (!schur_) throw InvalidArgument("single-rectangle composite has no Schur operator");
    return *schur_;
  }

  /// Throws ConvergenceError when GMRES does not reach cfg.tol.
  DdmResult solve(const std::vector<GridField>& f, const GmresConfig& cfg) const {
    cfg.validate();
    const auto rhs = ordered(f);
    DdmResult out;
    if (single_) {
      out.fields.push_back(solve_rect(*single_, rhs.front()));
      out.report.converged = true;
      out.report.residual_history = {0.0};
      out.report.true_residual = 0.0;
      out.global_residual = global_residual(composite_, out.fields, rhs);
      return out;
    }
    const auto& subs = composite_.subdomains();
    const int host = schur_->coupled_id();
    const std::size_t hk = composite_.index_of(host);
    out.fields.resize(subs.size());
    const auto& nbs = schur_->neighbors();

    std::vector<std::vector<double>> q;
    const GridField f_prime = reduce(rhs, q);
    const long nn = static_cast<long>(nbs.size());
    auto coupled = solve_coupled(*schur_, f_prime, cfg);
    out.report = std::move(coupled.report);
    if (!out.report.converged) {
      throw ConvergenceError("GMRES did not converge on subdomain " + std::to_string(host) + " after " +
                                 std::to_string(out.report.iterations) + " iterations (relative residual " +
                                 std::to_string(out.report.residual_history.back()) + ")",
                             out.report);
    }
    const auto& pc = coupled.solution.values;
#pragma omp parallel for schedule(dynamic) if (nn > 1 && composite_.total_unknowns() > 16384)
    for (long k = 0; k < nn; ++k) {
      const auto& nb = nbs[static_cast<std::size_t>(k)];
      std::vector<double> corr(nb.plan->size(), 0.0);
      accumulate_R(nb.to_neighbor, pc, corr);
      nb.plan->solve(corr, corr);
      auto& qk = q[static_cast<std::size_t>(k)];
      for (std::size_t t = 0; t < qk.size(); ++t) qk[t] -= corr[t];
    }
    for (std::size_t k = 0; k < nbs.size(); ++k) {
      const int id = nbs[k].plan->subdomain().id;
      out.fields[composite_.index_of(id)] = GridField{id, std::move(q[k])};
    }
    out.fields[hk] = std::move(coupled.solution);
    out.global_residual = global_residual(composite_, out.fields, rhs);
    return out;
  }

  /// f'_c = f_c - Σ R_ci A_i⁻¹ f_i for right-hand sides in any order.
  GridField reduced_rhs(const std::vector<GridField>& f) const {
    if (!schur_) throw InvalidArgument("single-rectangle composite has no reduced system");
    std::vector<std::vector<double>> q;
    return reduce(ordered(f), q);
  }

 private:
  // Also returns q_i = A_i⁻¹ f_i per neighbour, in neighbour order.
  GridField reduce(const std::vector<GridField>& rhs, std::vector<std::vector<double>>& q) const {
    const auto& nbs = schur_->neighbors();
    GridField f_prime = rhs[composite_.index_of(schur_->coupled_id())];
    q.assign(nbs.size(), {});
    const long nn = static_cast<long>(nbs.size());
#pragma omp parallel for schedule(dynamic) if (nn > 1 && composite_.total_unknowns() > 16384)
    for (long k = 0; k < nn; ++k) {
      const auto& nb = nbs[static_cast<std::size_t>(k)];
      const std::size_t sk = composite_.index_of(nb.plan->subdomain().id);
      q[static_cast<std::size_t>(k)].resize(nb.plan->size());
      nb.plan->solve(rhs[sk].values, q[static_cast<std::size_t>(k)]);
    }
    std::vector<double> acc(schur_->size(), 0.0);
    for (std::size_t k = 0; k < nbs.size(); ++k) accumulate_R(nbs[k].to_host, q[k], acc);
    for (std::size_t t = 0; t < acc.size(); ++t) f_prime.values[t] -= acc[t];
    return f_prime;
  }

  std::vector<GridField> ordered(const std::vector<GridField>& f) const {
    const auto& subs = composite_.subdomains();
    if (f.size() != subs.size()) {
      throw InvalidArgument("ddm_solve: expected " + std::to_string(subs.size()) + " right-hand side fields, got " +
                            std::to_string(f.size()));
    }
    std::vector<GridField> out(subs.size());
    std::vector<bool> seen(subs.size(), false);
    for (const auto& field : f) {
      const std::size_t k = composite_.index_of(field.subdomain_id);
      if (seen[k]) throw InvalidArgument("ddm_solve: two fields for subdomain " + std::to_string(field.subdomain_id));
      if (field.values.size() != subs[k].size()) {
        throw InvalidArgument("ddm_solve: field length mismatch on subdomain " + std::to_string(field.subdomain_id));
      }
      for (double v : field.values) {
        if (!std::isfinite(v)) throw InvalidArgument("ddm_solve: non-finite right-hand side");
      }
      seen[k] = true;
      out[k] = field;
    }
    return out;
  }

  CompositeDomain composite_;
  std::shared_ptr<const RectPlan> single_;
  std::optional<SchurOperator> schur_;
};

inline DdmResult ddm_solve(const CompositeDomain& composite, const std::vector<GridField>& f,
                           const GmresConfig& cfg = {}) {
  return DdmSolver(composite).solve(f, cfg);
}

}  // namespace fftddm
