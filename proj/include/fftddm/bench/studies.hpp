#pragma once

// Convergence, preconditioner and scaling studies on the cross benchmark,
// plus CSV output.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "fftddm/bench/cross.hpp"
#include "fftddm/coupled.hpp"
#include "fftddm/ddm.hpp"
#include "fftddm/error.hpp"
#include "fftddm/krylov.hpp"

namespace fftddm::bench {

/// Shortest round-trip-safe text for a double ("%.17g").
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string to_csv_text(const CsvTable& t) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) s += ',';
      s += cells[k];
    }
    return s + '\n';
  };
  std::string out = line(t.header);
  for (const auto& r : t.rows) out += line(r);
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  os << text;
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed: " + std::strerror(errno));
}

inline void emit_csv(const CsvTable& t, const std::string& path) { write_text(path, to_csv_text(t)); }

/// (x, y, value) per node, subdomains in composite order.
inline CsvTable field_table(const CompositeDomain& c, const std::vector<GridField>& fields) {
  CsvTable t{{"x", "y", "value"}, {}};
  for (std::size_t k = 0; k < c.subdomains().size(); ++k) {
    const auto& s = c.subdomains()[k];
    const auto& f = fields.at(k);
    if (f.values.size() != s.size()) throw InvalidArgument("emit_field: field length mismatch");
    for (std::size_t i = 1; i <= s.m; ++i) {
      for (std::size_t j = 1; j <= s.n; ++j) {
        t.rows.push_back({fmt(s.node_x(i)), fmt(s.node_y(j)), fmt(f.values[linear_index(s, i, j)])});
      }
    }
  }
  return t;
}

inline void emit_field(const CompositeDomain& c, const std::vector<GridField>& fields, const std::string& path) {
  emit_csv(field_table(c, fields), path);
}

/// Least-squares slope of log(y) against log(x).
inline double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_exponent needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

struct SolveOptions {
  double L = 1.0 / 7.0;
  double kappa = 0.0;
  CrossConstants constants = CrossConstants::Corrected;
  GmresConfig gmres{};
  /// Solve with f = 0 (exact solution 0) instead of the manufactured data.
  bool zero_rhs = false;
};

struct CrossSolution {
  CrossCase problem;
  std::vector<GridField> numeric;
  std::vector<GridField> exact;
  SolveReport report;
  double linf = 0.0;
  double l2 = 0.0;
  double global_residual = 0.0;
};

inline CrossSolution solve_cross(int kn, const SolveOptions& opt) {
  CrossSolution out;
  out.problem = build_cross(opt.L, kn, opt.kappa, opt.constants);
  const auto& p = out.problem;
  const auto rhs = sample_nodes(p.composite, [&](double x, double y) { return opt.zero_rhs ? 0.0 : manufactured_rhs(p, x, y); });
  out.exact = sample_nodes(p.composite, [&](double x, double y) { return opt.zero_rhs ? 0.0 : manufactured_solution(p, x, y); });
  auto res = ddm_solve(p.composite, rhs, opt.gmres);
  out.numeric = std::move(res.fields);
  out.report = std::move(res.report);
  out.global_residual = res.global_residual;
  const double h = p.L / p.kn;
  double sq = 0.0;
  for (std::size_t k = 0; k < out.numeric.size(); ++k) {
    for (std::size_t t = 0; t < out.numeric[k].values.size(); ++t) {
      const double e = out.numeric[k].values[t] - out.exact[k].values[t];
      out.linf = std::max(out.linf, std::abs(e));
      sq += e * e;
    }
  }
  out.l2 = std::sqrt(sq * h * h);
  return out;
}

struct ConvergenceRow {
  int kn = 0;
  double h = 0.0;
  double linf = 0.0;
  double l2 = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();
  double order_l2 = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
};

inline std::vector<ConvergenceRow> run_convergence(const std::vector<int>& kns, const SolveOptions& opt) {
  for (std::size_t k = 1; k < kns.size(); ++k) {
    if (kns[k] < kns[k - 1]) throw InvalidArgument("convergence sweep must list k_n in nondecreasing order");
  }
  std::vector<ConvergenceRow> rows;
  for (int kn : kns) {
    CrossSolution s;
    try {
      s = solve_cross(kn, opt);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("convergence study at k_n=" + std::to_string(kn) + ": " + e.what(), e.report());
    }
    ConvergenceRow r;
    r.kn = kn;
    r.h = opt.L / kn;
    r.linf = s.linf;
    r.l2 = s.l2;
    r.iterations = s.report.iterations;
    if (!rows.empty()) {
      const auto& prev = rows.back();
      const double ratio = prev.h / r.h;
      r.order = std::log(prev.linf / r.linf) / std::log(ratio);
      r.order_l2 = std::log(prev.l2 / r.l2) / std::log(ratio);
    }
    rows.push_back(r);
  }
  return rows;
}

inline CsvTable convergence_table(const std::vector<ConvergenceRow>& rows) {
  CsvTable t{{"k_n", "h", "linf_error", "l2_error", "order_linf", "order_l2", "iterations"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.kn), fmt(r.h), fmt(r.linf), fmt(r.l2), fmt(r.order), fmt(r.order_l2),
                      std::to_string(r.iterations)});
  }
  return t;
}

struct PrecondRow {
  int kn = 0;
  std::size_t m = 0;
  Preconditioner preconditioner = Preconditioner::Fft;
  /// Inner iterations, or the cap when the run did not converge.
  std::size_t iterations = 0;
  std::string status;  // converged | cap | skipped
  std::string history_file;
};

struct PrecondOptions {
  SolveOptions solve{};
  /// Directory for per-run residual histories; empty disables them.
  std::string history_dir;
};

inline std::vector<PrecondRow> run_precond_compare(const std::vector<int>& kns, const std::vector<std::size_t>& ms,
                                                   const std::vector<Preconditioner>& preconds,
                                                   const PrecondOptions& opt) {
  std::vector<PrecondRow> rows;
  if (!opt.history_dir.empty()) std::filesystem::create_directories(opt.history_dir);
  for (int kn : kns) {
    const auto problem = build_cross(opt.solve.L, kn, opt.solve.kappa, opt.solve.constants);
    const DdmSolver solver(problem.composite);
    const auto& op = solver.schur();
    const auto rhs = sample_nodes(problem.composite, [&](double x, double y) { return manufactured_rhs(problem, x, y); });
    const GridField f_prime = solver.reduced_rhs(rhs);
    for (std::size_t m : ms) {
      for (Preconditioner pc : preconds) {
        PrecondRow row{kn, m, pc, 0, "", ""};
        GmresConfig cfg = opt.solve.gmres;
        cfg.m = m;
        cfg.preconditioner = pc;
        if (pc == Preconditioner::Jacobi && op.size() > kJacobiProbeGuard) {
          row.status = "skipped";
          rows.push_back(row);
          continue;
        }
        const auto res = solve_coupled(op, f_prime, cfg);
        row.status = res.report.converged ? "converged" : "cap";
        row.iterations = res.report.converged ? res.report.iterations : cfg.m * cfg.max_restarts;
        if (!opt.history_dir.empty()) {
          const std::string name = "history_kn" + std::to_string(kn) + "_m" + std::to_string(m) + "_" +
                                   std::string(to_string(pc)) + ".csv";
          CsvTable h{{"iteration", "relative_residual"}, {}};
          for (std::size_t k = 0; k < res.report.residual_history.size(); ++k) {
            h.rows.push_back({std::to_string(k), fmt(res.report.residual_history[k])});
          }
          row.history_file = (std::filesystem::path(opt.history_dir) / name).string();
          emit_csv(h, row.history_file);
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

inline CsvTable precond_table(const std::vector<PrecondRow>& rows) {
  CsvTable t{{"k_n", "m", "preconditioner", "iterations", "status", "history_file"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.kn), std::to_string(r.m), std::string(to_string(r.preconditioner)),
                      r.status == "skipped" ? "" : std::to_string(r.iterations), r.status, r.history_file});
  }
  return t;
}

struct ScalingRow {
  double tol = 0.0;
  int kn = 0;
  std::size_t unknowns = 0;
  std::size_t iterations = 0;
  double time_per_iteration = 0.0;  // median over repeats, seconds
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
};

struct ScalingOptions {
  SolveOptions solve{};
  /// Timed repeats per point (median taken); plans stay warm between them.
  int repeats = 5;
};

inline std::vector<ScalingRow> run_scaling(const std::vector<int>& kns, const std::vector<double>& tols,
                                           const ScalingOptions& opt) {
  if (opt.repeats < 1) throw InvalidArgument("scaling needs at least one repeat");
  std::vector<ScalingRow> rows;
  for (double tol : tols) {
    const std::size_t first = rows.size();
    for (int kn : kns) {
      const auto problem = build_cross(opt.solve.L, kn, opt.solve.kappa, opt.solve.constants);
      const DdmSolver solver(problem.composite);
      const auto rhs =
          sample_nodes(problem.composite, [&](double x, double y) { return manufactured_rhs(problem, x, y); });
      GmresConfig cfg = opt.solve.gmres;
      cfg.tol = tol;
      std::vector<double> per_iter;
      std::size_t iterations = 0;
      for (int r = 0; r < opt.repeats; ++r) {
        const auto res = solver.solve(rhs, cfg);
        iterations = res.report.iterations;
        per_iter.push_back(res.report.wall_time / static_cast<double>(std::max<std::size_t>(1, iterations)));
      }
      std::sort(per_iter.begin(), per_iter.end());
      ScalingRow row;
      row.tol = tol;
      row.kn = kn;
      row.unknowns = problem.composite.total_unknowns();
      row.iterations = iterations;
      row.time_per_iteration = per_iter[per_iter.size() / 2];
      rows.push_back(row);
    }
    if (rows.size() - first >= 2) {
      std::vector<double> x, y;
      for (std::size_t k = first; k < rows.size(); ++k) {
        x.push_back(rows[k].kn);
        y.push_back(static_cast<double>(rows[k].iterations));
      }
      const double e = fit_exponent(x, y);
      for (std::size_t k = first; k < rows.size(); ++k) rows[k].fitted_exponent = e;
    }
  }
  return rows;
}

inline CsvTable scaling_table(const std::vector<ScalingRow>& rows) {
  CsvTable t{{"tol", "k_n", "unknowns", "iterations", "time_per_iteration_s", "fitted_exponent"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({fmt(r.tol), std::to_string(r.kn), std::to_string(r.unknowns), std::to_string(r.iterations),
                      fmt(r.time_per_iteration), fmt(r.fitted_exponent)});
  }
  return t;
}

/// Ratios t_k / (c k_n² log k_n), with c the geometric mean constant. A run
/// fits the model within a ×2 band when every ratio lies in [1/2, 2].
inline std::vector<double> complexity_ratios(const std::vector<int>& kns, const std::vector<double>& times) {
  if (kns.size() != times.size() || kns.empty()) throw InvalidArgument("complexity_ratios: size mismatch");
  std::vector<double> c(kns.size());
  double logc = 0.0;
  for (std::size_t k = 0; k < kns.size(); ++k) {
    if (kns[k] < 2) throw InvalidArgument("complexity_ratios needs k_n >= 2");
    const double n = kns[k];
    c[k] = times[k] / (n * n * std::log(n));
    logc += std::log(c[k]);
  }
  const double cg = std::exp(logc / static_cast<double>(kns.size()));
  for (double& v : c) v /= cg;
  return c;
}

}  // namespace fftddm::bench
