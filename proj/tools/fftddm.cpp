// Command-line driver for the cross benchmark studies and ad-hoc solves.
//
//   fftddm solve --case cross --kn 16 --out run/
//   fftddm solve --config data/l_shape.cfg --out run/
//   fftddm convergence --kn-list 4,8,16,32,64
//   fftddm precond-compare --kn-list 8,16 --m-list 20,80 --precond fft,jacobi,identity --out cmp/
//   fftddm scaling --kn-list 8,16,32,64,128 --tol-list 1e-7,1e-10
//   fftddm oracle-check --kn 2
//   fftddm export-config --kn 2 > cross.cfg
//
// Errors end with a single "error=<kind> message=<text>" line on stderr and
// exit status 1 (2 for usage errors).

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "fftddm/fftddm.hpp"

using namespace fftddm;
namespace fs = std::filesystem;

namespace {

Preconditioner parse_precond(const std::string& s) {
  if (s == "fft") return Preconditioner::Fft;
  if (s == "jacobi") return Preconditioner::Jacobi;
  if (s == "identity" || s == "none") return Preconditioner::Identity;
  throw InvalidArgument("unknown preconditioner '" + s + "' (expected fft, jacobi or identity)");
}

// Writes to <out>/<name> when an output location was given, else to stdout.
void publish(const bench::CsvTable& t, const std::string& out, const std::string& name) {
  if (out.empty()) {
    std::cout << bench::to_csv_text(t);
    return;
  }
  fs::create_directories(out);
  const auto path = (fs::path(out) / name).string();
  bench::emit_csv(t, path);
  std::cerr << "wrote " << path << "\n";
}

bench::CsvTable history_table(const SolveReport& r) {
  bench::CsvTable h{{"iteration", "relative_residual"}, {}};
  for (std::size_t k = 0; k < r.residual_history.size(); ++k) {
    h.rows.push_back({std::to_string(k), bench::fmt(r.residual_history[k])});
  }
  return h;
}

struct SolveArgs {
  std::string case_name = "cross";
  std::string config;
  int kn = 16;
  std::size_t m = 80;
  double tol = 1e-10;
  int max_restarts = 200;
  double kappa = 0.0;
  double rhs = 1.0;
  bool paper_literal = false;
  std::string precond = "fft";
  std::string out;
};

int run_solve(const SolveArgs& a) {
  GmresConfig cfg;
  cfg.m = a.m;
  cfg.tol = a.tol;
  cfg.max_restarts = static_cast<std::size_t>(a.max_restarts);
  cfg.preconditioner = parse_precond(a.precond);

  if (!a.config.empty()) {
    // Arbitrary composite with a constant source term.
    const auto c = load_composite(a.config);
    std::vector<GridField> f;
    for (const auto& s : c.subdomains()) f.push_back(GridField{s.id, std::vector<double>(s.size(), a.rhs)});
    const auto res = ddm_solve(c, f, cfg);
    bench::CsvTable summary{{"source", "unknowns", "iterations", "converged", "global_residual", "wall_time_s"},
                            {{a.config, std::to_string(c.total_unknowns()), std::to_string(res.report.iterations),
                              res.report.converged ? "1" : "0", bench::fmt(res.global_residual),
                              bench::fmt(res.report.wall_time)}}};
    publish(summary, a.out, "summary.csv");
    if (!a.out.empty()) {
      bench::emit_field(c, res.fields, (fs::path(a.out) / "solution.csv").string());
      bench::emit_csv(history_table(res.report), (fs::path(a.out) / "history.csv").string());
    }
    return 0;
  }

  if (a.case_name != "cross") throw InvalidArgument("unknown case '" + a.case_name + "' (only 'cross' is built in)");
  bench::SolveOptions opt;
  opt.kappa = a.kappa;
  opt.constants = a.paper_literal ? bench::CrossConstants::PaperLiteral : bench::CrossConstants::Corrected;
  opt.gmres = cfg;
  const auto s = bench::solve_cross(a.kn, opt);
  bench::CsvTable summary{
      {"k_n", "unknowns", "iterations", "converged", "linf_error", "l2_error", "global_residual", "wall_time_s"},
      {{std::to_string(a.kn), std::to_string(s.problem.composite.total_unknowns()),
        std::to_string(s.report.iterations), s.report.converged ? "1" : "0", bench::fmt(s.linf), bench::fmt(s.l2),
        bench::fmt(s.global_residual), bench::fmt(s.report.wall_time)}}};
  publish(summary, a.out, "summary.csv");
  if (!a.out.empty()) {
    bench::emit_field(s.problem.composite, s.numeric, (fs::path(a.out) / "solution.csv").string());
    bench::emit_field(s.problem.composite, s.exact, (fs::path(a.out) / "exact.csv").string());
    bench::emit_csv(history_table(s.report), (fs::path(a.out) / "history.csv").string());
  }
  return 0;
}

// Dense-oracle equivalence for the cross at a small k_n. Every check is
// reported; the exit status is nonzero if any of them misses its bound.
int run_oracle_check(int kn, unsigned seed) {
  if (kn < 1 || kn > 4) throw InvalidArgument("oracle-check builds dense matrices; use 1 <= kn <= 4");
  const auto c = bench::build_cross(1.0 / 7.0, kn).composite;
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto random_vec = [&](std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = dist(gen);
    return v;
  };
  auto rel = [](const std::vector<double>& got, const std::vector<double>& ref) {
    double d = 0.0, m = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      d = std::max(d, std::abs(got[k] - ref[k]));
      m = std::max(m, std::abs(ref[k]));
    }
    return m > 0.0 ? d / m : d;
  };

  bench::CsvTable t{{"check", "max_rel_error", "bound", "status"}, {}};
  bool ok = true;
  auto record = [&](const std::string& name, double err, double bound) {
    const bool pass = err <= bound;
    ok = ok && pass;
    t.rows.push_back({name, bench::fmt(err), bench::fmt(bound), pass ? "pass" : "fail"});
  };

  double rect = 0.0;
  for (const auto& s : c.subdomains()) {
    const RectPlan plan(s);
    for (int trial = 0; trial < 5; ++trial) {
      const auto f = random_vec(s.size());
      std::vector<double> p(s.size());
      plan.solve(f, p);
      rect = std::max(rect, rel(p, oracle::dense_lu_solve(oracle::assemble_rect_matrix(s), f)));
    }
  }
  record("rect_solve", rect, 1e-10);

  const int host = c.coupled_ids().front();
  const SchurOperator op(c, host);
  const auto blocks = oracle::dense_schur_blocks(c, host);
  double schur = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = random_vec(op.size());
    std::vector<double> got(op.size());
    op.apply_schur(p, got);
    schur = std::max(schur, rel(got, oracle::matvec(blocks.schur_sum, p)));
  }
  record("schur_apply", schur, 1e-9);

  const auto lu = oracle::lu_factor(oracle::assemble_global_matrix(c));
  double global = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<GridField> f;
    std::vector<double> flat;
    for (const auto& s : c.subdomains()) {
      f.push_back(GridField{s.id, random_vec(s.size())});
      flat.insert(flat.end(), f.back().values.begin(), f.back().values.end());
    }
    const auto res = ddm_solve(c, f);
    std::vector<double> got;
    for (const auto& g : res.fields) got.insert(got.end(), g.values.begin(), g.values.end());
    global = std::max(global, rel(got, oracle::lu_solve(lu, flat)));
  }
  record("global_solve", global, 1e-8);

  std::cout << bench::to_csv_text(t);
  if (!ok) {
    std::cerr << "error=oracle_mismatch message=dense equivalence failed at kn=" << kn << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FFT domain-decomposition solver for composite rectangles"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve one problem and write summary, field and residual history");
  solve->add_option("--case", sa.case_name, "Built-in case")->check(CLI::IsMember({"cross"}));
  solve->add_option("--config", sa.config, "Composite description file (replaces --case)")->check(CLI::ExistingFile);
  solve->add_option("--kn", sa.kn, "Nodes per length L")->check(CLI::PositiveNumber);
  solve->add_option("--m", sa.m, "GMRES restart length")->check(CLI::PositiveNumber);
  solve->add_option("--tol", sa.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--max-restarts", sa.max_restarts, "GMRES restart cycles")->check(CLI::PositiveNumber);
  solve->add_option("--kappa", sa.kappa, "Helmholtz shift");
  solve->add_option("--rhs", sa.rhs, "Constant source term for --config runs");
  solve->add_flag("--paper-literal-constants", sa.paper_literal, "Use the printed cross constants");
  solve->add_option("--precond", sa.precond, "fft, jacobi or identity");
  solve->add_option("--out", sa.out, "Output directory");

  std::vector<int> conv_kns{4, 8, 16, 32, 64};
  std::string conv_out;
  double conv_kappa = 0.0;
  auto* conv = app.add_subcommand("convergence", "Error and observed order over a k_n sweep");
  conv->add_option("--kn-list", conv_kns, "Comma-separated k_n values")->delimiter(',');
  conv->add_option("--kappa", conv_kappa, "Helmholtz shift");
  conv->add_option("--out", conv_out, "Output directory (stdout when omitted)");

  std::vector<int> pc_kns{8, 16};
  std::vector<std::size_t> pc_ms{80};
  std::vector<std::string> pc_names{"fft", "jacobi", "identity"};
  double pc_tol = 1e-7;
  std::string pc_out;
  auto* pcc = app.add_subcommand("precond-compare", "Iteration counts per preconditioner and restart length");
  pcc->add_option("--kn-list", pc_kns, "Comma-separated k_n values")->delimiter(',');
  pcc->add_option("--m-list", pc_ms, "Comma-separated restart lengths")->delimiter(',');
  pcc->add_option("--precond", pc_names, "Comma-separated preconditioners")->delimiter(',');
  pcc->add_option("--tol", pc_tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
  pcc->add_option("--out", pc_out, "Output directory; residual histories go to <out>/histories");

  std::vector<int> sc_kns{8, 16, 32, 64, 128};
  std::vector<double> sc_tols{1e-7, 1e-10};
  std::size_t sc_m = 80;
  int sc_repeats = 5;
  std::string sc_out;
  auto* sc = app.add_subcommand("scaling", "Iterations and per-iteration time over a k_n sweep");
  sc->add_option("--kn-list", sc_kns, "Comma-separated k_n values")->delimiter(',');
  sc->add_option("--tol-list", sc_tols, "Comma-separated tolerances")->delimiter(',');
  sc->add_option("--m", sc_m, "GMRES restart length")->check(CLI::PositiveNumber);
  sc->add_option("--repeats", sc_repeats, "Timed repeats per point (median reported)")->check(CLI::PositiveNumber);
  sc->add_option("--out", sc_out, "Output directory (stdout when omitted)");

  int oc_kn = 2;
  unsigned oc_seed = 1;
  auto* oc = app.add_subcommand("oracle-check", "Compare fast solves against dense reference solves");
  oc->add_option("--kn", oc_kn, "Nodes per length L (1..4)");
  oc->add_option("--seed", oc_seed, "Seed for the random right-hand sides");

  int ex_kn = 2;
  double ex_kappa = 0.0;
  auto* ex = app.add_subcommand("export-config", "Print the cross composite in config-file form");
  ex->add_option("--kn", ex_kn, "Nodes per length L")->check(CLI::PositiveNumber);
  ex->add_option("--kappa", ex_kappa, "Helmholtz shift");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error=usage message=" << e.what() << "\n";
    return 2;
  }

  try {
    configure_threads_from_env();
    if (*solve) return run_solve(sa);
    if (*conv) {
      bench::SolveOptions opt;
      opt.kappa = conv_kappa;
      publish(bench::convergence_table(bench::run_convergence(conv_kns, opt)), conv_out, "convergence.csv");
    } else if (*pcc) {
      std::vector<Preconditioner> pcs;
      for (const auto& n : pc_names) pcs.push_back(parse_precond(n));
      bench::PrecondOptions opt;
      opt.solve.gmres.tol = pc_tol;
      if (!pc_out.empty()) opt.history_dir = (fs::path(pc_out) / "histories").string();
      publish(bench::precond_table(bench::run_precond_compare(pc_kns, pc_ms, pcs, opt)), pc_out, "precond.csv");
    } else if (*sc) {
      bench::ScalingOptions opt;
      opt.solve.gmres.m = sc_m;
      opt.repeats = sc_repeats;
      publish(bench::scaling_table(bench::run_scaling(sc_kns, sc_tols, opt)), sc_out, "scaling.csv");
    } else if (*oc) {
      return run_oracle_check(oc_kn, oc_seed);
    } else if (*ex) {
      std::cout << to_config_text(bench::build_cross(1.0 / 7.0, ex_kn, ex_kappa).composite);
    }
  } catch (const Error& e) {
    std::cerr << "error=" << e.kind() << " message=" << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error=internal message=" << e.what() << "\n";
    return 1;
  }
  return 0;
}
