#pragma once

// Brute-force reference kernels: dense assembly straight from the 5-point
// stencil, cyclic-Jacobi symmetric eigensolver, LU with partial pivoting.
// Nothing here touches the FFT path, so it can be used to check it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "fftddm/error.hpp"
#include "fftddm/geometry.hpp"

namespace fftddm::oracle {

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0.0) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
    return m;
  }

  double& operator()(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = (*this)(r, c);
    return out;
  }
  void set_column(std::size_t c, const std::vector<double>& v) {
    for (std::size_t r = 0; r < rows; ++r) (*this)(r, c) = v[r];
  }
};

inline constexpr std::size_t kAssemblyGuard = 10000;
inline constexpr std::size_t kEigGuard = 512;

inline double max_abs(const DenseMatrix& m) {
  double out = 0.0;
  for (double v : m.entries) out = std::max(out, std::abs(v));
  return out;
}

/// Infinity norm (max row sum).
inline double norm_inf(const DenseMatrix& m) {
  double out = 0.0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) s += std::abs(m(r, c));
    out = std::max(out, s);
  }
  return out;
}

inline double norm_inf(const std::vector<double>& v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

inline std::vector<double> matvec(const DenseMatrix& m, const std::vector<double>& v) {
  if (v.size() != m.cols) throw InvalidArgument("matvec: dimension mismatch");
  std::vector<double> out(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) s += m(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw InvalidArgument("matmul: dimension mismatch");
  DenseMatrix out(a.rows, b.cols);
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double x = a(r, k);
      if (x == 0.0) continue;
      for (std::size_t c = 0; c < b.cols; ++c) out(r, c) += x * b(k, c);
    }
  }
  return out;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols, a.rows);
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t c = 0; c < a.cols; ++c) out(c, r) = a(r, c);
  }
  return out;
}

inline DenseMatrix block(const DenseMatrix& a, std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) {
  if (r0 + rows > a.rows || c0 + cols > a.cols) throw InvalidArgument("block outside matrix");
  DenseMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = a(r0 + r, c0 + c);
  }
  return out;
}

// Stencil contribution of one missing neighbour across a wall.
inline double wall_diagonal(BoundaryKind k, double delta) {
  switch (k) {
    case BoundaryKind::Neumann: return delta;
    case BoundaryKind::DirichletFace: return -delta;
    default: return 0.0;
  }
}

/// Line matrix of n nodes for a boundary pair (lo, hi): off-diagonal δt,
/// diagonal -2(δt+δo)+κ plus the wall terms at each end; periodic pairs wrap.
inline DenseMatrix assemble_line_matrix(BoundaryKind lo, BoundaryKind hi, std::size_t n, double delta_t,
                                        double delta_o, double kappa) {
  if (n == 0) throw InvalidArgument("line matrix needs n >= 1");
  DenseMatrix a(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    a(j, j) += -2.0 * (delta_t + delta_o) + kappa;
    if (j > 0) {
      a(j, j - 1) += delta_t;
    } else if (lo == BoundaryKind::Periodic) {
      a(j, n - 1) += delta_t;
    } else {
      a(j, j) += wall_diagonal(lo, delta_t);
    }
    if (j + 1 < n) {
      a(j, j + 1) += delta_t;
    } else if (hi == BoundaryKind::Periodic) {
      a(j, 0) += delta_t;
    } else {
      a(j, j) += wall_diagonal(hi, delta_t);
    }
  }
  return a;
}

inline DenseMatrix assemble_axis_matrix(AxisBC bc, std::size_t n, double delta_t, double delta_o, double kappa) {
  switch (bc) {
    case AxisBC::DD:
      return assemble_line_matrix(BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, n, delta_t, delta_o, kappa);
    case AxisBC::NN:
      return assemble_line_matrix(BoundaryKind::Neumann, BoundaryKind::Neumann, n, delta_t, delta_o, kappa);
    case AxisBC::PP:
      return assemble_line_matrix(BoundaryKind::Periodic, BoundaryKind::Periodic, n, delta_t, delta_o, kappa);
  }
  return {};
}

/// The m·n × m·n 5-point operator of one rectangle, node by node.
inline DenseMatrix assemble_rect_matrix(const RectSubdomain& s) {
  const std::size_t size = s.m * s.n;
  if (size > kAssemblyGuard) {
    throw InvalidArgument("dense rectangle assembly limited to " + std::to_string(kAssemblyGuard) + " unknowns");
  }
  DenseMatrix a(size, size);
  const double dx = s.delta_x();
  const double dy = s.delta_y();
  auto idx = [&](std::size_t i, std::size_t j) { return i * s.n + j; };  // 0-based
  for (std::size_t i = 0; i < s.m; ++i) {
    for (std::size_t j = 0; j < s.n; ++j) {
      const std::size_t r = idx(i, j);
      a(r, r) += -2.0 * (dx + dy) + s.kappa;
      struct Nb {
        bool inside;
        std::size_t col;
        BoundaryKind wall;
        std::size_t wrap;
        double delta;
      };
      const Nb nbs[4] = {
          {i > 0, i > 0 ? idx(i - 1, j) : 0, s.bc(Edge::West), idx(s.m - 1, j), dx},
          {i + 1 < s.m, i + 1 < s.m ? idx(i + 1, j) : 0, s.bc(Edge::East), idx(0, j), dx},
          {j > 0, j > 0 ? idx(i, j - 1) : 0, s.bc(Edge::South), idx(i, s.n - 1), dy},
          {j + 1 < s.n, j + 1 < s.n ? idx(i, j + 1) : 0, s.bc(Edge::North), idx(i, 0), dy},
      };
      for (const auto& nb : nbs) {
        if (nb.inside) {
          a(r, nb.col) += nb.delta;
        } else if (nb.wall == BoundaryKind::Periodic) {
          a(r, nb.wrap) += nb.delta;
        } else {
          a(r, r) += wall_diagonal(nb.wall, nb.delta);
        }
      }
    }
  }
  return a;
}

/// Offsets of each subdomain's block in the global unknown vector, in the
/// composite's subdomain order.
inline std::vector<std::size_t> global_offsets(const CompositeDomain& c) {
  std::vector<std::size_t> off;
  std::size_t acc = 0;
  for (const auto& s : c.subdomains()) {
    off.push_back(acc);
    acc += s.size();
  }
  return off;
}

/// Block system with A_i on the diagonal and R_ij = R_jiᵀ coupling blocks.
inline DenseMatrix assemble_global_matrix(const CompositeDomain& c) {
  const std::size_t total = c.total_unknowns();
  if (total > kAssemblyGuard) {
    throw InvalidArgument("dense global assembly limited to " + std::to_string(kAssemblyGuard) + " unknowns");
  }
  DenseMatrix g(total, total);
  const auto off = global_offsets(c);
  for (std::size_t k = 0; k < c.subdomains().size(); ++k) {
    const auto a = assemble_rect_matrix(c.subdomains()[k]);
    for (std::size_t r = 0; r < a.rows; ++r) {
      for (std::size_t col = 0; col < a.cols; ++col) g(off[k] + r, off[k] + col) = a(r, col);
    }
  }
  for (const auto& itf : c.interfaces()) {
    const std::size_t oa = off[c.index_of(itf.side_a.subdomain_id)];
    const std::size_t ob = off[c.index_of(itf.side_b.subdomain_id)];
    for (const auto& [ia, ib] : itf.index_map) {
      g(oa + ia, ob + ib) += itf.coupling;
      g(ob + ib, oa + ia) += itf.coupling;
    }
  }
  return g;
}

/// Explicit eigenvector matrix from the closed forms (column k = mode k).
inline DenseMatrix closed_form_q(AxisBC bc, std::size_t n) {
  if (n == 0) throw InvalidArgument("closed_form_q needs n >= 1");
  if (bc == AxisBC::PP && n % 2 != 0) throw InvalidArgument("periodic Q needs even n");
  const double pi = std::numbers::pi;
  const double dn = static_cast<double>(n);
  DenseMatrix q(n, n);
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t k = 1; k <= n; ++k) {
      const double dj = static_cast<double>(j);
      const double dk = static_cast<double>(k);
      double v = 0.0;
      switch (bc) {
        case AxisBC::DD:
          v = std::sqrt(2.0 / (dn + 1.0)) * std::sin(dj * dk * pi / (dn + 1.0));
          break;
        case AxisBC::NN:
          v = std::sqrt(2.0 / dn) * std::sin((2.0 * dj * dk - dk - 2.0 * dn * dj) * pi / (2.0 * dn));
          if (k == n) v += (1.0 + std::numbers::sqrt2) / std::sqrt(dn);
          break;
        case AxisBC::PP: {
          const double w = static_cast<double>((n + 1 - k) / 2);
          v = std::sqrt(2.0 / dn) * std::sin(2.0 * pi * dj * w / dn + pi * (2.0 * dk - 1.0) / 4.0);
          break;
        }
      }
      q(j - 1, k - 1) = v;
    }
  }
  return q;
}

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  DenseMatrix eigenvectors;         // column k pairs with eigenvalues[k]
};

/// Cyclic Jacobi rotations on a symmetric matrix.
inline EigenDecomposition dense_eig_symmetric(const DenseMatrix& m) {
  if (m.rows != m.cols) throw InvalidArgument("eigensolver needs a square matrix");
  const std::size_t n = m.rows;
  if (n > kEigGuard) throw InvalidArgument("dense eigensolver limited to n <= " + std::to_string(kEigGuard));
  const double scale = std::max(max_abs(m), std::numeric_limits<double>::min());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r + 1; c < n; ++c) {
      if (std::abs(m(r, c) - m(c, r)) > 1e-12 * scale) throw InvalidArgument("eigensolver input is not symmetric");
    }
  }
  DenseMatrix a = m;
  DenseMatrix v = DenseMatrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r + 1; c < n; ++c) off += a(r, c) * a(r, c);
    }
    if (std::sqrt(off) <= 1e-15 * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  EigenDecomposition out{std::vector<double>(n), DenseMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

struct LuFactorization {
  DenseMatrix lu;
  std::vector<std::size_t> perm;
};

inline LuFactorization lu_factor(const DenseMatrix& m) {
  if (m.rows != m.cols) throw InvalidArgument("LU needs a square matrix");
  const std::size_t n = m.rows;
  LuFactorization f{m, std::vector<std::size_t>(n)};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  auto& a = f.lu;
  const double tiny = static_cast<double>(std::max<std::size_t>(n, 1)) * std::numeric_limits<double>::epsilon() *
                      norm_inf(m);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(a(r, k)) > std::abs(a(piv, k))) piv = r;
    }
    if (std::abs(a(piv, k)) <= tiny) throw SingularError("matrix is singular to working precision");
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
      std::swap(f.perm[k], f.perm[piv]);
    }
    const double inv = 1.0 / a(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double l = a(r, k) * inv;
      a(r, k) = l;
      if (l == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= l * a(k, c);
    }
  }
  return f;
}

inline std::vector<double> lu_solve(const LuFactorization& f, const std::vector<double>& rhs) {
  const std::size_t n = f.lu.rows;
  if (rhs.size() != n) throw InvalidArgument("LU solve: rhs length mismatch");
  std::vector<double> x(n);
  for (std::size_t r = 0; r < n; ++r) x[r] = rhs[f.perm[r]];
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < r; ++c) x[r] -= f.lu(r, c) * x[c];
  }
  for (std::size_t r = n; r-- > 0;) {
    for (std::size_t c = r + 1; c < n; ++c) x[r] -= f.lu(r, c) * x[c];
    x[r] /= f.lu(r, r);
  }
  return x;
}

inline std::vector<double> dense_lu_solve(const DenseMatrix& m, const std::vector<double>& rhs) {
  return lu_solve(lu_factor(m), rhs);
}

inline DenseMatrix dense_inverse(const DenseMatrix& m) {
  const auto f = lu_factor(m);
  DenseMatrix inv(m.rows, m.cols);
  std::vector<double> e(m.rows, 0.0);
  for (std::size_t c = 0; c < m.cols; ++c) {
    e[c] = 1.0;
    inv.set_column(c, lu_solve(f, e));
    e[c] = 0.0;
  }
  return inv;
}

/// Dense blocks needed for Schur-complement checks around one host subdomain.
struct SchurBlocks {
  DenseMatrix host;        // A_c
  DenseMatrix schur_sum;   // Σ R_ci A_i⁻¹ R_ic
};

inline SchurBlocks dense_schur_blocks(const CompositeDomain& c, int host_id) {
  const auto g = assemble_global_matrix(c);
  const auto off = global_offsets(c);
  const std::size_t hk = c.index_of(host_id);
  const auto& host = c.subdomains()[hk];
  SchurBlocks out{block(g, off[hk], off[hk], host.size(), host.size()), DenseMatrix(host.size(), host.size())};
  for (std::size_t k = 0; k < c.subdomains().size(); ++k) {
    if (k == hk) continue;
    const auto& s = c.subdomains()[k];
    const auto rci = block(g, off[hk], off[k], host.size(), s.size());
    bool touches = false;
    for (double v : rci.entries) touches = touches || v != 0.0;
    if (!touches) continue;
    const auto ric = block(g, off[k], off[hk], s.size(), host.size());
    const auto ai_inv = dense_inverse(block(g, off[k], off[k], s.size(), s.size()));
    const auto term = matmul(rci, matmul(ai_inv, ric));
    for (std::size_t e = 0; e < term.entries.size(); ++e) out.schur_sum.entries[e] += term.entries[e];
  }
  return out;
}

}  // namespace fftddm::oracle
