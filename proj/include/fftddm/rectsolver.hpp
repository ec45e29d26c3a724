#pragma once

// Direct Helmholtz-Poisson solver on one rectangle.
//
// The field is transformed line by line into the eigenbasis of the transform
// axis, which decouples it into one tridiagonal system per spectral mode
// along the other ("Thomas") axis. The transform axis is y whenever the y
// boundary pair admits a transform; otherwise the plan transposes internally
// and transforms along x. Callers always see the (i-1)*n + (j-1) layout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fftddm/error.hpp"
#include "fftddm/geometry.hpp"
#include "fftddm/transforms.hpp"

namespace fftddm {

enum class XSolverKind { Standard, CornerModified, Cyclic };

/// What to do when the operator has a nullspace (all-Neumann/periodic, κ=0).
enum class SingularPolicy { Error, PinMean };

namespace detail {

/// N independent tridiagonal systems of length L sharing one off-diagonal,
/// stored mode-minor ([l][k]) so each elimination step streams over modes.
class BatchTridiag {
 public:
  BatchTridiag() = default;

  /// diag(l, k) is the full diagonal including end modifications. With
  /// cyclic = true the (0, L-1) and (L-1, 0) entries are `off` as well.
  template <class DiagFn>
  BatchTridiag(std::size_t L, std::size_t N, double off, bool cyclic, DiagFn diag, double scale)
      : L_(L), N_(N), off_(off), cyclic_(cyclic), inv_piv_(L * N, 0.0), singular_(N, false) {
    const double tol = 1e-13 * scale;
    if (cyclic_) {
      const double pi = std::numbers::pi;
      for (std::size_t k = 0; k < N; ++k) {
        for (std::size_t q = 0; q < L; ++q) {
          const double ev = diag(0, k) + 2.0 * off * std::cos(2.0 * pi * static_cast<double>(q) / static_cast<double>(L));
          if (std::abs(ev) < tol) singular_[k] = true;
        }
      }
    }
    if (cyclic_ && L == 1) {
      // Self-wrap on both sides.
      for (std::size_t k = 0; k < N; ++k) set_inv(0, k, diag(0, k) + 2.0 * off, tol);
      cyclic_ = false;
      off_ = 0.0;
      return;
    }
    if (cyclic_ && L == 2) {
      off_ = 2.0 * off;
      cyclic_ = false;
      factor_standard(diag, tol);
      zero_singular_modes();
      return;
    }
    if (!cyclic_) {
      factor_standard(diag, tol);
      return;
    }
    // Sherman-Morrison: A = B + u vᵀ with u = (γ, 0.., off), v = (1, 0.., off/γ).
    gamma_.assign(N, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
      const double d0 = diag(0, k);
      gamma_[k] = std::abs(d0) > 1e-3 * std::abs(off) ? -d0 : -off;
    }
    auto bdiag = [&](std::size_t l, std::size_t k) {
      double d = diag(l, k);
      if (l == 0) d -= gamma_[k];
      if (l == L_ - 1) d -= off * off / gamma_[k];
      return d;
    };
    factor_standard(bdiag, tol);
    zero_singular_modes();
    z_.assign(L * N, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
      if (singular_[k]) continue;
      z_[k] = gamma_[k];
      z_[(L - 1) * N + k] = off;
    }
    solve_standard(z_.data());
    sm_scale_.assign(N, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
      if (singular_[k]) continue;
      const double vz = z_[k] + off / gamma_[k] * z_[(L - 1) * N + k];
      sm_scale_[k] = 1.0 / (1.0 + vz);
    }
  }

  std::size_t lines() const { return L_; }
  std::size_t modes() const { return N_; }
  bool singular(std::size_t k) const { return singular_[k]; }

  /// In-place solve of all modes; singular modes come out as zero.
  void solve(double* x) const {
    solve_standard(x);
    if (!cyclic_) return;
    for (std::size_t k = 0; k < N_; ++k) {
      if (singular_[k]) continue;
      const double vy = x[k] + off_ / gamma_[k] * x[(L_ - 1) * N_ + k];
      const double c = vy * sm_scale_[k];
      if (c == 0.0) continue;
      for (std::size_t l = 0; l < L_; ++l) x[l * N_ + k] -= c * z_[l * N_ + k];
    }
  }

 private:
  void set_inv(std::size_t l, std::size_t k, double pivot, double tol) {
    if (std::abs(pivot) < tol || !std::isfinite(pivot)) {
      singular_[k] = true;
      return;
    }
    inv_piv_[l * N_ + k] = 1.0 / pivot;
  }

  template <class DiagFn>
  void factor_standard(DiagFn diag, double tol) {
    for (std::size_t k = 0; k < N_; ++k) {
      double piv = diag(0, k);
      set_inv(0, k, piv, tol);
      for (std::size_t l = 1; l < L_ && !singular_[k]; ++l) {
        piv = diag(l, k) - off_ * off_ * inv_piv_[(l - 1) * N_ + k];
        set_inv(l, k, piv, tol);
      }
    }
    zero_singular_modes();
  }

  void zero_singular_modes() {
    for (std::size_t k = 0; k < N_; ++k) {
      if (!singular_[k]) continue;
      for (std::size_t l = 0; l < L_; ++l) inv_piv_[l * N_ + k] = 0.0;
    }
  }

  void solve_standard(double* x) const {
    for (std::size_t k = 0; k < N_; ++k) x[k] *= inv_piv_[k];
    for (std::size_t l = 1; l < L_; ++l) {
      double* cur = x + l * N_;
      const double* prev = x + (l - 1) * N_;
      const double* ip = inv_piv_.data() + l * N_;
      for (std::size_t k = 0; k < N_; ++k) cur[k] = (cur[k] - off_ * prev[k]) * ip[k];
    }
    for (std::size_t l = L_ - 1; l-- > 0;) {
      double* cur = x + l * N_;
      const double* next = x + (l + 1) * N_;
      const double* ip = inv_piv_.data() + l * N_;
      for (std::size_t k = 0; k < N_; ++k) cur[k] -= off_ * ip[k] * next[k];
    }
  }

  std::size_t L_ = 0;
  std::size_t N_ = 0;
  double off_ = 0.0;
  bool cyclic_ = false;
  std::vector<double> inv_piv_;
  std::vector<bool> singular_;
  std::vector<double> gamma_;
  std::vector<double> z_;
  std::vector<double> sm_scale_;
};

inline double end_modification(BoundaryKind k, double delta) {
  switch (k) {
    case BoundaryKind::Neumann: return delta;
    case BoundaryKind::DirichletFace: return -delta;
    default: return 0.0;
  }
}

}  // namespace detail

/// Solves one tridiagonal system with constant off-diagonal `off`.
/// CornerModified adds `off` to the first and last diagonal entries (Neumann
/// ends); Cyclic adds the wrap-around entries.
inline std::vector<double> thomas_solve(std::vector<double> diag, double off, std::vector<double> rhs,
                                        XSolverKind kind) {
  const std::size_t m = diag.size();
  if (m == 0 || rhs.size() != m) throw InvalidArgument("thomas_solve: diag and rhs must have equal nonzero length");
  if (kind == XSolverKind::CornerModified) {
    diag.front() += off;
    diag.back() += off;
  }
  double scale = std::abs(off);
  for (double d : diag) scale = std::max(scale, std::abs(d));
  detail::BatchTridiag t(m, 1, off, kind == XSolverKind::Cyclic, [&](std::size_t l, std::size_t) { return diag[l]; },
                         scale);
  if (t.singular(0)) throw SingularError("thomas_solve: zero pivot");
  t.solve(rhs.data());
  return rhs;
}

class RectPlan {
 public:
  RectPlan(const RectSubdomain& s, SingularPolicy policy = SingularPolicy::Error) : sub_(s), policy_(policy) {
    if (s.m < 1 || s.n < 1 || !(s.dx > 0.0) || !(s.dy > 0.0)) {
      throw InvalidArgument("subdomain " + std::to_string(s.id) + " has invalid grid parameters");
    }
    if (!s.axis_family(Axis::X) || !s.axis_family(Axis::Y)) {
      throw ValidationError("subdomain " + std::to_string(s.id) + " has a mixed boundary pair");
    }
    if (s.transformable(Axis::Y)) {
      taxis_ = Axis::Y;
    } else if (s.transformable(Axis::X)) {
      taxis_ = Axis::X;
    } else {
      throw ValidationError("subdomain " + std::to_string(s.id) + " has no transformable axis");
    }
    const Axis oaxis = taxis_ == Axis::Y ? Axis::X : Axis::Y;
    const AxisBC tfam = *s.axis_family(taxis_);
    const AxisBC ofam = *s.axis_family(oaxis);
    N_ = s.count(taxis_);
    L_ = s.count(oaxis);
    spectral_.emplace(tfam, N_, s.delta(taxis_), s.delta(oaxis), s.kappa);

    const double off = s.delta(oaxis);
    const auto [lo, hi] = s.axis_pair(oaxis);
    const bool cyclic = ofam == AxisBC::PP;
    if (cyclic) {
      xkind_ = XSolverKind::Cyclic;
    } else if (lo == BoundaryKind::Neumann || hi == BoundaryKind::Neumann || lo == BoundaryKind::DirichletFace ||
               hi == BoundaryKind::DirichletFace) {
      xkind_ = XSolverKind::CornerModified;
    }
    const double mod_lo = cyclic ? 0.0 : detail::end_modification(lo, off);
    const double mod_hi = cyclic ? 0.0 : detail::end_modification(hi, off);
    const auto& lambda = spectral_->eigenvalues();
    auto diag = [&, mod_lo, mod_hi](std::size_t l, std::size_t k) {
      double d = lambda[k];
      if (l == 0) d += mod_lo;
      if (l + 1 == L_) d += mod_hi;
      return d;
    };
    double scale = 2.0 * std::abs(off);
    for (double v : lambda) scale = std::max(scale, std::abs(v));
    tri_ = detail::BatchTridiag(L_, N_, off, cyclic, diag, scale);

    std::vector<std::size_t> singular;
    for (std::size_t k = 0; k < N_; ++k) {
      if (tri_.singular(k)) singular.push_back(k);
    }
    if (singular.empty()) return;
    const bool constant_nullspace = (tfam == AxisBC::NN || tfam == AxisBC::PP) &&
                                    (ofam == AxisBC::NN || ofam == AxisBC::PP) && singular.size() == 1 &&
                                    singular.front() == N_ - 1;
    if (policy_ == SingularPolicy::Error || !constant_nullspace) {
      throw SingularError("subdomain " + std::to_string(s.id) +
                          ": operator is singular (constant nullspace); pin-mean policy available for "
                          "all-Neumann/periodic rectangles");
    }
    // Pinned mode: drop the first line and solve the remaining L-1 rows,
    // which form a plain tridiagonal system in both the NN and PP cases.
    pin_mode_ = N_ - 1;
    if (L_ > 1) {
      const double pin_off = (cyclic && L_ == 2) ? 2.0 * off : off;
      auto reduced = [&, mod_hi](std::size_t l, std::size_t) {
        double d = lambda[N_ - 1];
        if (l + 2 == L_) d += mod_hi;
        return d;
      };
      pin_tri_ = detail::BatchTridiag(L_ - 1, 1, pin_off, false, reduced, scale);
      if (pin_tri_.singular(0)) throw SingularError("pinned system is singular");
    }
  }

  const RectSubdomain& subdomain() const { return sub_; }
  Axis transform_axis() const { return taxis_; }
  const SpectralPlan& spectral_plan() const { return *spectral_; }
  XSolverKind x_solver_kind() const { return xkind_; }
  bool pinned() const { return pin_mode_.has_value(); }
  std::size_t size() const { return sub_.size(); }

  /// p = A⁻¹ f. `p` may alias `f`.
  void solve(std::span<const double> f, std::span<double> p) const {
    if (f.size() != size() || p.size() != size()) {
      throw InvalidArgument("solve_rect: field length mismatch on subdomain " + std::to_string(sub_.id));
    }
    std::vector<double> work(size());
    // work[l][k]: lines of the Thomas axis, each of transform length N.
    if (taxis_ == Axis::Y) {
      std::copy(f.begin(), f.end(), work.begin());
    } else {
      const std::size_t n = sub_.n;
      for (std::size_t i = 0; i < sub_.m; ++i) {
        for (std::size_t j = 0; j < n; ++j) work[j * N_ + i] = f[i * n + j];
      }
    }
    transform_lines(work, false);
    std::vector<double> pinned;
    if (pin_mode_) pinned = solve_pinned_mode(work);
    tri_.solve(work.data());
    if (pin_mode_) {
      for (std::size_t l = 0; l < L_; ++l) work[l * N_ + *pin_mode_] = pinned[l];
    }
    transform_lines(work, true);
    if (taxis_ == Axis::Y) {
      std::copy(work.begin(), work.end(), p.begin());
    } else {
      const std::size_t n = sub_.n;
      for (std::size_t i = 0; i < sub_.m; ++i) {
        for (std::size_t j = 0; j < n; ++j) p[i * n + j] = work[j * N_ + i];
      }
    }
  }

 private:
  void transform_lines(std::vector<double>& work, bool inverse) const {
    const SpectralPlan& sp = *spectral_;
    const long lines = static_cast<long>(L_);
#pragma omp parallel if (lines * static_cast<long>(N_) > 32768)
    {
      auto ws = sp.make_workspace();
#pragma omp for schedule(static)
      for (long l = 0; l < lines; ++l) {
        std::span<double> line(work.data() + static_cast<std::size_t>(l) * N_, N_);
        if (inverse) {
          sp.apply_q(line, line, ws);
        } else {
          sp.apply_qt(line, line, ws);
        }
      }
    }
  }

  // Solves the singular mode with the mean projected out. The batch solve
  // leaves that column at zero; the caller writes this result back.
  std::vector<double> solve_pinned_mode(const std::vector<double>& work) const {
    const std::size_t k = *pin_mode_;
    double mean = 0.0;
    for (std::size_t l = 0; l < L_; ++l) mean += work[l * N_ + k];
    mean /= static_cast<double>(L_);
    std::vector<double> pinned(L_, 0.0);
    for (std::size_t l = 1; l < L_; ++l) pinned[l] = work[l * N_ + k] - mean;
    if (L_ > 1) pin_tri_.solve(pinned.data() + 1);
    double pmean = 0.0;
    for (double v : pinned) pmean += v;
    pmean /= static_cast<double>(L_);
    for (double& v : pinned) v -= pmean;
    return pinned;
  }

  RectSubdomain sub_;
  SingularPolicy policy_;
  Axis taxis_ = Axis::Y;
  std::size_t N_ = 0;
  std::size_t L_ = 0;
  std::optional<SpectralPlan> spectral_;
  XSolverKind xkind_ = XSolverKind::Standard;
  detail::BatchTridiag tri_;
  std::optional<std::size_t> pin_mode_;
  detail::BatchTridiag pin_tri_;
};

inline RectPlan plan_rect(const RectSubdomain& s, SingularPolicy policy = SingularPolicy::Error) {
  return RectPlan(s, policy);
}

inline GridField solve_rect(const RectPlan& plan, const GridField& f) {
  if (f.subdomain_id != plan.subdomain().id) {
    throw InvalidArgument("solve_rect: field belongs to subdomain " + std::to_string(f.subdomain_id) +
                          ", plan to " + std::to_string(plan.subdomain().id));
  }
  GridField p{f.subdomain_id, std::vector<double>(f.values.size())};
  plan.solve(f.values, p.values);
  return p;
}

/// Matrix-free application of the rectangle's 5-point operator.
inline void apply_rect_operator(const RectSubdomain& s, std::span<const double> p, std::span<double> out) {
  if (p.size() != s.size() || out.size() != s.size()) throw InvalidArgument("apply_rect_operator: length mismatch");
  const std::size_t m = s.m;
  const std::size_t n = s.n;
  const double dx = s.delta_x();
  const double dy = s.delta_y();
  const double centre = -2.0 * (dx + dy) + s.kappa;
  const bool per_x = s.bc(Edge::West) == BoundaryKind::Periodic;
  const bool per_y = s.bc(Edge::South) == BoundaryKind::Periodic;
  const double mw = detail::end_modification(s.bc(Edge::West), dx);
  const double me = detail::end_modification(s.bc(Edge::East), dx);
  const double ms = detail::end_modification(s.bc(Edge::South), dy);
  const double mn = detail::end_modification(s.bc(Edge::North), dy);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double c = p[i * n + j];
      double acc = centre * c;
      if (i > 0) acc += dx * p[(i - 1) * n + j];
      else if (per_x) acc += dx * p[(m - 1) * n + j];
      else acc += mw * c;
      if (i + 1 < m) acc += dx * p[(i + 1) * n + j];
      else if (per_x) acc += dx * p[j];
      else acc += me * c;
      if (j > 0) acc += dy * p[i * n + j - 1];
      else if (per_y) acc += dy * p[i * n + n - 1];
      else acc += ms * c;
      if (j + 1 < n) acc += dy * p[i * n + j + 1];
      else if (per_y) acc += dy * p[i * n];
      else acc += mn * c;
      out[i * n + j] = acc;
    }
  }
}

inline GridField apply_rect_operator(const RectSubdomain& s, const GridField& p) {
  GridField out{s.id, std::vector<double>(s.size())};
  apply_rect_operator(s, p.values, out.values);
  return out;
}

/// Moves nonhomogeneous Dirichlet data g (one value per node along the edge,
/// in increasing coordinate) into the right-hand side.
inline void lift_dirichlet(const RectSubdomain& s, Edge e, std::span<const double> g, GridField& f) {
  const BoundaryKind kind = s.bc(e);
  double weight = 0.0;
  if (kind == BoundaryKind::Dirichlet) {
    weight = s.delta(normal_axis(e));
  } else if (kind == BoundaryKind::DirichletFace) {
    weight = 2.0 * s.delta(normal_axis(e));  // ghost = 2g - p
  } else {
    throw InvalidArgument("lift_dirichlet: edge " + std::string(to_string(e)) + " is not a Dirichlet wall");
  }
  const auto line = edge_line(s, e);
  if (g.size() != line.size()) throw InvalidArgument("lift_dirichlet: boundary data length mismatch");
  if (f.values.size() != s.size()) throw InvalidArgument("lift_dirichlet: field length mismatch");
  for (std::size_t t = 0; t < line.size(); ++t) f.values[line[t]] -= weight * g[t];
}

}  // namespace fftddm
