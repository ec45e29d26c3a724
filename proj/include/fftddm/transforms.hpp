#pragma once

// Eigenbasis transforms of the one-axis stencil matrix, realized with FFTs.
//
// For a line of n nodes with spacing Δt along the transform axis, the axis
// matrix is tridiag(δt, -2(δt+δo)+κ, δt) with end modifications per BC
// family. Q holds its orthonormal eigenvectors as columns and eigenvalues()
// lists λ in column order, so Qᵀ A Q = diag(λ).
//
//   DD  Q[j][k] = sqrt(2/(n+1)) sin(jkπ/(n+1))                      (symmetric)
//   NN  Q[j][k] = sqrt(2/n) sin((2jk-k-2nj)π/(2n)) + [k=n](1+√2)/√n  (column n constant)
//   PP  Q[j][k] = sqrt(2/n) sin(2πj w_k/n + φ_k),
//       w_k = floor((n+1-k)/2), φ_k = π(2k-1)/4                    (n even)

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fftddm/error.hpp"
#include "fftddm/fft.hpp"
#include "fftddm/geometry.hpp"

namespace fftddm {

/// Closed-form eigenvalues in the column order of the corresponding Q.
inline std::vector<double> spectral_eigenvalues(AxisBC bc, std::size_t n, double delta_t, double delta_o,
                                                double kappa) {
  std::vector<double> lambda(n);
  const double pi = std::numbers::pi;
  const double base = -2.0 * (delta_t + delta_o) + kappa;
  const double dn = static_cast<double>(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double dk = static_cast<double>(k);
    double c = 0.0;
    switch (bc) {
      case AxisBC::DD: c = std::cos(dk * pi / (dn + 1.0)); break;
      case AxisBC::NN: c = std::cos((dn - dk) * pi / dn); break;
      case AxisBC::PP: c = std::cos(2.0 * pi * static_cast<double>((n + 1 - k) / 2) / dn); break;
    }
    lambda[k - 1] = base + 2.0 * delta_t * c;
  }
  return lambda;
}

class SpectralPlan {
 public:
  /// Per-caller scratch space. One workspace must not be used by two threads
  /// at once; the plan itself is shared freely.
  struct Workspace {
    fft::Buffer<double> real;
    fft::Buffer<fft::Complex> a;
    fft::Buffer<fft::Complex> b;
    fft::Buffer<fft::Complex> c;
    fft::Buffer<fft::Complex> d;
  };

  SpectralPlan(AxisBC bc, std::size_t n, double delta_t, double delta_o, double kappa)
      : bc_(bc), n_(n), delta_t_(delta_t), delta_o_(delta_o), kappa_(kappa) {
    if (n == 0) throw InvalidArgument("transform length must be at least 1");
    if (bc == AxisBC::PP && n % 2 != 0) {
      throw InvalidArgument("periodic transform needs an even length, got " + std::to_string(n));
    }
    if (!std::isfinite(delta_t) || !std::isfinite(delta_o) || !std::isfinite(kappa)) {
      throw InvalidArgument("non-finite stencil coefficient");
    }
    eigenvalues_ = spectral_eigenvalues(bc, n, delta_t, delta_o, kappa);
    const double pi = std::numbers::pi;
    const double dn = static_cast<double>(n);
    switch (bc) {
      case AxisBC::DD:
        scale_ = std::sqrt(2.0 / (dn + 1.0));
        r2c_ = fft::R2C(2 * n + 2);
        break;
      case AxisBC::NN:
        scale_ = std::sqrt(2.0 / dn);
        r2c_ = fft::R2C(2 * n);
        c2c_ = fft::C2C(2 * n);
        phase_.resize(n + 1);
        for (std::size_t k = 0; k <= n; ++k) phase_[k] = std::polar(1.0, pi * static_cast<double>(k) / (2.0 * dn));
        break;
      case AxisBC::PP:
        scale_ = std::sqrt(2.0 / dn);
        r2c_ = fft::R2C(n);
        c2c_ = fft::C2C(n);
        phase_.resize(n + 1);
        for (std::size_t k = 1; k <= n; ++k) phase_[k] = std::polar(1.0, pi * (2.0 * static_cast<double>(k) - 1.0) / 4.0);
        break;
    }
  }

  AxisBC bc() const { return bc_; }
  std::size_t n() const { return n_; }
  double delta_t() const { return delta_t_; }
  double delta_o() const { return delta_o_; }
  double kappa() const { return kappa_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

  Workspace make_workspace() const {
    const std::size_t len = bc_ == AxisBC::DD ? 2 * n_ + 2 : 2 * n_;
    return Workspace{fft::Buffer<double>(len), fft::Buffer<fft::Complex>(len), fft::Buffer<fft::Complex>(len),
                     fft::Buffer<fft::Complex>(len), fft::Buffer<fft::Complex>(len)};
  }

  /// out = Q v. `out` may alias `v`.
  void apply_q(std::span<const double> v, std::span<double> out, Workspace& ws) const {
    check_lengths(v.size(), out.size());
    switch (bc_) {
      case AxisBC::DD: dd(v, out, ws); break;
      case AxisBC::NN: nn_q(v, out, ws); break;
      case AxisBC::PP: pp_q(v, out, ws); break;
    }
  }

  /// out = Qᵀ v. `out` may alias `v`.
  void apply_qt(std::span<const double> v, std::span<double> out, Workspace& ws) const {
    check_lengths(v.size(), out.size());
    switch (bc_) {
      case AxisBC::DD: dd(v, out, ws); break;
      case AxisBC::NN: nn_qt(v, out, ws); break;
      case AxisBC::PP: pp_qt(v, out, ws); break;
    }
  }

 private:
  void check_lengths(std::size_t in, std::size_t out) const {
    if (in != n_ || out != n_) {
      throw InvalidArgument("transform length mismatch: plan has n=" + std::to_string(n_) + ", got " +
                            std::to_string(in) + " -> " + std::to_string(out));
    }
  }

  // DST-I through a length 2n+2 real FFT: Im X_k = -Σ v_j sin(πjk/(n+1)).
  void dd(std::span<const double> v, std::span<double> out, Workspace& ws) const {
    const std::size_t len = 2 * n_ + 2;
    double* x = ws.real.data();
    x[0] = 0.0;
    for (std::size_t j = 1; j <= n_; ++j) x[j] = v[j - 1];
    for (std::size_t j = n_ + 1; j < len; ++j) x[j] = 0.0;
    r2c_.execute(x, ws.c.data());
    for (std::size_t k = 1; k <= n_; ++k) out[k - 1] = -scale_ * ws.c[k].imag();
  }

  // (Qv)_j = sqrt(2/n) (-1)^j Σ_k sin(k(2j-1)π/(2n)) v_k + (1+√2)/√n v_n
  void nn_q(std::span<const double> v, std::span<double> out, Workspace& ws) const {
    const std::size_t len = 2 * n_;
    fft::Complex* w = ws.a.data();
    const double vn = v[n_ - 1];
    w[0] = 0.0;
    for (std::size_t k = 1; k <= n_; ++k) w[k] = v[k - 1] * phase_[k];
    for (std::size_t k = n_ + 1; k < len; ++k) w[k] = 0.0;
    c2c_.execute(w, ws.c.data());
    const double corr = (1.0 + std::numbers::sqrt2) / std::sqrt(static_cast<double>(n_)) * vn;
    for (std::size_t j = 1; j <= n_; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      out[j - 1] = -scale_ * sign * ws.c[j].imag() + corr;
    }
  }

  // (Qᵀv)_k = sqrt(2/n) Σ_j (-1)^j sin(πjk/n - πk/(2n)) v_j + [k=n](1+√2)/√n Σ v
  void nn_qt(std::span<const double> v, std::span<double> out, Workspace& ws) const {
    const std::size_t len = 2 * n_;
    double* u = ws.real.data();
    double sum = 0.0;
    u[0] = 0.0;
    for (std::size_t j = 1; j <= n_; ++j) {
      sum += v[j - 1];
      u[j] = (j % 2 == 0) ? v[j - 1] : -v[j - 1];
    }
    for (std::size_t j = n_ + 1; j < len; ++j) u[j] = 0.0;
    r2c_.execute(u, ws.c.data());
    for (std::size_t k = 1; k <= n_; ++k) {
      const fft::Complex t = ws.c[k];
      out[k - 1] = scale_ * (phase_[k].real() * (-t.imag()) - phase_[k].imag() * t.real());
    }
    out[n_ - 1] += (1.0 + std::numbers::sqrt2) / std::sqrt(static_cast<double>(n_)) * sum;
  }

  // Even columns k=2l and odd columns k=2l-1 each reduce to one length-n FFT:
  // (Qv)_j = sqrt(2/n) (-1)^j Im(Σ_l e^{iφ_2l} v_2l e^{-2πijl/n} + Σ_l e^{iφ_(2l-1)} v_(2l-1) e^{-2πij(l-1)/n})
  void pp_q(std::span<const double> v, std::span<double> out, Workspace& ws) const {
    fft::Complex* even = ws.a.data();
    fft::Complex* odd = ws.b.data();
    for (std::size_t t = 0; t < n_; ++t) {
      even[t] = 0.0;
      odd[t] = 0.0;
    }
    for (std::size_t l = 1; l <= n_ / 2; ++l) {
      even[l % n_] = v[2 * l - 1] * phase_[2 * l];
      odd[l - 1] = v[2 * l - 2] * phase_[2 * l - 1];
    }
    c2c_.execute(even, ws.c.data());
    c2c_.execute(odd, ws.d.data());
    for (std::size_t j = 1; j <= n_; ++j) {
      const std::size_t t = j % n_;
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      out[j - 1] = scale_ * sign * (ws.c[t].imag() + ws.d[t].imag());
    }
  }

  // (Qᵀv)_k = sqrt(2/n) Im(e^{iφ_k} U_t), U = FFT of (-1)^j v_j, t = floor(k/2)
  // for even k and (k-1)/2 for odd k.
  void pp_qt(std::span<const double> v, std::span<double> out, Workspace& ws) const {
    double* u = ws.real.data();
    for (std::size_t j = 1; j <= n_; ++j) u[j % n_] = (j % 2 == 0) ? v[j - 1] : -v[j - 1];
    r2c_.execute(u, ws.c.data());
    for (std::size_t k = 1; k <= n_; ++k) {
      const std::size_t t = (k % 2 == 0) ? k / 2 : (k - 1) / 2;
      out[k - 1] = scale_ * (phase_[k] * ws.c[t]).imag();
    }
  }

  AxisBC bc_;
  std::size_t n_;
  double delta_t_;
  double delta_o_;
  double kappa_;
  double scale_ = 1.0;
  std::vector<double> eigenvalues_;
  std::vector<fft::Complex> phase_;
  fft::R2C r2c_;
  fft::C2C c2c_;
};

inline SpectralPlan make_plan(AxisBC bc, std::size_t n, double delta_t, double delta_o, double kappa) {
  return SpectralPlan(bc, n, delta_t, delta_o, kappa);
}

inline std::vector<double> apply_q(const SpectralPlan& plan, const std::vector<double>& v) {
  auto ws = plan.make_workspace();
  std::vector<double> out(v.size());
  plan.apply_q(v, out, ws);
  return out;
}

inline std::vector<double> apply_qt(const SpectralPlan& plan, const std::vector<double>& v) {
  auto ws = plan.make_workspace();
  std::vector<double> out(v.size());
  plan.apply_qt(v, out, ws);
  return out;
}

}  // namespace fftddm
