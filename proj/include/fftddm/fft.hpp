#pragma once

// Thin RAII layer over FFTW3. Plans are created with FFTW_ESTIMATE on
// scratch arrays and later executed through the new-array interface, which
// FFTW documents as thread-safe. Plan creation and destruction are not, so
// both go through one process-wide mutex.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <new>

#include "fftddm/error.hpp"

namespace fftddm::fft {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

/// SIMD-aligned array owned through fftw_malloc.
template <class T>
class Buffer {
 public:
  Buffer() = default;
  explicit Buffer(std::size_t n) : n_(n) {
    if (n == 0) return;
    void* raw = fftw_malloc(sizeof(T) * n);
    if (raw == nullptr) throw std::bad_alloc();
    data_.reset(static_cast<T*>(raw));
    for (std::size_t k = 0; k < n; ++k) data_.get()[k] = T{};
  }

  T* data() { return data_.get(); }
  const T* data() const { return data_.get(); }
  std::size_t size() const { return n_; }
  T& operator[](std::size_t k) { return data_.get()[k]; }
  const T& operator[](std::size_t k) const { return data_.get()[k]; }

 private:
  std::unique_ptr<T, FftwFree> data_;
  std::size_t n_ = 0;
};

using Complex = std::complex<double>;

inline fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

namespace detail {

// Owns an fftw_plan. Constructed while the caller already holds the planner
// lock; destruction takes it.
struct PlanHandle {
  explicit PlanHandle(fftw_plan p) : plan(p) {
    if (plan == nullptr) throw Error("FFTW failed to create a plan");
  }
  PlanHandle(const PlanHandle&) = delete;
  PlanHandle& operator=(const PlanHandle&) = delete;
  ~PlanHandle() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_plan get() const { return plan; }
  fftw_plan plan;
};

}  // namespace detail

/// Real-to-complex forward transform of length n: out[k] = Σ in[j] e^{-2πijk/n}
/// for k = 0..n/2.
class R2C {
 public:
  R2C() = default;
  explicit R2C(std::size_t n) : n_(n) {
    Buffer<double> in(n);
    Buffer<Complex> out(n / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = std::make_shared<detail::PlanHandle>(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), as_fftw(out.data()), FFTW_ESTIMATE));
  }

  std::size_t size() const { return n_; }
  /// `in` must hold n doubles and `out` n/2+1 complex values, both from Buffer.
  void execute(double* in, Complex* out) const { fftw_execute_dft_r2c(plan_->get(), in, as_fftw(out)); }

 private:
  std::shared_ptr<detail::PlanHandle> plan_;
  std::size_t n_ = 0;
};

/// Complex forward transform of length n: out[k] = Σ in[j] e^{-2πijk/n}.
class C2C {
 public:
  C2C() = default;
  explicit C2C(std::size_t n) : n_(n) {
    Buffer<Complex> in(n);
    Buffer<Complex> out(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = std::make_shared<detail::PlanHandle>(
        fftw_plan_dft_1d(static_cast<int>(n), as_fftw(in.data()), as_fftw(out.data()), FFTW_FORWARD, FFTW_ESTIMATE));
  }

  std::size_t size() const { return n_; }
  void execute(Complex* in, Complex* out) const { fftw_execute_dft(plan_->get(), as_fftw(in), as_fftw(out)); }

 private:
  std::shared_ptr<detail::PlanHandle> plan_;
  std::size_t n_ = 0;
};

}  // namespace fftddm::fft
