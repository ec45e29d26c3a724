#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fftddm/error.hpp"

namespace fftddm {

/// Parses a SOLVER_THREADS style value. Returns nullopt when unset or empty.
inline std::optional<int> parse_thread_count(const char* text) {
  if (text == nullptr || *text == '\0') return std::nullopt;
  char* end = nullptr;
  const long value = std::strtol(text, &end, 10);
  if (*end != '\0' || value <= 0 || value > 4096) {
    throw InvalidArgument(std::string("SOLVER_THREADS must be a positive integer, got '") + text + "'");
  }
  return static_cast<int>(value);
}

inline void set_num_threads(int threads) {
  if (threads <= 0) throw InvalidArgument("thread count must be positive");
#ifdef _OPENMP
  omp_set_num_threads(threads);
#endif
}

inline int num_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Applies SOLVER_THREADS, falling back to the hardware concurrency.
inline int configure_threads_from_env() {
  const auto requested = parse_thread_count(std::getenv("SOLVER_THREADS"));
  const unsigned hw = std::thread::hardware_concurrency();
  const int threads = requested.value_or(hw == 0 ? 1 : static_cast<int>(hw));
  set_num_threads(threads);
  return threads;
}

}  // namespace fftddm
