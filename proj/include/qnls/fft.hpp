#pragma once

// Thin FFTW wrapper. Plans are created once per (shape, direction) and shared;
// execution uses the new-array interface, which FFTW guarantees is thread-safe.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace qnls::fft {

using cplx = std::complex<double>;

enum class Direction : int { Forward = FFTW_FORWARD, Backward = FFTW_BACKWARD };

namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  // rows == 1 gives a 1-D plan of length cols.
  fftw_plan get(int rows, int cols, Direction dir) {
    const auto key = std::make_tuple(rows, cols, static_cast<int>(dir));
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    auto* buf = fftw_alloc_complex(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = rows == 1 ? fftw_plan_dft_1d(cols, buf, buf, static_cast<int>(dir), flags)
                            : fftw_plan_dft_2d(rows, cols, buf, buf, static_cast<int>(dir), flags);
    fftw_free(buf);
    if (p == nullptr) throw std::runtime_error("fftw: plan creation failed");
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

/// In-place unnormalized 1-D transform.
inline void transform(std::span<cplx> data, Direction dir) {
  const int n = static_cast<int>(data.size());
  fftw_plan p = detail::PlanCache::instance().get(1, n, dir);
  fftw_execute_dft(p, detail::as_fftw(data.data()), detail::as_fftw(data.data()));
}

/// In-place unnormalized 2-D transform of a row-major rows x cols array.
inline void transform_2d(std::span<cplx> data, int rows, int cols, Direction dir) {
  if (data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw std::invalid_argument("fft: 2-D shape does not match buffer size");
  fftw_plan p = detail::PlanCache::instance().get(rows, cols, dir);
  fftw_execute_dft(p, detail::as_fftw(data.data()), detail::as_fftw(data.data()));
}

}  // namespace qnls::fft
