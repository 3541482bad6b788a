#pragma once

#include <complex>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace szego::fft {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

enum class Direction { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

/// howmany contiguous length-len transforms (unnormalised), in place on data.
/// Work happens in an fftw_malloc buffer so alignment, and hence the plan and
/// its rounding, never depends on where the caller's storage lives.
inline void batch(std::vector<std::complex<double>>& data, int len, int howmany, Direction dir) {
  if (static_cast<std::size_t>(len) * howmany != data.size()) throw std::logic_error("fft::batch: size mismatch");
  if (data.empty()) return;
  const std::size_t bytes = data.size() * sizeof(fftw_complex);
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(bytes));
  if (!buf) throw std::bad_alloc();
  std::memcpy(buf, data.data(), bytes);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_many_dft(1, &len, howmany, buf, nullptr, 1, len, buf, nullptr, 1, len, static_cast<int>(dir),
                              FFTW_ESTIMATE);
  }
  if (!plan) {
    fftw_free(buf);
    throw std::runtime_error("fft::batch: planning failed");
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::memcpy(static_cast<void*>(data.data()), buf, bytes);
  fftw_free(buf);
}

}  // namespace szego::fft
