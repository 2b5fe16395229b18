#include "cbf/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace cbf {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan make_plan(int size, int sign) {
  // Planning may scribble over the arrays, so plan on scratch storage.
  Eigen::ArrayXXcd scratch(size, size);
  auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_2d(size, size, ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw std::runtime_error("fft: FFTW failed to create a plan");
  return plan;
}

void check_shape(const Eigen::ArrayXXcd& data, int size) {
  if (data.rows() != size || data.cols() != size) {
    throw std::invalid_argument("fft: array shape does not match the transform size");
  }
}

}  // namespace

Fft2d::Fft2d(int size) : size_(size) {
  if (size < 1) throw std::invalid_argument("fft: size must be positive");
  std::lock_guard lock(planner_mutex());
  forward_plan_ = make_plan(size, FFTW_FORWARD);
  inverse_plan_ = make_plan(size, FFTW_BACKWARD);
}

void Fft2d::forward(Eigen::ArrayXXcd& data) const {
  check_shape(data, size_);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), ptr, ptr);
}

void Fft2d::inverse(Eigen::ArrayXXcd& data) const {
  check_shape(data, size_);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), ptr, ptr);
}

const Fft2d& fft_for(int size) {
  static std::mutex cache_mutex;
  static std::map<int, std::unique_ptr<Fft2d>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[size];
  if (!slot) slot = std::make_unique<Fft2d>(size);
  return *slot;
}

}  // namespace cbf
