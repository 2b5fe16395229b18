#pragma once

#include <Eigen/Core>

namespace cbf {

/// In-place 2D complex DFT on an M x M array, backed by a cached FFTW plan.
///
/// forward computes sum_x f(x) e^{-i k.x} (unnormalized); inverse computes
/// sum_k F(k) e^{+i k.x} (unnormalized). Plans are built with FFTW_ESTIMATE so
/// that the arithmetic, and therefore every result, is identical from run to
/// run. Execution is thread-safe; plan creation is serialized internally.
class Fft2d {
 public:
  explicit Fft2d(int size);

  int size() const { return size_; }
  void forward(Eigen::ArrayXXcd& data) const;
  void inverse(Eigen::ArrayXXcd& data) const;

 private:
  int size_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// Shared transform for the given size.
const Fft2d& fft_for(int size);

}  // namespace cbf
