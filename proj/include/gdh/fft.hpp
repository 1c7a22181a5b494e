#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gdh/lattice.hpp"

namespace gdh {

/// Smallest n' >= n whose only prime factors are 2, 3, 5, 7.
int good_fft_size(int n);

// In-place multi-dimensional complex DFT backed by FFTW. Plans are created
// once and shared between copies; execution is reentrant, so one plan may be
// used from several threads on distinct buffers.
class FftPlan {
 public:
  explicit FftPlan(std::vector<int> dims);

  /// x_k <- sum_j x_j exp(-2 pi i j.k / n), unnormalised.
  void forward(std::span<Complex> data) const;
  /// x_k <- sum_j x_j exp(+2 pi i j.k / n), unnormalised.
  void backward(std::span<Complex> data) const;

  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return size_; }

 private:
  struct Plans;
  std::vector<int> dims_;
  std::size_t size_ = 0;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace gdh
