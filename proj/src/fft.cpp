#include "gdh/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "gdh/errors.hpp"

namespace gdh {
namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_smooth(int n) {
  for (int p : {2, 3, 5, 7}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

}  // namespace

int good_fft_size(int n) {
  if (n <= 1) return 1;
  while (!is_smooth(n)) ++n;
  return n;
}

struct FftPlan::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

FftPlan::FftPlan(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw PreconditionError("fft: empty dimension list");
  size_ = 1;
  for (int n : dims_) {
    if (n < 1) throw PreconditionError("fft: sizes must be >= 1");
    size_ *= static_cast<std::size_t>(n);
  }
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    auto* buf = fftw_alloc_complex(size_);
    const int rank = static_cast<int>(dims_.size());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd = fftw_plan_dft(rank, dims_.data(), buf, buf, FFTW_FORWARD, flags);
    bwd = fftw_plan_dft(rank, dims_.data(), buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
  }
  auto plans = std::make_shared<Plans>();
  plans->fwd = fwd;
  plans->bwd = bwd;
  if (!fwd || !bwd) throw Error("fft: FFTW failed to create a plan");
  plans_ = std::move(plans);
}

void FftPlan::forward(std::span<Complex> data) const {
  if (data.size() != size_) throw PreconditionError("fft: buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->fwd, p, p);
}

void FftPlan::backward(std::span<Complex> data) const {
  if (data.size() != size_) throw PreconditionError("fft: buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->bwd, p, p);
}

}  // namespace gdh
