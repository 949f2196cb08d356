#include "solotto/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <utility>
#include <vector>

#include "solotto/errors.hpp"

namespace solotto {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw Error(ErrorKind::Validation, "Fft: zero length");
  std::vector<std::complex<double>> scratch(n);
  std::lock_guard lock(planner_mutex());
  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                   FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                    FFTW_BACKWARD, flags);
  if (!forward_plan_ || !backward_plan_) throw Error(ErrorKind::Validation, "Fft: planning failed");
}

Fft::~Fft() {
  if (!forward_plan_ && !backward_plan_) return;
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

Fft::Fft(Fft&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr)) {}

Fft& Fft::operator=(Fft&& other) noexcept {
  if (this != &other) {
    Fft tmp(std::move(other));
    std::swap(n_, tmp.n_);
    std::swap(forward_plan_, tmp.forward_plan_);
    std::swap(backward_plan_, tmp.backward_plan_);
  }
  return *this;
}

void Fft::forward(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw Error(ErrorKind::GridMismatch, "Fft: length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()),
                   as_fftw(data.data()));
}

void Fft::backward(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw Error(ErrorKind::GridMismatch, "Fft: length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data.data()),
                   as_fftw(data.data()));
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& z : data) z *= scale;
}

}  // namespace solotto
