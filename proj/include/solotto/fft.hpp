#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace solotto {

/// In-place 1D complex FFT of fixed length (unnormalised, FFTW sign
/// convention). Plans are created with FFTW_ESTIMATE so that results are
/// reproducible run to run. Instances are not shared between threads;
/// plan creation is serialised internally.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&& other) noexcept;

  std::size_t size() const { return n_; }

  void forward(std::span<std::complex<double>> data) const;
  /// Inverse transform including the 1/n normalisation.
  void backward(std::span<std::complex<double>> data) const;

 private:
  std::size_t n_ = 0;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

}  // namespace solotto
