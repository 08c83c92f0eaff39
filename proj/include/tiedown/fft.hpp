#pragma once

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace tiedown {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace detail

/// Rounding residue of FFT products: values in [-negative_tolerance, 0) are
/// set to zero; anything more negative signals a bug and throws.
inline constexpr double fft_negative_tolerance = 1e-10;

inline void clamp_fft_residue(std::span<double> v) {
  for (double& x : v) {
    if (x < 0.0) {
      if (x < -fft_negative_tolerance) throw ResidueError("FFT produced negative mass " + std::to_string(x));
      x = 0.0;
    }
  }
}

/// Truncated linear convolution of nonnegative sequences of length `length`
/// (out[n] = sum_{i+j=n} a[i] b[j] for n < length), FFTW-backed. Plans and
/// buffers are owned by the object; one object per thread.
class Convolver {
 public:
  explicit Convolver(std::size_t length) : length_(length) {
    if (length == 0) throw InvalidParameter("convolution length must be positive");
    size_ = 1;
    while (size_ < 2 * length_) size_ <<= 1;
    const std::size_t spectrum = size_ / 2 + 1;
    real_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * size_)));
    freq_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * spectrum)));
    if (!real_ || !freq_) throw MemoryBoundError("FFT buffers of size " + std::to_string(size_));
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(size_), real_.get(), freq_.get(), FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(size_), freq_.get(), real_.get(), FFTW_ESTIMATE);
  }

  Convolver(const Convolver&) = delete;
  Convolver& operator=(const Convolver&) = delete;

  ~Convolver() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  std::size_t length() const { return length_; }

  /// Spectrum of a sequence (zero padded); used to fix one operand.
  std::vector<std::complex<double>> spectrum(std::span<const double> a) {
    load(a);
    fftw_execute(forward_);
    std::vector<std::complex<double>> out(size_ / 2 + 1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {freq_.get()[i][0], freq_.get()[i][1]};
    return out;
  }

  /// out = first `length` terms of a * (sequence with spectrum `kernel`).
  void apply(std::span<const double> a, std::span<const std::complex<double>> kernel, std::span<double> out) {
    load(a);
    fftw_execute(forward_);
    const double scale = 1.0 / static_cast<double>(size_);
    for (std::size_t i = 0; i < kernel.size(); ++i) {
      const std::complex<double> z = std::complex<double>(freq_.get()[i][0], freq_.get()[i][1]) * kernel[i] * scale;
      freq_.get()[i][0] = z.real();
      freq_.get()[i][1] = z.imag();
    }
    fftw_execute(backward_);
    const std::size_t n = std::min(out.size(), length_);
    std::copy_n(real_.get(), n, out.begin());
    clamp_fft_residue(out.first(n));
  }

  void convolve(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    const auto kb = spectrum(b);
    apply(a, kb, out);
  }

 private:
  void load(std::span<const double> a) {
    const std::size_t n = std::min(a.size(), length_);
    std::copy_n(a.begin(), n, real_.get());
    std::fill(real_.get() + n, real_.get() + size_, 0.0);
  }

  std::size_t length_;
  std::size_t size_;
  std::unique_ptr<double, detail::FftwFree> real_;
  std::unique_ptr<fftw_complex, detail::FftwFree> freq_;
  fftw_plan forward_{};
  fftw_plan backward_{};
};

/// Direct truncated convolution, used for short sequences.
inline void convolve_direct(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < a.size() && i < out.size(); ++i) {
    if (a[i] == 0.0) continue;
    const std::size_t lim = std::min(b.size(), out.size() - i);
    for (std::size_t j = 0; j < lim; ++j) out[i + j] += a[i] * b[j];
  }
}

}  // namespace tiedown
