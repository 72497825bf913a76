#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bchlab {

/// Real-to-complex FFT on a uniform periodic grid of `n` points covering a
/// period of `length`, plus the Fourier multipliers used throughout the
/// library. Owns its FFTW plans and scratch buffers; one instance must not be
/// shared between threads, but independent instances may run concurrently.
class Fourier {
 public:
  Fourier(std::size_t n, double length);
  ~Fourier();
  Fourier(const Fourier&) = delete;
  Fourier& operator=(const Fourier&) = delete;
  Fourier(Fourier&& other) noexcept;
  Fourier& operator=(Fourier&& other) noexcept;

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] std::size_t modes() const { return n_ / 2 + 1; }
  [[nodiscard]] double length() const { return length_; }
  [[nodiscard]] double dx() const { return length_ / static_cast<double>(n_); }
  /// Angular wavenumber of half-spectrum index k (0 <= k <= n/2).
  [[nodiscard]] double wavenumber(std::size_t k) const;

  /// Unnormalised forward transform into `modes()` coefficients.
  void forward(std::span<const double> in, std::vector<std::complex<double>>& out);
  /// Inverse transform including the 1/n normalisation.
  void inverse(std::span<const std::complex<double>> in, std::vector<double>& out);

  /// Spectral derivative of the given order (Nyquist mode dropped for odd orders).
  [[nodiscard]] std::vector<double> derivative(std::span<const double> v, int order = 1);
  /// (1 - d^2/dx^2)^{-1}: multiplier 1/(1+k^2).
  [[nodiscard]] std::vector<double> helmholtz_inverse(std::span<const double> v);
  /// (1 - d^2/dx^2): multiplier 1+k^2.
  [[nodiscard]] std::vector<double> helmholtz(std::span<const double> v);
  /// Zero-mean pseudo-inverse of d/dx: multiplier 1/(ik), zero at k=0 and Nyquist.
  [[nodiscard]] std::vector<double> antiderivative(std::span<const double> v);
  /// Band-limited translation: returns w with w(x) = v(x - s).
  [[nodiscard]] std::vector<double> shift(std::span<const double> v, double s);
  /// Zeroes coefficients with |k| above two thirds of the Nyquist index.
  void dealias(std::vector<std::complex<double>>& coeffs) const;

 private:
  void release();

  std::size_t n_ = 0;
  double length_ = 0.0;
  double* real_buf_ = nullptr;
  void* complex_buf_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
  std::vector<std::complex<double>> scratch_;
};

}  // namespace bchlab
