#include "bchlab/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace bchlab {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fourier::Fourier(std::size_t n, double length) : n_(n), length_(length) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("Fourier: n must be even and >= 4");
  if (!(length > 0.0)) throw std::invalid_argument("Fourier: length must be positive");
  real_buf_ = fftw_alloc_real(n_);
  complex_buf_ = fftw_alloc_complex(modes());
  auto* cbuf = static_cast<fftw_complex*>(complex_buf_);
  {
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_buf_, cbuf, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), cbuf, real_buf_, FFTW_ESTIMATE);
  }
  scratch_.resize(modes());
}

Fourier::~Fourier() { release(); }

Fourier::Fourier(Fourier&& other) noexcept
    : n_(other.n_),
      length_(other.length_),
      real_buf_(std::exchange(other.real_buf_, nullptr)),
      complex_buf_(std::exchange(other.complex_buf_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)),
      scratch_(std::move(other.scratch_)) {}

Fourier& Fourier::operator=(Fourier&& other) noexcept {
  if (this != &other) {
    release();
    n_ = other.n_;
    length_ = other.length_;
    real_buf_ = std::exchange(other.real_buf_, nullptr);
    complex_buf_ = std::exchange(other.complex_buf_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
    scratch_ = std::move(other.scratch_);
  }
  return *this;
}

void Fourier::release() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  if (real_buf_) fftw_free(real_buf_);
  if (complex_buf_) fftw_free(complex_buf_);
  forward_plan_ = inverse_plan_ = nullptr;
  real_buf_ = nullptr;
  complex_buf_ = nullptr;
}

double Fourier::wavenumber(std::size_t k) const {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / length_;
}

void Fourier::forward(std::span<const double> in, std::vector<std::complex<double>>& out) {
  if (in.size() != n_) throw std::invalid_argument("Fourier::forward: size mismatch");
  std::copy(in.begin(), in.end(), real_buf_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  const auto* c = static_cast<const fftw_complex*>(complex_buf_);
  out.resize(modes());
  for (std::size_t k = 0; k < modes(); ++k) out[k] = {c[k][0], c[k][1]};
}

void Fourier::inverse(std::span<const std::complex<double>> in, std::vector<double>& out) {
  if (in.size() != modes()) throw std::invalid_argument("Fourier::inverse: size mismatch");
  auto* c = static_cast<fftw_complex*>(complex_buf_);
  for (std::size_t k = 0; k < modes(); ++k) {
    c[k][0] = in[k].real();
    c[k][1] = in[k].imag();
  }
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  out.resize(n_);
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = real_buf_[j] * scale;
}

std::vector<double> Fourier::derivative(std::span<const double> v, int order) {
  forward(v, scratch_);
  const std::size_t nyquist = n_ / 2;
  for (std::size_t k = 0; k < modes(); ++k) {
    if (k == nyquist && order % 2 != 0) {
      scratch_[k] = 0.0;
      continue;
    }
    std::complex<double> ik{0.0, wavenumber(k)};
    std::complex<double> factor = 1.0;
    for (int i = 0; i < order; ++i) factor *= ik;
    scratch_[k] *= factor;
  }
  std::vector<double> out;
  inverse(scratch_, out);
  return out;
}

std::vector<double> Fourier::helmholtz_inverse(std::span<const double> v) {
  forward(v, scratch_);
  for (std::size_t k = 0; k < modes(); ++k) {
    const double kk = wavenumber(k);
    scratch_[k] /= 1.0 + kk * kk;
  }
  std::vector<double> out;
  inverse(scratch_, out);
  return out;
}

std::vector<double> Fourier::helmholtz(std::span<const double> v) {
  forward(v, scratch_);
  for (std::size_t k = 0; k < modes(); ++k) {
    const double kk = wavenumber(k);
    scratch_[k] *= 1.0 + kk * kk;
  }
  std::vector<double> out;
  inverse(scratch_, out);
  return out;
}

std::vector<double> Fourier::antiderivative(std::span<const double> v) {
  forward(v, scratch_);
  const std::size_t nyquist = n_ / 2;
  scratch_[0] = 0.0;
  for (std::size_t k = 1; k < modes(); ++k) {
    if (k == nyquist) {
      scratch_[k] = 0.0;
      continue;
    }
    scratch_[k] /= std::complex<double>{0.0, wavenumber(k)};
  }
  std::vector<double> out;
  inverse(scratch_, out);
  return out;
}

std::vector<double> Fourier::shift(std::span<const double> v, double s) {
  forward(v, scratch_);
  const std::size_t nyquist = n_ / 2;
  for (std::size_t k = 0; k < modes(); ++k) {
    const double phase = -wavenumber(k) * s;
    if (k == nyquist) {
      scratch_[k] *= std::cos(phase);
    } else {
      scratch_[k] *= std::complex<double>{std::cos(phase), std::sin(phase)};
    }
  }
  std::vector<double> out;
  inverse(scratch_, out);
  return out;
}

void Fourier::dealias(std::vector<std::complex<double>>& coeffs) const {
  const std::size_t cutoff = n_ / 3;
  for (std::size_t k = cutoff + 1; k < coeffs.size(); ++k) coeffs[k] = 0.0;
}

}  // namespace bchlab
