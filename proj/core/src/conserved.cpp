#include "bchlab/conserved.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bchlab/fourier.hpp"

namespace bchlab {

namespace {

void require_nonempty(const Field& f, const char* what) {
  if (f.m.size() < 4 || !(f.length > 0.0) || !(f.kappa > 0.0)) {
    throw DomainError(std::string(what) + ": field needs >= 4 samples, positive length and kappa");
  }
}

std::vector<double> spectral_dx(const Field& f) {
  Fourier fft(f.size(), f.length);
  return fft.derivative(f.m, 1);
}

// Density of Lambda = -H - cQ in terms of m and p = m_x (b = 1); c is the
// multiplier.
struct LagrangianDensity {
  long double c;
  long double kappa;

  [[nodiscard]] long double value(long double m, long double p) const {
    const long double k = kappa;
    const long double h = m * std::log(m / k) - m + k;
    const long double q1 = m - k;
    const long double q2 = 1.0L / m + p * p / (m * m * m) - 1.0L / k;
    return -h + c / (2.0L * k) * q1 + c * k / 2.0L * q2;
  }
  [[nodiscard]] long double dm(long double m, long double p) const {
    const long double m2 = m * m;
    return -std::log(m / kappa) + c / (2.0L * kappa) +
           c * kappa / 2.0L * (-1.0L / m2 - 3.0L * p * p / (m2 * m2));
  }
  [[nodiscard]] long double dp(long double m, long double p) const {
    return c * kappa * p / (m * m * m);
  }
  [[nodiscard]] long double dmm(long double m, long double p) const {
    const long double m3 = m * m * m;
    return -1.0L / m + c * kappa / 2.0L * (2.0L / m3 + 12.0L * p * p / (m3 * m * m));
  }
  [[nodiscard]] long double dmp(long double m, long double p) const {
    const long double m2 = m * m;
    return -3.0L * c * kappa * p / (m2 * m2);
  }
  [[nodiscard]] long double dpp(long double m) const { return c * kappa / (m * m * m); }
};

}  // namespace

double periodic_trapezoid(std::span<const double> v, double dx) {
  long double s = 0.0L;
  for (const double x : v) s += x;
  return static_cast<double>(s) * dx;
}

std::vector<double> central_first(std::span<const double> v, double dx) {
  const std::size_t n = v.size();
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = (v[(j + 1) % n] - v[(j + n - 1) % n]) / (2.0 * dx);
  }
  return d;
}

std::vector<double> central_second(std::span<const double> v, double dx) {
  const std::size_t n = v.size();
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = (v[(j + 1) % n] - 2.0 * v[j] + v[(j + n - 1) % n]) / (dx * dx);
  }
  return d;
}

Field field_from_profile(const WaveProfile& profile) {
  return Field{2.0 * profile.half_length, profile.params.kappa, profile.mu};
}

Field constant_field(std::size_t n, double length, double kappa) {
  return Field{length, kappa, std::vector<double>(n, kappa)};
}

void require_positive(const Field& f) {
  for (std::size_t j = 0; j < f.m.size(); ++j) {
    if (!(f.m[j] > 0.0) || !std::isfinite(f.m[j])) {
      std::ostringstream os;
      os.precision(17);
      os << "momentum must stay positive: m[" << j << "] = " << f.m[j];
      throw DomainError(os.str());
    }
  }
}

double hamiltonian_H(const Field& f) {
  require_nonempty(f, "hamiltonian_H");
  require_positive(f);
  const double k = f.kappa;
  long double s = 0.0L;
  for (const double m : f.m) {
    // m ln(m/k) - (m - k) = k (w ln w - w + 1) with w = m/k, written via
    // log1p so that the quadratic behaviour near w = 1 is not lost.
    const double w = m / k;
    const double d = w - 1.0;
    s += k * (w * std::log1p(d) - d);
  }
  return static_cast<double>(s) * f.dx();
}

double q1(const Field& f) {
  require_nonempty(f, "q1");
  require_positive(f);
  long double s = 0.0L;
  for (const double m : f.m) s += m - f.kappa;
  return static_cast<double>(s) * f.dx();
}

double q2(const Field& f) {
  require_nonempty(f, "q2");
  require_positive(f);
  const auto mx = spectral_dx(f);
  long double s = 0.0L;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double m = f.m[j];
    // 1/m - 1/k = (k - m)/(m k)
    s += (f.kappa - m) / (m * f.kappa) + mx[j] * mx[j] / (m * m * m);
  }
  return static_cast<double>(s) * f.dx();
}

double charge_Q(const Field& f) { return -0.5 / f.kappa * q1(f) - 0.5 * f.kappa * q2(f); }

double wave_charge(const WaveParams& params) {
  require_b1(params, "wave_charge");
  require_admissible(params);
  const double k = params.kappa;
  const double g = params.gamma();
  // With mu = k g/(c - phi) and mu_xi^2 = mu^2 phi_xi^2/(c - phi)^2 the
  // density -(mu-k)/(2k) - k/2 (1/mu - 1/k + mu_xi^2/mu^3) becomes
  // -(mu-k)^2/(2 k mu) - k phi_xi^2 / (2 mu (c-phi)^2).
  return line_integral(params, [&](const OrbitSample& pt) {
    const double mu = k * g / pt.gap;
    const double dm = k * pt.rise / pt.gap;
    return -dm * dm / (2.0 * k * mu) - k * pt.slope_sq / (2.0 * mu * pt.gap * pt.gap);
  });
}

double wave_charge_dc(const WaveParams& params, double rel_step) {
  const double d = rel_step * params.c;
  auto at = [&](double c) {
    WaveParams p = params;
    p.c = c;
    return wave_charge(p);
  };
  const double c = params.c;
  const double d1 = (at(c + d) - at(c - d)) / (2.0 * d);
  const double d2 = (at(c + 2.0 * d) - at(c - 2.0 * d)) / (4.0 * d);
  return (4.0 * d1 - d2) / 3.0;
}

BFamilyInvariants conserved_family_bneq1(const Field& f, double b) {
  if (b == 1.0) throw DomainError("conserved_family_bneq1: b = 1, use H, Q1, Q2 instead");
  if (!(b > 0.0)) throw DomainError("conserved_family_bneq1: b must be positive");
  require_nonempty(f, "conserved_family_bneq1");
  require_positive(f);
  const auto mx = spectral_dx(f);
  const double k = f.kappa;
  const double inv_b = 1.0 / b;
  long double e = 0.0L;
  long double f1 = 0.0L;
  long double f2 = 0.0L;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double m = f.m[j];
    const double lr = std::log(m / k);
    e += m - k;
    // m^{1/b} - k^{1/b} and m^{-1/b} - k^{-1/b} through expm1.
    f1 += std::pow(k, inv_b) * std::expm1(inv_b * lr);
    const double r = mx[j] / (b * m);
    f2 += r * r * std::pow(m, -inv_b) + std::pow(k, -inv_b) * std::expm1(-inv_b * lr);
  }
  const double scale = f.dx() / (b - 1.0);
  return {static_cast<double>(e) * scale, static_cast<double>(f1) * scale,
          static_cast<double>(f2) * scale};
}

PsiQ psi_Q(const WaveProfile& profile) {
  require_b1(profile.params, "psi_Q");
  const double k = profile.params.kappa;
  const double g = profile.params.gamma();
  const std::size_t n = profile.size();
  const auto d1 = central_first(profile.mu, profile.dxi);
  const auto d2 = central_second(profile.mu, profile.dxi);
  PsiQ out;
  out.closed.resize(n);
  out.mu_form.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    // ln((c - phi)/g) = ln(1 - (phi - k)/g)
    out.closed[j] = std::log1p(-(profile.phi[j] - k) / g) / g;
    const double m = profile.mu[j];
    const double m2 = m * m;
    out.mu_form[j] =
        -0.5 * k * (-1.0 / m2 + 3.0 * d1[j] * d1[j] / (m2 * m2) - 2.0 * d2[j] / (m2 * m)) -
        0.5 / k;
    out.mismatch = std::max(out.mismatch, std::fabs(out.closed[j] - out.mu_form[j]));
  }
  return out;
}

double lagrange_multiplier(const WaveParams& params, Multiplier multiplier) {
  return multiplier == Multiplier::RelativeSpeed ? params.gamma() : params.c;
}

double lagrangian_gradient_at(double m, double m_x, double m_xx, double kappa, double s) {
  const double m2 = m * m;
  return -std::log(m / kappa) + 0.5 * s / kappa +
         0.5 * s * kappa * (-1.0 / m2 + 3.0 * m_x * m_x / (m2 * m2) - 2.0 * m_xx / (m2 * m));
}

std::vector<double> lagrangian_gradient(const WaveProfile& profile, Multiplier multiplier) {
  require_b1(profile.params, "lagrangian_gradient");
  const double s = lagrange_multiplier(profile.params, multiplier);
  const auto d1 = central_first(profile.mu, profile.dxi);
  const auto d2 = central_second(profile.mu, profile.dxi);
  std::vector<double> out(profile.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = lagrangian_gradient_at(profile.mu[j], d1[j], d2[j], profile.params.kappa, s);
  }
  return out;
}

long double lagrangian(const Field& f, double s) {
  require_nonempty(f, "lagrangian");
  require_positive(f);
  const auto mx = spectral_dx(f);
  const LagrangianDensity dens{s, f.kappa};
  long double sum = 0.0L;
  for (std::size_t j = 0; j < f.size(); ++j) sum += dens.value(f.m[j], mx[j]);
  return sum * static_cast<long double>(f.dx());
}

RemainderScaling remainder_scaling(const WaveProfile& profile, std::span<const double> h,
                                   std::span<const double> eps_list, Multiplier multiplier) {
  require_b1(profile.params, "remainder_scaling");
  const std::size_t n = profile.size();
  if (h.size() != n) throw DomainError("remainder_scaling: h must live on the profile grid");
  if (eps_list.size() < 2) throw DomainError("remainder_scaling: need at least two eps values");

  Fourier fft(n, 2.0 * profile.half_length);
  const auto p = fft.derivative(profile.mu, 1);
  const auto q = fft.derivative(h, 1);
  const LagrangianDensity dens{lagrange_multiplier(profile.params, multiplier),
                               profile.params.kappa};
  const long double dx = profile.dxi;

  RemainderScaling out;
  for (const double eps : eps_list) {
    if (!(eps > 0.0)) throw DomainError("remainder_scaling: eps must be positive");
    long double r = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      const long double m = profile.mu[j];
      const long double pj = p[j];
      const long double hj = h[j];
      const long double qj = q[j];
      const long double e = eps;
      const long double mm = m + e * hj;
      if (!(mm > 0.0L)) {
        throw DomainError("remainder_scaling: mu + eps h loses positivity, shrink eps");
      }
      const long double first = dens.dm(m, pj) * hj + dens.dp(m, pj) * qj;
      const long double second = dens.dmm(m, pj) * hj * hj +
                                 2.0L * dens.dmp(m, pj) * hj * qj + dens.dpp(m) * qj * qj;
      r += dens.value(mm, pj + e * qj) - dens.value(m, pj) - e * first - 0.5L * e * e * second;
    }
    out.eps.push_back(eps);
    out.remainder.push_back(std::fabs(static_cast<double>(r * dx)));
  }

  // Least-squares slope in log-log coordinates.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < out.eps.size(); ++i) {
    if (!(out.remainder[i] > 0.0)) continue;
    const double lx = std::log(out.eps[i]);
    const double ly = std::log(out.remainder[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  if (used < 2) {
    out.slope = 0.0;
    return out;
  }
  const double nn = static_cast<double>(used);
  out.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  return out;
}

}  // namespace bchlab
