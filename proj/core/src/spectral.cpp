#include "bchlab/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bchlab/fourier.hpp"

namespace bchlab {

namespace {

constexpr std::size_t kMinPoints = 256;

double dot(std::span<const double> a, std::span<const double> b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void lapack_check(lapack_int info, const char* routine) {
  if (info != 0) {
    std::ostringstream os;
    os << routine << " failed with info = " << info;
    throw NumericalError(os.str());
  }
}

// Row-major dense symmetric eigensolve, vectors returned column-major.
void dense_eigensystem(const SymmetricOperator& op, std::vector<double>& values,
                       std::vector<double>* vectors) {
  const std::size_t m = op.size();
  const auto n = static_cast<lapack_int>(m);
  auto a = op.dense();
  values.resize(m);
  lapack_check(LAPACKE_dsyevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'U', n, a.data(), n,
                              values.data()),
               "dsyevd");
  if (vectors) *vectors = std::move(a);  // symmetric input, so layout is moot
}

// Eigenpairs; vectors column-major with unit Euclidean norm.
void eigensystem(const SymmetricOperator& op, std::vector<double>& values,
                 std::vector<double>* vectors) {
  if (op.closure == Closure::Periodic || !op.banded()) {
    dense_eigensystem(op, values, vectors);
    return;
  }
  const std::size_t m = op.size();
  const auto n = static_cast<lapack_int>(m);
  const char jobz = vectors ? 'V' : 'N';
  if (vectors) vectors->assign(m * m, 0.0);
  double* z = vectors ? vectors->data() : nullptr;
  const lapack_int ldz = vectors ? n : 1;
  if (op.bandwidth() == 1) {
    values = op.bands[0];
    std::vector<double> e = op.bands[1];
    lapack_check(LAPACKE_dstevd(LAPACK_COL_MAJOR, jobz, n, values.data(), e.data(), z, ldz),
                 "dstevd");
    return;
  }
  // Upper band storage: ab[(kd + i - j) + j * (kd + 1)] = A(i, j).
  const std::size_t kd = op.bandwidth();
  std::vector<double> ab((kd + 1) * m, 0.0);
  for (std::size_t k = 0; k <= kd; ++k) {
    for (std::size_t i = 0; i + k < m; ++i) ab[(kd - k) + (i + k) * (kd + 1)] = op.bands[k][i];
  }
  values.resize(m);
  lapack_check(LAPACKE_dsbevd(LAPACK_COL_MAJOR, jobz, 'U', n, static_cast<lapack_int>(kd),
                              ab.data(), static_cast<lapack_int>(kd + 1), values.data(), z, ldz),
               "dsbevd");
}

// Solves op u = rhs in place.
void solve(const SymmetricOperator& op, std::vector<double>& u) {
  const std::size_t m = op.size();
  const auto n = static_cast<lapack_int>(m);
  std::vector<lapack_int> ipiv(m);
  if (op.closure == Closure::Periodic || !op.banded()) {
    auto a = op.dense();
    lapack_check(LAPACKE_dgesv(LAPACK_ROW_MAJOR, n, 1, a.data(), n, ipiv.data(), u.data(), 1),
                 "dgesv");
    return;
  }
  const std::size_t kl = op.bandwidth();
  const std::size_t ld = 3 * kl + 1;
  std::vector<double> ab(ld * m, 0.0);
  auto put = [&](std::size_t i, std::size_t j, double v) { ab[(2 * kl + i - j) + j * ld] = v; };
  for (std::size_t k = 0; k <= kl; ++k) {
    for (std::size_t i = 0; i + k < m; ++i) {
      put(i, i + k, op.bands[k][i]);
      put(i + k, i, op.bands[k][i]);
    }
  }
  const auto b = static_cast<lapack_int>(kl);
  lapack_check(LAPACKE_dgbsv(LAPACK_COL_MAJOR, n, b, b, 1, ab.data(),
                             static_cast<lapack_int>(ld), ipiv.data(), u.data(), n),
               "dgbsv");
}

}  // namespace

std::vector<double> SymmetricOperator::apply(std::span<const double> u) const {
  if (u.size() != n) throw DomainError("SymmetricOperator::apply: size mismatch");
  std::vector<double> out(n, 0.0);
  if (!banded()) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = dot(std::span<const double>(full.data() + i * n, n), u);
    }
    return out;
  }
  const bool wrap = closure == Closure::Periodic;
  for (std::size_t i = 0; i < n; ++i) out[i] = bands[0][i] * u[i];
  for (std::size_t k = 1; k < bands.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = i + k;
      if (j >= n) {
        if (!wrap) break;
        j -= n;
      }
      const double v = bands[k][i];
      out[i] += v * u[j];
      out[j] += v * u[i];
    }
  }
  return out;
}

std::vector<double> SymmetricOperator::dense() const {
  if (!banded()) return full;
  const bool wrap = closure == Closure::Periodic;
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] = bands[0][i];
  for (std::size_t k = 1; k < bands.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = i + k;
      if (j >= n) {
        if (!wrap) break;
        j -= n;
      }
      a[i * n + j] += bands[k][i];
      a[j * n + i] += bands[k][i];
    }
  }
  return a;
}

SpectralOptions spectral_collocation(Multiplier multiplier) {
  return {Closure::Periodic, multiplier, Discretization::Spectral};
}

SymmetricOperator assemble_L(const WaveProfile& profile, const SpectralOptions& options) {
  require_b1(profile.params, "assemble_L");
  const std::size_t n = profile.size();
  if (n < kMinPoints) {
    throw DomainError("assemble_L: grid too coarse, need at least 256 points");
  }
  if (options.discretization == Discretization::Spectral &&
      options.closure != Closure::Periodic) {
    throw DomainError("assemble_L: the spectral discretisation needs the periodic closure");
  }
  const double k = profile.params.kappa;
  const double sk = lagrange_multiplier(profile.params, options.multiplier) * k;
  const double h2 = profile.dxi * profile.dxi;
  const auto& mu = profile.mu;
  const auto nn = static_cast<std::ptrdiff_t>(n);
  auto wrapped = [nn](std::ptrdiff_t j) { return static_cast<std::size_t>(((j % nn) + nn) % nn); };
  auto inv3 = [&](std::ptrdiff_t j) {
    const double m = mu[wrapped(j)];
    return 1.0 / (m * m * m);
  };
  auto potential = [&](std::size_t j) {
    const double mj = mu[j];
    const double m2 = mj * mj;
    const double mx = profile.mu_xi[j];
    return sk * (1.0 / (m2 * mj) - 6.0 * mx * mx / (m2 * m2 * mj) +
                 3.0 * profile.mu_xixi[j] / (m2 * m2)) -
           1.0 / mj;
  };

  if (options.discretization == Discretization::Spectral) {
    // Columns of D^T A D = -D A D from FFT derivatives of unit vectors.
    SymmetricOperator op;
    op.closure = Closure::Periodic;
    op.first_index = 0;
    op.n = n;
    op.full.assign(n * n, 0.0);
    Fourier fft(n, 2.0 * profile.half_length);
    std::vector<double> e(n, 0.0);
    for (std::size_t q = 0; q < n; ++q) {
      e[q] = 1.0;
      auto col = fft.derivative(e, 1);
      e[q] = 0.0;
      for (std::size_t j = 0; j < n; ++j) col[j] *= -sk * inv3(static_cast<std::ptrdiff_t>(j));
      col = fft.derivative(col, 1);
      for (std::size_t j = 0; j < n; ++j) op.full[j * n + q] = col[j];
    }
    // The first derivative drops the Nyquist mode, which would leave the
    // alternating vector with no kinetic energy at all (a spurious mode at
    // the essential edge). Give it s kappa a k_N^2 back, rank one.
    const double kn = std::numbers::pi / profile.dxi;
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) {
      w[j] = (j % 2 == 0 ? 1.0 : -1.0) * std::sqrt(inv3(static_cast<std::ptrdiff_t>(j)));
    }
    const double nyq = sk * kn * kn / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = 0.5 * (op.full[i * n + j] + op.full[j * n + i]) + nyq * w[i] * w[j];
        op.full[i * n + j] = v;
        op.full[j * n + i] = v;
      }
      op.full[i * n + i] += nyq * w[i] * w[i] + potential(i);
    }
    return op;
  }

  // Staggered difference to the half point j + 1/2 and the coefficient there.
  std::vector<std::ptrdiff_t> offsets;
  std::vector<double> weights;
  std::function<double(std::ptrdiff_t)> coefficient;
  if (options.discretization == Discretization::SecondOrder) {
    offsets = {0, 1};
    weights = {-1.0, 1.0};
    coefficient = [&](std::ptrdiff_t j) { return 0.5 * (inv3(j) + inv3(j + 1)); };
  } else {
    offsets = {-1, 0, 1, 2};
    weights = {1.0 / 24.0, -27.0 / 24.0, 27.0 / 24.0, -1.0 / 24.0};
    coefficient = [&](std::ptrdiff_t j) {
      return (-inv3(j - 1) + 9.0 * inv3(j) + 9.0 * inv3(j + 1) - inv3(j + 2)) / 16.0;
    };
  }
  const std::size_t bw = offsets.size() - 1;

  SymmetricOperator op;
  op.closure = options.closure;
  const bool periodic = options.closure == Closure::Periodic;
  op.first_index = periodic ? 0 : 1;
  const std::size_t m = n - op.first_index;
  op.n = m;
  op.bands.assign(bw + 1, std::vector<double>(m, 0.0));

  // Unknown index of profile point j (unwrapped), or -1 where u vanishes.
  auto unknown = [&](std::ptrdiff_t j) -> std::ptrdiff_t {
    if (periodic) return static_cast<std::ptrdiff_t>(wrapped(j));
    return (j >= 1 && j <= nn - 1) ? j - 1 : -1;
  };
  const std::ptrdiff_t lo = periodic ? 0 : -static_cast<std::ptrdiff_t>(offsets.back());
  const std::ptrdiff_t hi = periodic ? nn - 1 : nn - 1 - offsets.front();
  const auto mm = static_cast<std::ptrdiff_t>(m);
  for (std::ptrdiff_t j = lo; j <= hi; ++j) {
    const double a = sk / h2 * coefficient(j);
    for (std::size_t r = 0; r < offsets.size(); ++r) {
      const auto p = unknown(j + offsets[r]);
      if (p < 0) continue;
      for (std::size_t q = 0; q < offsets.size(); ++q) {
        const auto t = unknown(j + offsets[q]);
        if (t < 0) continue;
        const std::ptrdiff_t d = periodic ? ((t - p) % mm + mm) % mm : t - p;
        if (d < 0 || d > static_cast<std::ptrdiff_t>(bw)) continue;
        op.bands[static_cast<std::size_t>(d)][static_cast<std::size_t>(p)] +=
            a * weights[r] * weights[q];
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) op.bands[0][i] += potential(i + op.first_index);
  return op;
}

std::vector<double> restrict_to(const SymmetricOperator& op, std::span<const double> v) {
  if (v.size() != op.size() + op.first_index) {
    throw DomainError("restrict_to: array does not live on the operator's grid");
  }
  return {v.begin() + static_cast<std::ptrdiff_t>(op.first_index), v.end()};
}

std::size_t count_sign_changes(std::span<const double> v, double floor) {
  double vmax = 0.0;
  for (const double x : v) vmax = std::max(vmax, std::fabs(x));
  const double cut = floor * vmax;
  std::size_t changes = 0;
  int last = 0;
  for (const double x : v) {
    if (std::fabs(x) <= cut) continue;
    const int s = x > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

std::vector<double> eigenvalues(const SymmetricOperator& op) {
  std::vector<double> values;
  eigensystem(op, values, nullptr);
  return values;
}

SpectrumReport spectrum(const WaveProfile& profile, const SpectralOptions& options) {
  const auto op = assemble_L(profile, options);
  const std::size_t m = op.size();
  std::vector<double> values;
  std::vector<double> vectors;
  eigensystem(op, values, &vectors);

  SpectrumReport r;
  r.eigenvalues = values;
  r.n_points = profile.size();
  r.half_length = profile.half_length;
  r.dxi = profile.dxi;
  const double k = profile.params.kappa;
  r.multiplier = lagrange_multiplier(profile.params, options.multiplier);
  r.essential_edge = (r.multiplier - k) / (k * k);
  r.negative_count = static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](double v) { return v < 0.0; }));
  r.lambda0 = values.front();

  auto column = [&](std::size_t i) {
    return std::span<const double>(vectors.data() + i * m, m);
  };
  auto on_profile_grid = [&](std::size_t i) {
    std::vector<double> full(profile.size(), 0.0);
    const auto col = column(i);
    const double scale = 1.0 / std::sqrt(profile.dxi);
    for (std::size_t q = 0; q < m; ++q) full[q + op.first_index] = col[q] * scale;
    return full;
  };

  auto w = restrict_to(op, profile.mu_xi);
  const double wn = norm(w);
  for (double& x : w) x /= wn;
  double best = -1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double ov = std::fabs(dot(column(i), w));
    if (ov > best) {
      best = ov;
      r.zero_index = i;
    }
  }
  r.zero_value = values[r.zero_index];
  r.zero_overlap = best;
  // Collocation eigenvectors carry grid-scale content from the barely
  // resolved crest (about 1e-8 relative in the tails at N = 2048). Entries
  // below the sup-norm of the vector's top third of the spectrum are not
  // resolved, so that level joins the 1e-9 floor.
  auto nodes = [&](std::size_t i) {
    const auto col = column(i);
    if (op.banded()) return count_sign_changes(col);
    Fourier fft(m, 2.0 * profile.half_length);
    std::vector<std::complex<double>> coeffs;
    std::vector<double> high;
    fft.forward(col, coeffs);
    const std::size_t cut = (2 * (coeffs.size() - 1)) / 3;
    for (std::size_t k = 0; k <= cut; ++k) coeffs[k] = 0.0;
    fft.inverse(coeffs, high);
    double rho = 0.0;
    double vmax = 0.0;
    for (std::size_t q = 0; q < m; ++q) {
      rho = std::max(rho, std::fabs(high[q]));
      vmax = std::max(vmax, std::fabs(col[q]));
    }
    return count_sign_changes(col, std::max(1e-9, rho / vmax));
  };
  r.ground_sign_changes = nodes(0);
  r.zero_sign_changes = nodes(r.zero_index);

  const double half = 0.5 * profile.half_length;
  r.cluster_edge = values.back();
  for (std::size_t i = 0; i < m; ++i) {
    const auto col = column(i);
    double outer = 0.0;
    for (std::size_t q = 0; q < m; ++q) {
      if (std::fabs(profile.xi[q + op.first_index]) > half) outer += col[q] * col[q];
    }
    if (outer > 0.25) {
      r.cluster_edge = values[i];
      break;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (values[i] > 0.0 && i != r.zero_index && values[i] < r.cluster_edge) {
      r.positive_point_eigenvalues.push_back(values[i]);
    }
  }
  r.ground_state = on_profile_grid(0);
  r.zero_mode = on_profile_grid(r.zero_index);
  // Fix signs for reproducible output: ground state positive at the crest,
  // translation mode aligned with mu_xi.
  const std::size_t centre = profile.center_index();
  if (r.ground_state[centre] < 0.0) {
    for (double& x : r.ground_state) x = -x;
  }
  if (dot(r.zero_mode, profile.mu_xi) < 0.0) {
    for (double& x : r.zero_mode) x = -x;
  }
  return r;
}

CoercivityIdentity coercivity_identity(const WaveProfile& profile,
                                       const SpectralOptions& options) {
  const auto op = assemble_L(profile, options);
  const std::size_t m = op.size();
  const auto report = spectrum(profile, options);
  const auto psi = psi_Q(profile).closed;

  auto v0 = restrict_to(op, report.zero_mode);
  const double vn = norm(v0);
  for (double& x : v0) x /= vn;
  auto rhs = restrict_to(op, psi);
  const auto project = [&](std::vector<double>& u) {
    const double p = dot(u, v0);
    for (std::size_t i = 0; i < m; ++i) u[i] -= p * v0[i];
  };
  project(rhs);

  std::vector<double> u(rhs);
  solve(op, u);
  project(u);

  CoercivityIdentity out;
  out.g0 = profile.dxi * dot(u, rhs);
  out.dQdc = wave_charge_dc(profile.params);
  out.mismatch = std::fabs(out.g0 - out.dQdc) / std::fabs(out.dQdc);

  // d_c mu on the same grid from profiles at c +- delta.
  const double delta = 1e-4 * profile.params.c;
  ProfileOptions opts;
  opts.n_points = profile.size();
  opts.half_length = profile.half_length;
  WaveParams lo = profile.params;
  WaveParams hi = profile.params;
  lo.c -= delta;
  hi.c += delta;
  const auto plo = build_profile(lo, opts);
  const auto phi = build_profile(hi, opts);
  long double s = 0.0L;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    s += (phi.mu[j] - plo.mu[j]) / (2.0 * delta) * psi[j];
  }
  out.g0_profiles = static_cast<double>(s) * profile.dxi;
  return out;
}

double constrained_minimum(const SymmetricOperator& op,
                           const std::vector<std::vector<double>>& constraints) {
  const std::size_t n = op.size();
  // Orthonormal basis of the constraint space (Gram-Schmidt, twice).
  std::vector<std::vector<double>> basis;
  for (const auto& c : constraints) {
    if (c.size() != n) throw DomainError("constrained_minimum: constraint size mismatch");
    std::vector<double> v = c;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double p = dot(v, b);
        for (std::size_t i = 0; i < n; ++i) v[i] -= p * b[i];
      }
    }
    const double vn = norm(v);
    if (!(vn > 1e-12 * norm(c))) throw DomainError("constrained_minimum: dependent constraints");
    for (double& x : v) x /= vn;
    basis.push_back(std::move(v));
  }
  const std::size_t kc = basis.size();

  // P A P + s C C^T with s above the spectrum: the constraint directions are
  // pushed to the top, the bottom eigenvalue is the constrained minimum.
  auto a = op.dense();
  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += std::fabs(a[i * n + j]);
    bound = std::max(bound, r);
  }
  const double shift = 2.0 * bound + 1.0;

  std::vector<std::vector<double>> aw(kc);
  for (std::size_t q = 0; q < kc; ++q) aw[q] = op.apply(basis[q]);
  std::vector<double> b(kc * kc);
  for (std::size_t p = 0; p < kc; ++p) {
    for (std::size_t q = 0; q < kc; ++q) b[p * kc + q] = dot(basis[p], aw[q]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < kc; ++p) {
        s -= basis[p][i] * aw[p][j] + aw[p][i] * basis[p][j];
        s += shift * basis[p][i] * basis[p][j];
        for (std::size_t q = 0; q < kc; ++q) s += basis[p][i] * b[p * kc + q] * basis[q][j];
      }
      a[i * n + j] += s;
    }
  }
  const auto nn = static_cast<lapack_int>(n);
  lapack_int found = 0;
  double w = 0.0;
  std::vector<lapack_int> isuppz(2);
  lapack_check(LAPACKE_dsyevr(LAPACK_ROW_MAJOR, 'N', 'I', 'U', nn, a.data(), nn, 0.0, 0.0, 1, 1,
                              0.0, &found, &w, nullptr, 1, isuppz.data()),
               "dsyevr");
  if (found != 1) throw NumericalError("dsyevr: smallest eigenvalue not found");
  return w;
}

ConstrainedMinimum constrained_min_eig(const WaveProfile& profile,
                                      const SpectralOptions& options) {
  const auto op = assemble_L(profile, options);
  const auto mu_xi = restrict_to(op, profile.mu_xi);
  const auto psi = restrict_to(op, psi_Q(profile).closed);
  ConstrainedMinimum out;
  out.alpha0 = constrained_minimum(op, {mu_xi, psi});
  out.translation_only = constrained_minimum(op, {mu_xi});
  out.lambda0 = eigenvalues(op).front();
  return out;
}

std::vector<double> apply_Jm(const Field& f, std::span<const double> psi) {
  if (psi.size() != f.size()) throw DomainError("apply_Jm: psi must live on the field's grid");
  Fourier fft(f.size(), f.length);
  auto t = fft.derivative(psi, 1);
  for (std::size_t j = 0; j < t.size(); ++j) t[j] *= f.m[j];
  t = fft.antiderivative(t);
  t = fft.helmholtz_inverse(t);
  for (std::size_t j = 0; j < t.size(); ++j) t[j] *= f.m[j];
  t = fft.derivative(t, 1);
  for (double& x : t) x = -x;
  return t;
}

}  // namespace bchlab
