#include "bchlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "bchlab/fourier.hpp"

namespace bchlab {

namespace {

constexpr double kBlowUp = 1e6;
// RK4 reaches the imaginary axis up to 2 sqrt(2).
constexpr double kRk4Budget = 2.0 * std::numbers::sqrt2;

using Spectrum = std::vector<std::complex<double>>;

// Right-hand side with reusable transforms and buffers.
class Stepper {
 public:
  Stepper(std::size_t n, double length, double b, bool dealias)
      : fft_(n, length), b_(b), dealias_(dealias) {}

  double max_u() const { return max_u_; }

  void operator()(const std::vector<double>& m, std::vector<double>& out) {
    const std::size_t modes = fft_.modes();
    const std::size_t nyquist = fft_.size() / 2;
    fft_.forward(m, mh_);
    uh_.resize(modes);
    for (std::size_t k = 0; k < modes; ++k) {
      const double kk = fft_.wavenumber(k);
      uh_[k] = mh_[k] / (1.0 + kk * kk);
    }
    fft_.inverse(uh_, u_);
    max_u_ = 0.0;
    for (const double x : u_) max_u_ = std::max(max_u_, std::fabs(x));
    const std::size_t n = m.size();
    if (b_ == 1.0) {
      w_.resize(n);
      for (std::size_t j = 0; j < n; ++j) w_[j] = u_[j] * m[j];
      fft_.forward(w_, wh_);
    } else {
      differentiate(mh_, dh_);
      fft_.inverse(dh_, mx_);
      differentiate(uh_, dh_);
      fft_.inverse(dh_, ux_);
      w_.resize(n);
      for (std::size_t j = 0; j < n; ++j) w_[j] = -(u_[j] * mx_[j] + b_ * m[j] * ux_[j]);
      if (!dealias_) {
        out = w_;
        return;
      }
      fft_.forward(w_, wh_);
      fft_.dealias(wh_);
      fft_.inverse(wh_, out);
      return;
    }
    if (dealias_) fft_.dealias(wh_);
    for (std::size_t k = 0; k < modes; ++k) {
      wh_[k] = k == nyquist ? 0.0 : wh_[k] * std::complex<double>{0.0, -fft_.wavenumber(k)};
    }
    fft_.inverse(wh_, out);
  }

 private:
  void differentiate(const Spectrum& in, Spectrum& out) const {
    const std::size_t nyquist = fft_.size() / 2;
    out.resize(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) {
      out[k] = k == nyquist ? 0.0 : in[k] * std::complex<double>{0.0, fft_.wavenumber(k)};
    }
  }

  Fourier fft_;
  double b_;
  bool dealias_;
  double max_u_ = 0.0;
  Spectrum mh_, uh_, wh_, dh_;
  std::vector<double> u_, w_, mx_, ux_;
};

// Returns an empty string when m is admissible, else the reason.
std::string state_problem(std::span<const double> m) {
  for (const double x : m) {
    if (!std::isfinite(x)) return "non-finite momentum";
    if (x <= 0.0) return "positivity lost (m <= 0)";
    if (std::fabs(x) > kBlowUp) return "blow-up (|m| > 1e6)";
  }
  return {};
}

double relative_change(double now, double start) {
  const double d = std::fabs(now - start);
  return start == 0.0 ? d : d / std::fabs(start);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Weights of the discrete Sobolev inner product on the half spectrum,
// including the factor 2 for modes that appear twice in the full spectrum.
std::vector<double> sobolev_weights(const Fourier& fft, int sobolev) {
  const std::size_t modes = fft.modes();
  const std::size_t nyquist = fft.size() / 2;
  std::vector<double> w(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    const double kk = fft.wavenumber(k);
    const double mult = (k == 0 || k == nyquist) ? 1.0 : 2.0;
    // The spectral first derivative drops the Nyquist mode.
    const double grad = (sobolev >= 1 && k != nyquist) ? kk * kk : 0.0;
    w[k] = mult * (1.0 + grad);
  }
  return w;
}

// Wave speed at fixed b, kappa whose momentum maximum equals `crest`
// (mu_max increases with c).
double speed_for_crest(const WaveParams& params, double crest) {
  auto residual = [&](double c) {
    WaveParams q = params;
    q.c = c;
    return mu_max(q) - crest;
  };
  double lo = params.c;
  double hi = params.c;
  double step = 1e-3 * params.c;
  auto admissible = [&](double c) {
    WaveParams q = params;
    q.c = c;
    return !admissibility_violation(q).has_value();
  };
  if (residual(params.c) < 0.0) {
    while (residual(hi) < 0.0) {
      lo = hi;
      hi += step;
      step *= 2.0;
    }
  } else {
    while (residual(lo) > 0.0) {
      hi = lo;
      if (!admissible(lo - step)) return lo;
      lo -= step;
      step *= 2.0;
    }
  }
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(
      residual, lo, hi, boost::math::tools::eps_tolerance<double>(48), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

void validate(const EvolutionConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  if (!(cfg.b > 0.0) || !std::isfinite(cfg.b)) {
    os << "evolution: b = " << cfg.b << " must be positive";
  } else if (!(cfg.kappa > 0.0) || !std::isfinite(cfg.kappa)) {
    os << "evolution: kappa = " << cfg.kappa << " must be positive";
  } else if (!(cfg.domain_length > 0.0) || !std::isfinite(cfg.domain_length)) {
    os << "evolution: domain_length = " << cfg.domain_length << " must be positive";
  } else if (cfg.n < 16 || !is_power_of_two(cfg.n)) {
    os << "evolution: n = " << cfg.n << " must be a power of two >= 16";
  } else if (!std::isfinite(cfg.dt)) {
    os << "evolution: dt must be finite";
  } else if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final)) {
    os << "evolution: t_final = " << cfg.t_final << " must be >= 0";
  } else if (!(cfg.record_every > 0.0)) {
    os << "evolution: record_every must be positive";
  } else if (!(cfg.snapshot_every >= 0.0)) {
    os << "evolution: snapshot_every must be >= 0";
  } else {
    return;
  }
  throw DomainError(os.str());
}

std::vector<double> rhs(const Field& f, double b, bool dealias) {
  if (const auto why = state_problem(f.m); !why.empty()) throw NumericalError("rhs: " + why);
  Stepper step(f.size(), f.length, b, dealias);
  std::vector<double> out;
  step(f.m, out);
  return out;
}

std::vector<double> rhs_advective(const Field& f, double b) {
  if (const auto why = state_problem(f.m); !why.empty()) {
    throw NumericalError("rhs_advective: " + why);
  }
  Fourier fft(f.size(), f.length);
  const auto u = fft.helmholtz_inverse(f.m);
  const auto mx = fft.derivative(f.m, 1);
  const auto ux = fft.derivative(u, 1);
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = -(u[j] * mx[j] + b * f.m[j] * ux[j]);
  return out;
}

std::array<double, 3> invariants(const Field& f, double b) {
  if (b == 1.0) return {hamiltonian_H(f), q1(f), q2(f)};
  const auto inv = conserved_family_bneq1(f, b);
  return {inv.E, inv.F1, inv.F2};
}

EvolutionTrace evolve(const Field& f0, const EvolutionConfig& cfg, const WaveProfile* reference) {
  validate(cfg);
  if (f0.size() != cfg.n || std::fabs(f0.length - cfg.domain_length) > 1e-12 * cfg.domain_length) {
    throw DomainError("evolve: initial field does not match the configured grid");
  }
  if (reference && reference->size() != cfg.n) {
    throw DomainError("evolve: reference profile is not on the evolution grid");
  }
  if (const auto why = state_problem(f0.m); !why.empty()) {
    throw DomainError("evolve: initial datum inadmissible: " + why);
  }

  EvolutionTrace trace;
  trace.names = cfg.b == 1.0 ? std::array<std::string, 3>{"H", "Q1", "Q2"}
                             : std::array<std::string, 3>{"E", "F1", "F2"};
  Stepper step(cfg.n, cfg.domain_length, cfg.b, cfg.dealias);
  const double dx = cfg.domain_length / static_cast<double>(cfg.n);
  const double kmax =
      (cfg.dealias ? 2.0 / 3.0 : 1.0) * std::numbers::pi / dx;

  Field f = f0;
  std::vector<double> k1, k2, k3, k4, tmp(cfg.n);
  step(f.m, k1);
  double dt = cfg.dt;
  if (dt <= 0.0) dt = 0.5 * dx / std::max(step.max_u(), std::numeric_limits<double>::min());
  trace.dt = dt;

  const auto total_steps = static_cast<std::size_t>(std::ceil(cfg.t_final / dt - 1e-9));
  const auto every = [&](double interval) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(interval / dt)));
  };
  const std::size_t record_stride = every(cfg.record_every);
  const std::size_t snapshot_stride = cfg.snapshot_every > 0.0 ? every(cfg.snapshot_every) : 0;

  std::array<double, 3> start{};
  auto record = [&](double t) {
    const auto inv = invariants(f, cfg.b);
    if (trace.times.empty()) start = inv;
    trace.times.push_back(t);
    trace.invariants.push_back(inv);
    for (std::size_t i = 0; i < 3; ++i) {
      trace.max_drift[i] = std::max(trace.max_drift[i], relative_change(inv[i], start[i]));
    }
    if (reference) trace.orbital_distances.push_back(orbital_distance(f, *reference));
  };
  auto snapshot = [&](double t) {
    trace.snapshot_times.push_back(t);
    trace.snapshots.push_back(f);
  };

  record(0.0);
  snapshot(0.0);
  double t = 0.0;
  for (std::size_t s = 1; s <= total_steps; ++s) {
    const double h = s == total_steps ? cfg.t_final - t : dt;
    if (s > 1) step(f.m, k1);
    if (h * step.max_u() * kmax > kRk4Budget) {
      std::ostringstream os;
      os << "step " << s << ": dt max|u| k_max = " << h * step.max_u() * kmax
         << " exceeds the RK4 budget " << kRk4Budget;
      trace.failed = true;
      trace.failure = os.str();
      break;
    }
    for (std::size_t j = 0; j < cfg.n; ++j) tmp[j] = f.m[j] + 0.5 * h * k1[j];
    step(tmp, k2);
    for (std::size_t j = 0; j < cfg.n; ++j) tmp[j] = f.m[j] + 0.5 * h * k2[j];
    step(tmp, k3);
    for (std::size_t j = 0; j < cfg.n; ++j) tmp[j] = f.m[j] + h * k3[j];
    step(tmp, k4);
    for (std::size_t j = 0; j < cfg.n; ++j) {
      f.m[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    t = s == total_steps ? cfg.t_final : t + dt;
    trace.steps = s;
    if (const auto why = state_problem(f.m); !why.empty()) {
      trace.failed = true;
      trace.failure = "t = " + std::to_string(t) + ": " + why;
      break;
    }
    const bool last = s == total_steps;
    if (s % record_stride == 0 || last) record(t);
    if ((snapshot_stride && s % snapshot_stride == 0) || last) snapshot(t);
  }
  trace.final_state = std::move(f);
  return trace;
}

WaveProfile embedded_profile(const WaveParams& params, std::size_t n, double length) {
  ProfileOptions opts;
  opts.n_points = n;
  opts.half_length = 0.5 * length;
  return build_profile(params, opts);
}

Field wave_field(const WaveProfile& profile) {
  return Field{2.0 * profile.half_length, profile.params.kappa, profile.mu};
}

double h1_norm(std::span<const double> v, double length) {
  Fourier fft(v.size(), length);
  Spectrum vh;
  fft.forward(v, vh);
  const auto w = sobolev_weights(fft, 1);
  long double s = 0.0L;
  for (std::size_t k = 0; k < vh.size(); ++k) s += w[k] * std::norm(vh[k]);
  const double n = static_cast<double>(v.size());
  return std::sqrt(static_cast<double>(s) * length / (n * n));
}

ShiftFit best_shift(std::span<const double> f, std::span<const double> g, double length,
                    int sobolev) {
  if (f.size() != g.size()) throw DomainError("best_shift: arrays differ in size");
  const std::size_t n = f.size();
  Fourier fft(n, length);
  Spectrum fh;
  Spectrum gh;
  fft.forward(f, fh);
  fft.forward(g, gh);
  const auto w = sobolev_weights(fft, sobolev);
  // C(s) = <f, g(. - s)> up to a positive factor: Sum w_k Re(F_k conj(G_k) e^{iks}).
  Spectrum p(fh.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = w[k] * fh[k] * std::conj(gh[k]);
  // Grid scan through one inverse transform (weights already carry the
  // doubling, so halve them back for the c2r convention).
  Spectrum half(p);
  for (std::size_t k = 1; k + 1 < half.size(); ++k) half[k] *= 0.5;
  std::vector<double> corr;
  fft.inverse(half, corr);
  const auto best = static_cast<std::size_t>(
      std::distance(corr.begin(), std::max_element(corr.begin(), corr.end())));
  const double dx = length / static_cast<double>(n);
  const double cm = corr[(best + n - 1) % n];
  const double c0 = corr[best];
  const double cp = corr[(best + 1) % n];
  const double denom = cm - 2.0 * c0 + cp;
  double s = static_cast<double>(best) * dx;
  if (denom < 0.0) s += 0.5 * (cm - cp) / denom * dx;

  // Newton on C'(s) = 0.
  for (int it = 0; it < 8; ++it) {
    double d1 = 0.0;
    double d2 = 0.0;
    for (std::size_t k = 1; k < p.size(); ++k) {
      const double kk = fft.wavenumber(k);
      const auto e = p[k] * std::complex<double>{std::cos(kk * s), std::sin(kk * s)};
      d1 -= kk * e.imag();
      d2 -= kk * kk * e.real();
    }
    if (!(d2 < 0.0)) break;
    const double step = -d1 / d2;
    s += step;
    if (std::fabs(step) < 1e-14 * length) break;
  }
  s = std::remainder(s, length);

  const auto shifted = fft.shift(g, s);
  std::vector<double> diff(n);
  for (std::size_t j = 0; j < n; ++j) diff[j] = f[j] - shifted[j];
  double dist = 0.0;
  if (sobolev >= 1) {
    dist = h1_norm(diff, length);
  } else {
    long double acc = 0.0L;
    for (const double x : diff) acc += static_cast<long double>(x) * x;
    dist = std::sqrt(static_cast<double>(acc) * dx);
  }
  return {s, dist};
}

double orbital_distance(const Field& f, const WaveProfile& profile) {
  if (profile.size() != f.size()) {
    throw DomainError("orbital_distance: profile is not on the field's grid");
  }
  return best_shift(f.m, profile.mu, f.length, 1).distance;
}

double traveling_mismatch(const Field& f, const WaveProfile& profile) {
  if (profile.size() != f.size()) {
    throw DomainError("traveling_mismatch: profile is not on the field's grid");
  }
  long double acc = 0.0L;
  for (const double m : profile.mu) {
    const double d = m - profile.params.kappa;
    acc += static_cast<long double>(d) * d;
  }
  const double scale = std::sqrt(static_cast<double>(acc) * f.dx());
  return best_shift(f.m, profile.mu, f.length, 0).distance / scale;
}

std::vector<double> gaussian_bump(const Field& grid, const Bump& bump, double eps) {
  if (!(bump.width > 0.0)) throw DomainError("gaussian_bump: width must be positive");
  if (!(eps >= 0.0)) throw DomainError("gaussian_bump: eps must be >= 0");
  const std::size_t n = grid.size();
  std::vector<double> v(n);
  long double mean = 0.0L;
  for (std::size_t j = 0; j < n; ++j) {
    const double z = (grid.x(j) - bump.centre) / bump.width;
    v[j] = std::exp(-z * z);
    mean += v[j];
  }
  const double mbar = static_cast<double>(mean / static_cast<long double>(n));
  for (double& x : v) x -= mbar;
  const double norm = h1_norm(v, grid.length);
  for (double& x : v) x *= eps / norm;
  return v;
}

Bump random_bump(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-2.0, 2.0);
  std::uniform_real_distribution<double> width(0.5, 2.0);
  Bump b;
  b.centre = centre(rng);
  b.width = width(rng);
  return b;
}

StabilityReport stability_experiment(const WaveParams& params, double eps, EvolutionConfig cfg,
                                     std::uint64_t seed) {
  require_admissible(params);
  if (!(eps >= 0.0 && eps <= 0.1)) {
    throw DomainError("stability_experiment: eps must lie in [0, 0.1]");
  }
  cfg.b = params.b;
  cfg.c = params.c;
  cfg.kappa = params.kappa;
  validate(cfg);
  const auto profile = embedded_profile(params, cfg.n, cfg.domain_length);
  Field f0 = wave_field(profile);

  StabilityReport rep;
  rep.params = params;
  rep.eps = eps;
  rep.seed = seed;
  rep.bump = random_bump(seed);
  const auto bump = gaussian_bump(f0, rep.bump, eps);
  for (std::size_t j = 0; j < f0.size(); ++j) f0.m[j] += bump[j];

  rep.trace = evolve(f0, cfg, &profile);
  const auto& d = rep.trace.orbital_distances;
  rep.initial_distance = d.empty() ? 0.0 : d.front();
  rep.max_distance = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
  rep.ratio = eps > 0.0 ? rep.max_distance / eps : rep.max_distance;

  const auto& m = rep.trace.final_state.m;
  const double crest = *std::max_element(m.begin(), m.end());
  rep.settled_speed = speed_for_crest(params, crest);
  WaveParams settled = params;
  settled.c = rep.settled_speed;
  rep.settled_distance =
      orbital_distance(rep.trace.final_state, embedded_profile(settled, cfg.n, cfg.domain_length));
  return rep;
}

}  // namespace bchlab
