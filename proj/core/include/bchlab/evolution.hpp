#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bchlab/conserved.hpp"
#include "bchlab/params.hpp"
#include "bchlab/wave.hpp"

namespace bchlab {

// m_t + u m_x + b m u_x = 0, u = (1 - d^2/dx^2)^{-1} m, on a periodic grid.
// Classic RK4 in time, Fourier derivatives in space.

struct EvolutionConfig {
  double b = 1.0;
  double c = 2.0;
  double kappa = 0.4;
  double domain_length = 80.0;
  std::size_t n = 1024;
  /// Fixed step; <= 0 picks 0.5 dx / max|u| from the initial datum.
  double dt = 0.0;
  double t_final = 5.0;
  bool dealias = true;
  /// Invariants (and orbital distance) are recorded every this much time.
  double record_every = 0.1;
  /// Snapshot interval; 0 keeps only the initial and final states.
  double snapshot_every = 0.0;
};

/// Throws DomainError naming the first inconsistent field.
void validate(const EvolutionConfig& cfg);

/// -(u m_x + b m u_x); for b = 1 the conservative form -(u m)_x. With
/// `dealias` the top third of the spectrum of the result is dropped.
/// Throws NumericalError if m is not positive.
[[nodiscard]] std::vector<double> rhs(const Field& f, double b, bool dealias = true);

/// The same right-hand side in advective form for every b (no dealiasing).
[[nodiscard]] std::vector<double> rhs_advective(const Field& f, double b);

struct EvolutionTrace {
  /// "H", "Q1", "Q2" for b = 1, "E", "F1", "F2" otherwise.
  std::array<std::string, 3> names;
  std::vector<double> times;
  std::vector<std::array<double, 3>> invariants;
  /// Orbital distance to the reference wave at each record (empty without one).
  std::vector<double> orbital_distances;
  /// max over records of |I(t) - I(0)| / |I(0)| (absolute change when I(0) = 0).
  std::array<double, 3> max_drift{};
  std::vector<double> snapshot_times;
  std::vector<Field> snapshots;
  Field final_state;
  double dt = 0.0;
  std::size_t steps = 0;
  bool failed = false;
  std::string failure;
};

/// Integrates to cfg.t_final (the last step is shortened to land on it).
/// Positivity loss, |m| > 1e6 or a step exceeding the RK4 stability budget
/// stops the run with `failed` set. With a reference profile on the same
/// grid, orbital distances are recorded too.
[[nodiscard]] EvolutionTrace evolve(const Field& f0, const EvolutionConfig& cfg,
                                    const WaveProfile* reference = nullptr);

/// The b-CH invariants of a field in the order of EvolutionTrace::names.
[[nodiscard]] std::array<double, 3> invariants(const Field& f, double b);

/// The wave sampled on the evolution grid (profile with n points on
/// [-length/2, length/2)).
[[nodiscard]] WaveProfile embedded_profile(const WaveParams& params, std::size_t n,
                                           double length);

/// Field holding the profile's mu.
[[nodiscard]] Field wave_field(const WaveProfile& profile);

/// Discrete H^1 norm: dx Sum v^2 + (D v)^2 with the spectral derivative.
[[nodiscard]] double h1_norm(std::span<const double> v, double length);

struct ShiftFit {
  double shift = 0.0;     // s minimising |f - g(. - s)|
  double distance = 0.0;  // the minimum
};

/// Minimum over translations of |f - g(. - s)| in L2 (sobolev = 0) or H^1
/// (sobolev = 1). Best grid shift from an FFT cross-correlation, refined by
/// a quadratic fit and Newton steps on the band-limited correlation; the
/// distance is evaluated directly at the final shift.
[[nodiscard]] ShiftFit best_shift(std::span<const double> f, std::span<const double> g,
                                  double length, int sobolev = 1);

/// inf_s |m - mu(. - s)|_{H^1}.
[[nodiscard]] double orbital_distance(const Field& f, const WaveProfile& profile);

/// inf_s |m - mu(. - s)|_{L2} / |mu - kappa|_{L2}.
[[nodiscard]] double traveling_mismatch(const Field& f, const WaveProfile& profile);

struct Bump {
  double centre = 0.0;
  double width = 0.0;
};

/// Mean-zero Gaussian bump exp(-((x - centre)/width)^2) - mean, scaled to H^1 norm eps.
[[nodiscard]] std::vector<double> gaussian_bump(const Field& grid, const Bump& bump, double eps);

/// Centre within 2 of the crest, width in [0.5, 2], drawn from mt19937_64(seed).
[[nodiscard]] Bump random_bump(std::uint64_t seed);

struct StabilityReport {
  WaveParams params;
  double eps = 0.0;
  std::uint64_t seed = 0;
  Bump bump;
  double initial_distance = 0.0;
  double max_distance = 0.0;
  double ratio = 0.0;  // max_distance / eps (max_distance itself when eps = 0)
  /// Speed c' of the wave whose crest height matches the final state, and
  /// the orbital distance from the final state to that wave. A perturbation
  /// that moves the invariants settles near a neighbouring member of the
  /// family, so max_distance includes |mu_c' - mu_c|.
  double settled_speed = 0.0;
  double settled_distance = 0.0;
  EvolutionTrace trace;
};

/// Evolves mu + bump and tracks the orbital distance to the wave family's
/// member mu. cfg supplies grid, step and horizon; its b, c, kappa are
/// overwritten from params.
[[nodiscard]] StabilityReport stability_experiment(const WaveParams& params, double eps,
                                                   EvolutionConfig cfg, std::uint64_t seed);

}  // namespace bchlab
