#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bchlab/params.hpp"

namespace bchlab {

/// A point (phi, phi_xi) of the travelling-wave phase plane.
struct PhasePoint {
  double phi = 0.0;
  double psi = 0.0;
};

// ---------------------------------------------------------------------------
// Phase-plane dynamics
//
// For b = 1 the wave ODE is phi'' = phi - kappa (c-kappa)/(c-phi) with first
// integral E = psi^2/2 + V(phi), V(phi) = -phi^2/2 - kappa (c-kappa) ln(c-phi).
// For b != 1 the field is phi'' = phi - kappa (c-kappa)^b / (c-phi)^b and the
// first integral is normalised the same way, E = psi^2/2 + V_b(phi) with
// V_b(phi) = -phi^2/2 + kappa (c-kappa)^b (c-phi)^{1-b} / (b-1).
// ---------------------------------------------------------------------------

/// Right-hand side of the first-order wave system. Throws DomainError on or
/// beyond the singular line phi >= c.
[[nodiscard]] PhasePoint vector_field(PhasePoint p, const WaveParams& params);

/// Potential V(phi); DomainError for phi >= c.
[[nodiscard]] double potential(double phi, const WaveParams& params);

/// First integral psi^2/2 + V(phi); DomainError for phi >= c.
[[nodiscard]] double energy(PhasePoint p, const WaveParams& params);

/// Energy level of the homoclinic orbit, V(kappa).
[[nodiscard]] double homoclinic_energy(const WaveParams& params);

/// E_hom - V(phi), evaluated without cancellation as phi -> kappa.
[[nodiscard]] double energy_deficit(double phi, const WaveParams& params);

/// Linear growth rate sqrt(1 - b kappa / (c - kappa)) at the saddle (kappa, 0).
[[nodiscard]] double saddle_rate(const WaveParams& params);

/// The centre equilibrium (c - kappa for b = 1).
[[nodiscard]] double center_point(const WaveParams& params);

/// Crest value G in (c - kappa, c) where the homoclinic orbit meets psi = 0.
[[nodiscard]] double turning_point(const WaveParams& params);

struct TurningPointSensitivities {
  double dG_dc = 0.0;
  double dG_dkappa = 0.0;
};

/// Closed-form partial derivatives of the crest value (b = 1 only).
[[nodiscard]] TurningPointSensitivities turning_point_sensitivities(const WaveParams& params);

/// mu as a function of phi along travelling waves: kappa ((c-kappa)/(c-phi))^b.
[[nodiscard]] double mu_of_phi(double phi, const WaveParams& params);

/// Maximum of the momentum profile, mu_of_phi(G).
[[nodiscard]] double mu_max(const WaveParams& params);

/// kappa exp((G^2 - kappa^2) / (2 kappa (c - kappa))): the same maximum
/// obtained by eliminating the logarithm (b = 1 only).
[[nodiscard]] double mu_max_exponential_form(const WaveParams& params);

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

struct ProfileOptions {
  std::size_t n_points = 4096;
  double tail_tol = 1e-10;
  /// Half length L of the grid [-L, L). Defaults to the distance at which
  /// phi - kappa falls to tail_tol.
  std::optional<double> half_length;
};

/// Solitary wave sampled on the centred periodic-compatible grid
/// xi_j = (j - N/2) dxi, j = 0..N-1, dxi = 2L/N. The crest sits at j = N/2.
struct WaveProfile {
  WaveParams params;
  double dxi = 0.0;
  double half_length = 0.0;
  double G = 0.0;
  double M = 0.0;
  std::vector<double> xi;
  std::vector<double> phi;
  std::vector<double> phi_xi;
  std::vector<double> mu;
  std::vector<double> mu_xi;
  std::vector<double> mu_xixi;

  [[nodiscard]] std::size_t size() const { return xi.size(); }
  [[nodiscard]] std::size_t center_index() const { return xi.size() / 2; }
};

/// Builds the solitary-wave profile by quadrature of
/// dxi = -dphi / sqrt(2 (E_hom - V(phi))) from the crest G downwards.
[[nodiscard]] WaveProfile build_profile(const WaveParams& params, const ProfileOptions& options = {});

/// Distance from the crest at which the wave takes the value phi in (kappa, G].
[[nodiscard]] double xi_of_phi(double phi, const WaveParams& params);

/// A point of the homoclinic orbit handed to line_integral integrands. The
/// offsets are computed without cancellation, so integrands that depend on
/// phi - kappa or c - phi keep full relative precision at the saddle and at
/// a crest close to the singular line.
struct OrbitSample {
  double phi = 0.0;
  double rise = 0.0;      // phi - kappa
  double gap = 0.0;       // c - phi
  double slope_sq = 0.0;  // phi_xi^2
};

/// Integral over the whole line of integrand(phi(xi)), computed in the
/// phase variable so that sharply peaked waves are resolved. The integrand
/// must vanish at phi = kappa at least linearly in phi - kappa.
[[nodiscard]] double line_integral(const WaveParams& params,
                                   const std::function<double(const OrbitSample&)>& integrand);

// ---------------------------------------------------------------------------
// Phase portraits
// ---------------------------------------------------------------------------

struct Orbit {
  double energy = 0.0;
  /// Closed loop: upper branch left to right, then lower branch back.
  std::vector<PhasePoint> points;
};

/// Level sets of the first integral between the centre and the homoclinic
/// level. Energies below the centre value give an empty orbit; energies
/// above E_hom are rejected with DomainError.
[[nodiscard]] std::vector<Orbit> phase_portrait(const WaveParams& params,
                                                std::span<const double> energies,
                                                std::size_t samples_per_branch = 256);

}  // namespace bchlab
