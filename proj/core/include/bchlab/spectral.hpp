#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bchlab/conserved.hpp"
#include "bchlab/wave.hpp"

namespace bchlab {

// Second variation of Lambda = -H - sQ at the wave (b = 1),
//   L u = -s kappa (mu^-3 u')' + V u,
//   V = s kappa (mu^-3 - 6 mu^-5 mu_xi^2 + 3 mu^-4 mu_xixi) - 1/mu,
// in divergence form D^T A D + V, symmetric for every discretisation: D is a
// staggered difference to the half points (finite differences) or the
// Fourier differentiation matrix (spectral, periodic only).

enum class Closure {
  /// Unknowns at the interior points j = 1..N-1, u = 0 at xi = -L and xi = L
  /// (and beyond, for the wider stencil).
  Dirichlet,
  /// All N points, wrapping around the period 2L.
  Periodic,
};

enum class Discretization {
  /// Two-point staggered difference, coefficient averaged to the half point
  /// (three-point stencil). Errors O(dxi^2).
  SecondOrder,
  /// Four-point staggered difference, cubic interpolation of the coefficient
  /// (seven-point stencil). Errors O(dxi^4).
  FourthOrder,
  /// Fourier collocation, dense; requires the periodic closure.
  Spectral,
};

struct SpectralOptions {
  Closure closure = Closure::Dirichlet;
  Multiplier multiplier = Multiplier::RelativeSpeed;
  Discretization discretization = Discretization::SecondOrder;
};

/// Options for the Fourier collocation operator.
[[nodiscard]] SpectralOptions spectral_collocation(
    Multiplier multiplier = Multiplier::RelativeSpeed);

/// Symmetric matrix, either banded (bands[k][i] = A(i, i+k), k = 0..bandwidth,
/// column index wrapping modulo n for the periodic closure) or dense
/// (row-major `full`, used when `bands` is empty).
struct SymmetricOperator {
  std::size_t n = 0;
  std::vector<std::vector<double>> bands;
  std::vector<double> full;
  Closure closure = Closure::Dirichlet;
  /// Profile index of unknown 0 (1 for Dirichlet, 0 for periodic).
  std::size_t first_index = 1;

  [[nodiscard]] std::size_t size() const { return n; }
  [[nodiscard]] bool banded() const { return !bands.empty(); }
  [[nodiscard]] std::size_t bandwidth() const { return banded() ? bands.size() - 1 : n - 1; }
  [[nodiscard]] std::vector<double> apply(std::span<const double> u) const;
  /// Row-major dense copy.
  [[nodiscard]] std::vector<double> dense() const;
};

/// Refuses grids with fewer than 256 points, and the spectral discretisation
/// with the Dirichlet closure.
[[nodiscard]] SymmetricOperator assemble_L(const WaveProfile& profile,
                                         const SpectralOptions& options = {});

/// Restriction of a profile-grid array to the unknowns of `op`.
[[nodiscard]] std::vector<double> restrict_to(const SymmetricOperator& op,
                                              std::span<const double> v);

/// Strict sign changes among entries larger than floor * max|v|.
[[nodiscard]] std::size_t count_sign_changes(std::span<const double> v, double floor = 1e-9);

struct SpectrumReport {
  std::vector<double> eigenvalues;  // ascending
  std::size_t negative_count = 0;
  double lambda0 = 0.0;
  std::size_t ground_sign_changes = 0;
  std::size_t zero_index = 0;
  double zero_value = 0.0;
  double zero_overlap = 0.0;  // |<v, mu_xi>| / |mu_xi|
  std::size_t zero_sign_changes = 0;
  double multiplier = 0.0;      // s
  double essential_edge = 0.0;  // (s - kappa) / kappa^2
  /// Smallest eigenvalue whose eigenvector carries more than a quarter of
  /// its mass in |xi| > L/2: the bottom of the discretised continuum.
  double cluster_edge = 0.0;
  /// Localised positive eigenvalues below cluster_edge, other than the
  /// translation mode.
  std::vector<double> positive_point_eigenvalues;
  std::size_t n_points = 0;
  double half_length = 0.0;
  double dxi = 0.0;
  /// Ground state and translation mode on the full profile grid
  /// (Dirichlet ends set to zero), unit discrete L2 norm.
  std::vector<double> ground_state;
  std::vector<double> zero_mode;
};

/// Full eigendecomposition of the operator and its classification.
[[nodiscard]] SpectrumReport spectrum(const WaveProfile& profile,
                                      const SpectralOptions& options = {});

/// All eigenvalues of an operator (ascending).
[[nodiscard]] std::vector<double> eigenvalues(const SymmetricOperator& op);

struct CoercivityIdentity {
  double g0 = 0.0;          // <L0^{-1} psi_Q, psi_Q>
  double dQdc = 0.0;        // d charge(mu) / dc along the exact wave
  double mismatch = 0.0;    // |g0 - dQdc| / |dQdc|
  double g0_profiles = 0.0; // <d_c mu, psi_Q> with d_c mu from rebuilt profiles
};

/// Solves L u = psi_Q with the numerical translation mode deflated and
/// compares g0 = <u, psi_Q> with the wave-speed derivative of the charge.
[[nodiscard]] CoercivityIdentity coercivity_identity(const WaveProfile& profile,
                                                     const SpectralOptions& options = {});

struct ConstrainedMinimum {
  double alpha0 = 0.0;            // constraints mu_xi and psi_Q
  double translation_only = 0.0;  // constraint mu_xi only
  double lambda0 = 0.0;           // unconstrained minimum
};

/// Smallest Rayleigh quotient of the operator over vectors orthogonal to the
/// given constraint vectors (on the operator's unknowns).
[[nodiscard]] double constrained_minimum(const SymmetricOperator& op,
                                         const std::vector<std::vector<double>>& constraints);

[[nodiscard]] ConstrainedMinimum constrained_min_eig(const WaveProfile& profile,
                                                     const SpectralOptions& options = {});

/// J_m psi = -d/dx (m K (d/dx)^{-1} (m d/dx psi)), K = (1 - d^2/dx^2)^{-1},
/// with spectral derivatives and the zero-mean pseudo-inverse of d/dx.
[[nodiscard]] std::vector<double> apply_Jm(const Field& f, std::span<const double> psi);

}  // namespace bchlab
