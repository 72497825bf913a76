#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bchlab/params.hpp"
#include "bchlab/wave.hpp"

namespace bchlab {

/// Momentum density sampled on the periodic grid x_j = -length/2 + j dx.
struct Field {
  double length = 0.0;
  double kappa = 0.0;
  std::vector<double> m;

  [[nodiscard]] std::size_t size() const { return m.size(); }
  [[nodiscard]] double dx() const { return length / static_cast<double>(m.size()); }
  [[nodiscard]] double x(std::size_t j) const {
    return -0.5 * length + static_cast<double>(j) * dx();
  }
};

/// The profile's mu on its own grid, read as one period of a periodic field.
[[nodiscard]] Field field_from_profile(const WaveProfile& profile);

/// m == kappa on n points.
[[nodiscard]] Field constant_field(std::size_t n, double length, double kappa);

/// Throws DomainError unless every sample of m is positive and finite.
void require_positive(const Field& f);

// b = 1 functionals. Integrals use the trapezoid rule on the periodic grid,
// m_x is spectral.

/// Int m ln(m/kappa) - (m - kappa).
[[nodiscard]] double hamiltonian_H(const Field& f);
/// Int m - kappa.
[[nodiscard]] double q1(const Field& f);
/// Int m^{-3} (m^2 + m_x^2) - 1/kappa.
[[nodiscard]] double q2(const Field& f);
/// -q1 / (2 kappa) - kappa q2 / 2.
[[nodiscard]] double charge_Q(const Field& f);

/// charge_Q of the exact solitary wave mu, integrated along the orbit
/// instead of on a grid (b = 1).
[[nodiscard]] double wave_charge(const WaveParams& params);

/// d/dc of wave_charge at fixed kappa: central differences with step
/// rel_step * c plus one Richardson extrapolation.
[[nodiscard]] double wave_charge_dc(const WaveParams& params, double rel_step = 1e-4);

struct BFamilyInvariants {
  double E = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;
};

/// Mass and the two further invariants of the b-family for b != 1.
[[nodiscard]] BFamilyInvariants conserved_family_bneq1(const Field& f, double b);

struct PsiQ {
  /// (1/(c-kappa)) ln((c-phi)/(c-kappa)).
  std::vector<double> closed;
  /// -kappa/2 (-mu^-2 + 3 mu^-4 mu_xi^2 - 2 mu^-3 mu_xixi) - 1/(2 kappa) with
  /// mu_xi, mu_xixi from second-order central differences of the sampled mu.
  std::vector<double> mu_form;
  /// Sup-norm of closed - mu_form.
  double mismatch = 0.0;
};

/// Variational derivative of the charge along a b = 1 profile.
[[nodiscard]] PsiQ psi_Q(const WaveProfile& profile);

/// Multiplier s of the charge in the Lagrangian Lambda = -H - s Q.
enum class Multiplier {
  /// s = c - kappa. The antiderivative inside J_m acts on m - kappa, so the
  /// flow J_m dH/dm carries the wave with speed c - kappa and the wave is a
  /// critical point of Lambda for this s.
  RelativeSpeed,
  /// s = c. The wave is then not a critical point: dLambda/dm(mu) equals
  /// (kappa/(c-kappa)) ln(mu/kappa).
  WaveSpeed,
};

[[nodiscard]] double lagrange_multiplier(const WaveParams& params,
                                         Multiplier multiplier = Multiplier::RelativeSpeed);

/// delta Lambda / delta m along mu, with grid derivatives of mu as in psi_Q.
/// Vanishes up to O(dxi^2) for the relative-speed multiplier.
[[nodiscard]] std::vector<double> lagrangian_gradient(
    const WaveProfile& profile, Multiplier multiplier = Multiplier::RelativeSpeed);

/// Pointwise ln(kappa/m) + s/(2 kappa) + (s kappa/2)(-m^-2 + 3 m^-4 m_x^2 - 2 m^-3 m_xx).
[[nodiscard]] double lagrangian_gradient_at(double m, double m_x, double m_xx, double kappa,
                                            double s);

/// Lambda(m) = -H(m) - s Q(m) on a periodic field (b = 1), long double sums.
[[nodiscard]] long double lagrangian(const Field& f, double s);

struct RemainderScaling {
  std::vector<double> eps;
  std::vector<double> remainder;  // |R(eps)|
  double slope = 0.0;             // least-squares slope of log|R| against log eps
};

/// Cubic remainder of the second-order expansion of Lambda around mu in the
/// direction h (sampled on the profile grid), for each eps. Lambda is
/// discretised with spectral m_x; the first and second order terms are the
/// exact Taylor terms of that discrete functional.
[[nodiscard]] RemainderScaling remainder_scaling(
    const WaveProfile& profile, std::span<const double> h, std::span<const double> eps_list,
    Multiplier multiplier = Multiplier::RelativeSpeed);

/// Trapezoid rule on a periodic grid (plain sum times dx).
[[nodiscard]] double periodic_trapezoid(std::span<const double> v, double dx);

/// Second-order central differences on a grid whose ends are flat; the end
/// points use the periodic neighbour.
[[nodiscard]] std::vector<double> central_first(std::span<const double> v, double dx);
[[nodiscard]] std::vector<double> central_second(std::span<const double> v, double dx);

}  // namespace bchlab
