#pragma once

#include <cstddef>
#include <vector>

#include "bchlab/params.hpp"
#include "bchlab/wave.hpp"

namespace bchlab {

// Stability criterion for b = 1. The wave is stable when
//   Q(c) = Int w ln w - w + 1 dxi,  w = (c-kappa)/(c-phi),
// increases with c. After rescaling phi -> (phi-kappa)/(c-kappa) the
// homoclinic orbit becomes the level curve
//   -psibar^2 + P(phi) = h,   P(phi) = -phi^2 / (phi + ln(1-phi)),  h = 2 kappa/(c-kappa),
// and the criterion reduces to d Qcal / dh < 0.

/// Q(c) for the sampled profile by the trapezoid rule on its grid.
[[nodiscard]] double q_functional(const WaveProfile& profile);

/// Q(c) by adaptive quadrature along the orbit (no grid; resolves narrow crests).
[[nodiscard]] double q_value(const WaveParams& params);

/// dQ/dc by central differences of q_value with step rel_step * c and one
/// Richardson extrapolation against the doubled step.
[[nodiscard]] double dq_dc(const WaveParams& params, double rel_step = 1e-4);

/// h = 2 kappa / (c - kappa) in (0, 2).
[[nodiscard]] double h_of_params(const WaveParams& params);
/// dh/dc = -2 kappa / (c - kappa)^2.
[[nodiscard]] double dh_dc(const WaveParams& params);

/// P(phi) = -phi^2 / (phi + ln(1-phi)), extended by P(0) = 2.
[[nodiscard]] double level_function(double phi);

/// Unique phi in [0, 1) with P(phi) = 2 - delta, for delta in [0, 2).
/// Solving for the deficit delta keeps full precision as phi -> 0.
[[nodiscard]] double level_inverse_deficit(double delta);

/// The upper branch of the level curve, sampled with points clustered at
/// both ends (psibar = 0 at the turning value phi0 and psibar = a at phi = 0).
struct GammaCurve {
  double h = 0.0;
  double phi0 = 0.0;
  double a = 0.0;
  std::vector<double> phi;
  std::vector<double> psibar;
};

[[nodiscard]] GammaCurve build_gamma(double h, std::size_t n);

/// phi on the curve at height psibar in [0, a].
[[nodiscard]] double phi_on_curve(double psibar, double h);

struct SpecialFunctions {
  double f = 0.0;     // phi + (1-phi)(phi + 2 ln(1-phi))
  double g = 0.0;     // A^{5/2} / (phi f),  A = -phi - ln(1-phi)
  double Gfun = 0.0;  // A^{5/2} / f^3
  double F = 0.0;     // 4 (phi ln^2(1-phi) - ln^2(1-phi) + phi^2)
};

/// Throws DomainError outside (0, 1).
[[nodiscard]] SpecialFunctions special_functions(double phi);

[[nodiscard]] double f_prime(double phi);
[[nodiscard]] double F_prime(double phi);
[[nodiscard]] double F_second(double phi);

/// Gfun(phi) F(phi), continued to phi = 0 by its limit 9 / 2^{5/2}.
[[nodiscard]] double GF_product(double phi);

/// Qcal(h) = -2 Int_Gamma g dpsibar = 4 Int_0^a g(phi(psibar)) dpsibar.
[[nodiscard]] double transformed_Q(double h);

/// Qcal'(h) = -(2/h) Int_0^a Gfun F dpsibar, strictly negative.
[[nodiscard]] double transformed_dQ_dh(double h);

struct CriterionRow {
  double h = 0.0;
  double Qcal = 0.0;
  double dQcal_dh = 0.0;
};

/// transformed_Q and transformed_dQ_dh on the given h values; `jobs`
/// threads share the rows.
[[nodiscard]] std::vector<CriterionRow> criterion_sweep(const std::vector<double>& hs,
                                                        unsigned jobs = 1);

}  // namespace bchlab
