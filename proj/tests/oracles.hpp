#pragma once

// Reference computations written without the library, used to cross-check it.

#include <cmath>
#include <functional>
#include <utility>

namespace oracle {

// V(phi) of the b-family wave ODE phi'' = phi - kappa g^b / (c - phi)^b,
// g = c - kappa, normalised so that V' = -(phi'' right-hand side).
inline double potential(double phi, double b, double c, double kappa) {
  const double g = c - kappa;
  if (b == 1.0) return -0.5 * phi * phi - kappa * g * std::log(c - phi);
  return -0.5 * phi * phi + kappa * std::pow(g, b) * std::pow(c - phi, 1.0 - b) / (b - 1.0);
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Crest from the energy level V(G) = V(kappa), G in (c - kappa, c).
inline double crest_by_bisection(double b, double c, double kappa) {
  const double level = potential(kappa, b, c, kappa);
  // centre: the zero of V'(phi) = -phi + kappa g^b / (c-phi)^b past kappa
  const double g = c - kappa;
  auto dV = [&](double phi) { return -phi + kappa * std::pow(g, b) / std::pow(c - phi, b); };
  const double mid = bisect(dV, kappa + 1e-12 * c, c - 1e-12 * c);
  return bisect([&](double phi) { return potential(phi, b, c, kappa) - level; }, mid,
                c - 1e-15 * c);
}

// Crest by shooting: RK4 on phi'' = phi - kappa g / (c - phi) (b = 1) from a
// point on the unstable manifold of the saddle until psi changes sign.
inline double crest_by_shooting(double c, double kappa, double h = 1e-4) {
  const double g = c - kappa;
  const double lam = std::sqrt(1.0 - kappa / g);
  auto f = [&](double phi, double psi) {
    return std::pair<double, double>{psi, phi - kappa * g / (c - phi)};
  };
  const double d = 1e-9;
  double phi = kappa + d, psi = lam * d;
  for (int i = 0; i < 100000000; ++i) {
    const auto [k1a, k1b] = f(phi, psi);
    const auto [k2a, k2b] = f(phi + 0.5 * h * k1a, psi + 0.5 * h * k1b);
    const auto [k3a, k3b] = f(phi + 0.5 * h * k2a, psi + 0.5 * h * k2b);
    const auto [k4a, k4b] = f(phi + h * k3a, psi + h * k3b);
    const double nphi = phi + h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
    const double npsi = psi + h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
    if (npsi <= 0.0) {
      // psi is linear in time near the turning point: interpolate, then use
      // phi(t) ~ phi + psi t + phi'' t^2 / 2 at the crossing.
      const double t = psi / (psi - npsi) * h;
      const double acc = f(phi, psi).second;
      return phi + psi * t + 0.5 * acc * t * t;
    }
    phi = nphi;
    psi = npsi;
  }
  return NAN;
}

// F(phi) = 4 (phi^2 + (phi - 1) ln^2(1 - phi)) in long double.
inline long double F(long double phi) {
  const long double l = std::log1p(-phi);
  return 4.0L * (phi * phi + (phi - 1.0L) * l * l);
}

}  // namespace oracle
