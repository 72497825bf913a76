#include "bchlab/criterion.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "bchlab/series.hpp"

namespace bchlab {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 61>;

constexpr double kSeriesLimit = 0.5;
constexpr int kSeriesTerms = 400;

// Coefficients of F(phi) = 4 Sum_{k>=4} (a_{k-1} - a_k) phi^k where
// ln^2(1-phi) = Sum_k a_k phi^k, a_k = 2 H_{k-1} / k.
const std::array<double, kSeriesTerms>& f_coefficients() {
  static const auto table = [] {
    std::array<double, kSeriesTerms> d{};
    double harmonic = 1.0;  // H_{k-1} for k = 2
    double a_prev = 1.0;    // a_2
    for (int k = 3; k < kSeriesTerms + 3; ++k) {
      harmonic += 1.0 / (k - 1);
      const double a = 2.0 * harmonic / k;
      if (k >= 4 && k - 4 < kSeriesTerms) d[static_cast<std::size_t>(k - 4)] = 4.0 * (a_prev - a);
      a_prev = a;
    }
    return d;
  }();
  return table;
}

// F and F' from the power series, for 0 <= phi < kSeriesLimit.
double F_series(double phi) {
  const auto& d = f_coefficients();
  double power = phi * phi * phi * phi;
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double term = d[i] * power;
    sum += term;
    if (term <= 1e-18 * sum) break;
    power *= phi;
  }
  return sum;
}

double F_prime_series(double phi) {
  const auto& d = f_coefficients();
  double power = phi * phi * phi;
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double term = static_cast<double>(i + 4) * d[i] * power;
    sum += term;
    if (term <= 1e-18 * sum) break;
    power *= phi;
  }
  return sum;
}

void require_unit_interval(double phi, const char* what) {
  if (!(phi > 0.0 && phi < 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": phi = " << phi << " outside (0, 1)";
    throw DomainError(os.str());
  }
}

void require_h(double h, const char* what) {
  if (!(h > 0.0 && h < 2.0)) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": h = " << h << " outside (0, 2)";
    throw DomainError(os.str());
  }
}

// A(phi) = -phi - ln(1-phi) and f(phi) = phi^3 - 2 (1-phi) T3(phi).
double A_of(double phi) { return series::log1m_tail(phi, 2); }
double f_of(double phi) {
  return phi * phi * phi - 2.0 * (1.0 - phi) * series::log1m_tail(phi, 3);
}

double g_of(double phi) {
  if (phi == 0.0) return 0.0;
  const double A = A_of(phi);
  return std::pow(A, 2.5) / (phi * f_of(phi));
}

// Integral over psibar in [0, a] of integrand(phi(psibar)), with
// psibar = a sin^2(theta/2) clustering nodes at both ends of the branch.
template <class Fn>
double branch_integral(double h, Fn&& integrand) {
  const double a = std::sqrt(2.0 - h);
  auto in_theta = [&](double theta) {
    const double s = std::sin(0.5 * theta);
    const double co = std::cos(0.5 * theta);
    const double psibar = a * s * s;
    const double gap = a * co * co;  // a - psibar
    const double delta = gap * (a + psibar);
    const double phi = level_inverse_deficit(delta);
    return integrand(phi) * a * s * co;  // dpsibar/dtheta = a sin(theta)/2
  };
  double err = 0.0;
  return Kronrod::integrate(in_theta, 0.0, std::numbers::pi, 15, 1e-12, &err);
}

// w ln w - w + 1 for w = 1 + d, d = (phi - kappa)/(c - phi). With
// log1p(d) = d - d^2/2 + r this is d^2/2 - d^3/2 + (1+d) r.
double wave_Q_density(double d) {
  if (d > 0.1) return (1.0 + d) * std::log1p(d) - d;
  const double r = -series::log1m_tail(-d, 3);
  return 0.5 * d * d * (1.0 - d) + (1.0 + d) * r;
}

}  // namespace

double q_functional(const WaveProfile& profile) {
  require_b1(profile.params, "q_functional");
  long double s = 0.0L;
  const double k = profile.params.kappa;
  const double c = profile.params.c;
  for (const double phi : profile.phi) s += wave_Q_density((phi - k) / (c - phi));
  return static_cast<double>(s) * profile.dxi;
}

double q_value(const WaveParams& params) {
  require_b1(params, "q_value");
  require_admissible(params);
  return line_integral(params,
                       [](const OrbitSample& pt) { return wave_Q_density(pt.rise / pt.gap); });
}

double dq_dc(const WaveParams& params, double rel_step) {
  require_b1(params, "dq_dc");
  require_admissible(params);
  const double d = rel_step * params.c;
  auto q_at = [&](double c) {
    WaveParams p = params;
    p.c = c;
    return q_value(p);
  };
  const double c = params.c;
  // c - 2d stays admissible for any rel_step up to ~1e-2 unless kappa is at
  // the edge of the window; check explicitly.
  WaveParams lowest = params;
  lowest.c = c - 2.0 * d;
  require_admissible(lowest);
  const double d1 = (q_at(c + d) - q_at(c - d)) / (2.0 * d);
  const double d2 = (q_at(c + 2.0 * d) - q_at(c - 2.0 * d)) / (4.0 * d);
  return (4.0 * d1 - d2) / 3.0;
}

double h_of_params(const WaveParams& params) {
  require_b1(params, "h_of_params");
  require_admissible(params);
  return 2.0 * params.kappa / params.gamma();
}

double dh_dc(const WaveParams& params) {
  require_b1(params, "dh_dc");
  require_admissible(params);
  const double g = params.gamma();
  return -2.0 * params.kappa / (g * g);
}

double level_function(double phi) {
  if (phi == 0.0) return 2.0;
  require_unit_interval(phi, "level_function");
  return phi * phi / A_of(phi);
}

double level_inverse_deficit(double delta) {
  if (!(delta >= 0.0 && delta < 2.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "level_inverse_deficit: delta = " << delta << " outside [0, 2)";
    throw DomainError(os.str());
  }
  if (delta == 0.0) return 0.0;
  // 2 - P(phi) = 2 T3 / A increases from 0 to 2 on [0, 1).
  auto residual = [delta](double phi) {
    if (phi == 0.0) return -delta;
    return 2.0 * series::log1m_tail(phi, 3) / A_of(phi) - delta;
  };
  const double hi = std::nextafter(1.0, 0.0);
  if (residual(hi) < 0.0) return hi;
  // Small deficits: 2 - P ~ 4 phi / 3, so start the bracket there.
  double lo = 0.0;
  double up = hi;
  if (delta < 0.75) {
    const double guess = 0.75 * delta;
    if (residual(guess) < 0.0) {
      lo = guess;
    } else {
      up = guess;
      lo = 0.5 * guess;
      while (residual(lo) > 0.0) lo *= 0.5;
    }
  }
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      residual, lo, up, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

GammaCurve build_gamma(double h, std::size_t n) {
  require_h(h, "build_gamma");
  if (n < 128) throw DomainError("build_gamma: need n >= 128 samples");
  GammaCurve curve;
  curve.h = h;
  curve.a = std::sqrt(2.0 - h);
  curve.phi0 = level_inverse_deficit(2.0 - h);
  curve.phi.resize(n);
  curve.psibar.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
    const double s = std::sin(0.5 * theta);
    const double co = std::cos(0.5 * theta);
    const double psibar = curve.a * s * s;
    const double gap = curve.a * co * co;
    curve.psibar[i] = psibar;
    curve.phi[i] = i == 0 ? curve.phi0 : level_inverse_deficit(gap * (curve.a + psibar));
  }
  curve.psibar.back() = curve.a;
  curve.phi.back() = 0.0;
  return curve;
}

double phi_on_curve(double psibar, double h) {
  require_h(h, "phi_on_curve");
  const double a = std::sqrt(2.0 - h);
  if (!(psibar >= 0.0 && psibar <= a)) {
    throw DomainError("phi_on_curve: psibar outside [0, a]");
  }
  return level_inverse_deficit((a - psibar) * (a + psibar));
}

SpecialFunctions special_functions(double phi) {
  require_unit_interval(phi, "special_functions");
  SpecialFunctions s;
  const double A = A_of(phi);
  s.f = f_of(phi);
  const double A52 = std::pow(A, 2.5);
  s.g = A52 / (phi * s.f);
  s.Gfun = A52 / (s.f * s.f * s.f);
  if (phi < kSeriesLimit) {
    s.F = F_series(phi);
  } else {
    const double l = std::log1p(-phi);
    s.F = 4.0 * (phi * phi - (1.0 - phi) * l * l);
  }
  return s;
}

double f_prime(double phi) {
  require_unit_interval(phi, "f_prime");
  return 2.0 * A_of(phi);
}

double F_prime(double phi) {
  require_unit_interval(phi, "F_prime");
  if (phi < kSeriesLimit) return F_prime_series(phi);
  const double l = std::log1p(-phi);
  return 8.0 * phi + 4.0 * l * (2.0 + l);
}

double F_second(double phi) {
  require_unit_interval(phi, "F_second");
  return 8.0 * A_of(phi) / (1.0 - phi);
}

double GF_product(double phi) {
  if (phi < 1e-20) {
    if (phi < 0.0) throw DomainError("GF_product: phi must be >= 0");
    return 9.0 / std::pow(2.0, 2.5);
  }
  const auto s = special_functions(phi);
  return s.Gfun * s.F;
}

double transformed_Q(double h) {
  require_h(h, "transformed_Q");
  return 4.0 * branch_integral(h, [](double phi) { return g_of(phi); });
}

double transformed_dQ_dh(double h) {
  require_h(h, "transformed_dQ_dh");
  return -2.0 / h * branch_integral(h, [](double phi) { return GF_product(phi); });
}

std::vector<CriterionRow> criterion_sweep(const std::vector<double>& hs, unsigned jobs) {
  std::vector<CriterionRow> rows(hs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < hs.size(); i = next++) {
      try {
        rows[i] = {hs[i], transformed_Q(hs[i]), transformed_dQ_dh(hs[i])};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(hs.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return rows;
}

}  // namespace bchlab
