#include "bchlab/wave.hpp"

#include <cmath>

// Boost 1.74's pchip.hpp calls unqualified isnan before declaring it.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "bchlab/series.hpp"

namespace bchlab {

namespace {

using GaussRule = boost::math::quadrature::gauss<double, 10>;
using KronrodRule = boost::math::quadrature::gauss_kronrod<double, 31>;

void require_below_singular_line(double phi, const WaveParams& p) {
  if (!(phi < p.c)) {
    std::ostringstream os;
    os.precision(17);
    os << "phase point on or beyond the singular line phi < c (phi = " << phi << ", c = " << p.c
       << ")";
    throw DomainError(os.str());
  }
}

// Plain bisection on a sign change of f over [lo, hi]; stops when the bracket
// can no longer be halved in double precision.
template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericalError("bisection: bracket does not change sign");
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Inverse of the homoclinic half-branch xi >= 0. Near the crest the
// variable t = sqrt(G - phi) removes the square-root turning singularity;
// near the saddle sigma = ln(phi - kappa) turns the logarithmic divergence
// of xi into a linear one. Both integrands are smooth in their variables.
class HomoclinicBranch {
 public:
  HomoclinicBranch(const WaveParams& p, double tail_tol) : p_(p) {
    require_admissible(p_);
    G_ = turning_point(p_);
    rate_ = saddle_rate(p_);
    crest_slope_ = mu_of_phi(G_, p_) - G_;  // V'(G) > 0
    const double phi_split = p_.kappa + 0.5 * (G_ - p_.kappa);
    t_split_ = std::sqrt(G_ - phi_split);
    sigma_split_ = std::log(phi_split - p_.kappa);
    sigma_tail_ = std::log(tail_tol);
    if (sigma_tail_ >= sigma_split_) sigma_tail_ = sigma_split_ - 1.0;

    constexpr std::size_t kUpperPanels = 96;
    t_nodes_.resize(kUpperPanels + 1);
    xi_t_nodes_.resize(kUpperPanels + 1);
    xi_t_nodes_[0] = 0.0;
    for (std::size_t k = 0; k <= kUpperPanels; ++k) {
      t_nodes_[k] = t_split_ * static_cast<double>(k) / kUpperPanels;
    }
    for (std::size_t k = 1; k <= kUpperPanels; ++k) {
      xi_t_nodes_[k] = xi_t_nodes_[k - 1] +
                       GaussRule::integrate([this](double t) { return upper_integrand(t); },
                                            t_nodes_[k - 1], t_nodes_[k]);
    }
    xi_split_ = xi_t_nodes_.back();

    constexpr double kSigmaPanel = 0.25;
    const auto lower_panels = static_cast<std::size_t>(
        std::ceil((sigma_split_ - sigma_tail_) / kSigmaPanel));
    sigma_nodes_.resize(lower_panels + 1);
    xi_sigma_nodes_.resize(lower_panels + 1);
    for (std::size_t k = 0; k <= lower_panels; ++k) {
      sigma_nodes_[k] = sigma_split_ - (sigma_split_ - sigma_tail_) * static_cast<double>(k) /
                                           static_cast<double>(lower_panels);
    }
    xi_sigma_nodes_[0] = xi_split_;
    for (std::size_t k = 1; k <= lower_panels; ++k) {
      xi_sigma_nodes_[k] = xi_sigma_nodes_[k - 1] +
                           GaussRule::integrate([this](double s) { return lower_integrand(s); },
                                                sigma_nodes_[k], sigma_nodes_[k - 1]);
    }
    xi_tail_ = xi_sigma_nodes_.back();

    upper_inverse_.emplace(std::vector<double>(xi_t_nodes_), std::vector<double>(t_nodes_));
    lower_inverse_.emplace(std::vector<double>(xi_sigma_nodes_),
                           std::vector<double>(sigma_nodes_));
  }

  [[nodiscard]] double G() const { return G_; }
  [[nodiscard]] double xi_tail() const { return xi_tail_; }
  [[nodiscard]] double t_split() const { return t_split_; }
  [[nodiscard]] double sigma_split() const { return sigma_split_; }

  // dxi/dt along the upper part, 2 t / sqrt(2 D) with D = V(G) - V(G - t^2).
  // D / t^2 is formed directly so that nothing cancels as t -> 0.
  [[nodiscard]] double upper_integrand(double t) const {
    const double r = crest_deficit_ratio(t * t);
    return 2.0 / std::sqrt(2.0 * r);
  }

  // (V(G) - V(G - tau)) / tau.
  [[nodiscard]] double crest_deficit_ratio(double tau) const {
    const double cg = p_.c - G_;
    const double x = tau / cg;
    const double b = p_.b;
    // kappa gamma^b (c-G)^{-b} = mu(G)
    const double muG = crest_slope_ + G_;
    double rel;  // (1 - (1+x)^{1-b}) / ((b-1) x), or log1p(x)/x for b = 1
    if (p_.is_b1()) {
      rel = x == 0.0 ? 1.0 : std::log1p(x) / x;
    } else {
      rel = x == 0.0 ? 1.0 : -std::expm1((1.0 - b) * std::log1p(x)) / ((b - 1.0) * x);
    }
    return -G_ + 0.5 * tau + muG * rel;
  }

  // -dxi/dsigma along the lower part.
  [[nodiscard]] double lower_integrand(double sigma) const {
    const double s = std::exp(sigma);
    const double d = energy_deficit(p_.kappa + s, p_);
    if (!(d > 0.0)) return 1.0 / rate_;
    return s / std::sqrt(2.0 * d);
  }

  [[nodiscard]] double xi_of_t(double t) const {
    const double dt = t_nodes_[1];
    auto k = static_cast<std::size_t>(t / dt);
    k = std::min(k, t_nodes_.size() - 2);
    return xi_t_nodes_[k] +
           GaussRule::integrate([this](double u) { return upper_integrand(u); }, t_nodes_[k], t);
  }

  [[nodiscard]] double xi_of_sigma(double sigma) const {
    if (sigma < sigma_tail_) {
      const double span = sigma_tail_ - sigma;
      const auto panels = static_cast<std::size_t>(std::ceil(span / 0.5));
      double xi = xi_tail_;
      for (std::size_t k = 0; k < panels; ++k) {
        const double hi = sigma_tail_ - span * static_cast<double>(k) / panels;
        const double lo = sigma_tail_ - span * static_cast<double>(k + 1) / panels;
        xi += GaussRule::integrate([this](double s) { return lower_integrand(s); }, lo, hi);
      }
      return xi;
    }
    const double step = sigma_nodes_[0] - sigma_nodes_[1];
    auto k = static_cast<std::size_t>((sigma_split_ - sigma) / step);
    k = std::min(k, sigma_nodes_.size() - 2);
    return xi_sigma_nodes_[k] +
           GaussRule::integrate([this](double s) { return lower_integrand(s); }, sigma,
                                sigma_nodes_[k]);
  }

  [[nodiscard]] double xi_of_phi(double phi) const {
    if (phi >= G_) return 0.0;
    if (phi <= p_.kappa) throw DomainError("xi_of_phi: phi must exceed kappa");
    if (G_ - phi <= t_split_ * t_split_) return xi_of_t(std::sqrt(G_ - phi));
    return xi_of_sigma(std::log(phi - p_.kappa));
  }

  // phi at distance xi >= 0 from the crest.
  [[nodiscard]] double phi_at(double xi) const {
    if (xi <= 0.0) return G_;
    if (xi <= xi_split_) {
      double t = std::clamp((*upper_inverse_)(xi), 0.0, t_split_);
      double lo = 0.0;
      double hi = t_split_;
      for (int it = 0; it < 50; ++it) {
        const double r = xi_of_t(t) - xi;
        if (r > 0.0) hi = t; else lo = t;
        if (std::fabs(r) <= 1e-15 * std::max(1.0, xi)) break;
        double next = t - r / upper_integrand(t);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == t) break;
        t = next;
      }
      return G_ - t * t;
    }
    double sigma;
    if (xi <= xi_tail_) {
      sigma = std::clamp((*lower_inverse_)(xi), sigma_tail_, sigma_split_);
    } else {
      sigma = sigma_tail_ - rate_ * (xi - xi_tail_);
    }
    for (int it = 0; it < 60; ++it) {
      const double r = xi_of_sigma(sigma) - xi;
      if (std::fabs(r) <= 1e-15 * std::max(1.0, xi)) break;
      double next = sigma + r / lower_integrand(sigma);
      next = std::min(next, sigma_split_);
      if (next == sigma) break;
      sigma = next;
    }
    return p_.kappa + std::exp(sigma);
  }

 private:
  WaveParams p_;
  double G_ = 0.0;
  double rate_ = 0.0;
  double crest_slope_ = 0.0;
  double t_split_ = 0.0;
  double sigma_split_ = 0.0;
  double sigma_tail_ = 0.0;
  double xi_split_ = 0.0;
  double xi_tail_ = 0.0;
  std::vector<double> t_nodes_, xi_t_nodes_;
  std::vector<double> sigma_nodes_, xi_sigma_nodes_;
  std::optional<boost::math::interpolators::pchip<std::vector<double>>> upper_inverse_;
  std::optional<boost::math::interpolators::pchip<std::vector<double>>> lower_inverse_;
};

}  // namespace

PhasePoint vector_field(PhasePoint p, const WaveParams& params) {
  require_below_singular_line(p.phi, params);
  return {p.psi, p.phi - mu_of_phi(p.phi, params)};
}

double potential(double phi, const WaveParams& params) {
  require_below_singular_line(phi, params);
  const double k = params.kappa;
  const double g = params.gamma();
  if (params.is_b1()) return -0.5 * phi * phi - k * g * std::log(params.c - phi);
  const double b = params.b;
  return -0.5 * phi * phi + k * std::pow(g, b) * std::pow(params.c - phi, 1.0 - b) / (b - 1.0);
}

double energy(PhasePoint p, const WaveParams& params) {
  return 0.5 * p.psi * p.psi + potential(p.phi, params);
}

double homoclinic_energy(const WaveParams& params) {
  const double k = params.kappa;
  const double g = params.gamma();
  if (params.is_b1()) return -0.5 * k * k - k * g * std::log(g);
  return (params.c * k - 0.5 * (params.b + 1.0) * k * k) / (params.b - 1.0);
}

double energy_deficit(double phi, const WaveParams& params) {
  require_below_singular_line(phi, params);
  const double k = params.kappa;
  const double g = params.gamma();
  const double s = phi - k;
  const double x = s / g;
  const double b = params.b;
  const double quadratic = 0.5 * s * s * (1.0 - b * k / g);
  if (params.is_b1()) return quadratic - k * g * series::log1m_tail(x, 3);
  return quadratic + k * g / (b - 1.0) * series::binomial_tail3(x, 1.0 - b);
}

double saddle_rate(const WaveParams& params) {
  require_admissible(params);
  return std::sqrt(1.0 - params.b * params.kappa / params.gamma());
}

double center_point(const WaveParams& params) {
  require_admissible(params);
  if (params.is_b1()) return params.gamma();
  const double b = params.b;
  const double c = params.c;
  const double k = params.kappa;
  // phi - mu(phi) is positive between the saddle and the centre and has its
  // maximum where (c - phi)^{b+1} = b kappa (c - kappa)^b.
  const double peak = c - std::pow(b * k * std::pow(params.gamma(), b), 1.0 / (b + 1.0));
  const double hi = c - 1e-14 * c;
  auto h = [&](double phi) { return phi - mu_of_phi(phi, params); };
  return bisect(h, peak, hi, 1e-15 * c);
}

double turning_point(const WaveParams& params) {
  require_admissible(params);
  const double center = center_point(params);
  auto d = [&](double phi) { return energy_deficit(phi, params); };
  double hi = params.c;
  bool found = false;
  for (int k = 1; k <= 60; ++k) {
    hi = params.c - (params.c - center) * std::pow(0.5, 5 * k);
    if (hi <= center) break;
    if (d(hi) < 0.0) {
      found = true;
      break;
    }
  }
  if (!found) throw NumericalError("turning_point: no sign change of E_hom - V below c for " +
                                   describe(params));
  return bisect(d, center, hi, 1e-15 * params.c);
}

TurningPointSensitivities turning_point_sensitivities(const WaveParams& params) {
  require_b1(params, "turning_point_sensitivities");
  const double G = turning_point(params);
  const double c = params.c;
  const double k = params.kappa;
  const double w = (c - k) / (c - G);
  const double denom = (G - k) * (G - c + k);
  TurningPointSensitivities s;
  s.dG_dc = k * (c - G) / denom * (w - std::log(w) - 1.0);
  s.dG_dkappa = -(c - 2.0 * k) * (c - G) / denom * std::log(w);
  return s;
}

double mu_of_phi(double phi, const WaveParams& params) {
  require_below_singular_line(phi, params);
  const double ratio = params.gamma() / (params.c - phi);
  return params.kappa * (params.is_b1() ? ratio : std::pow(ratio, params.b));
}

double mu_max(const WaveParams& params) { return mu_of_phi(turning_point(params), params); }

double mu_max_exponential_form(const WaveParams& params) {
  require_b1(params, "mu_max_exponential_form");
  const double G = turning_point(params);
  const double k = params.kappa;
  return k * std::exp((G * G - k * k) / (2.0 * k * params.gamma()));
}

WaveProfile build_profile(const WaveParams& params, const ProfileOptions& options) {
  require_admissible(params);
  if (options.n_points < 64 || options.n_points % 2 != 0) {
    throw DomainError("build_profile: n_points must be even and >= 64");
  }
  if (!(options.tail_tol > 0.0 && options.tail_tol <= 1e-6)) {
    throw DomainError("build_profile: tail_tol must lie in (0, 1e-6]");
  }
  if (options.half_length && !(*options.half_length > 0.0)) {
    throw DomainError("build_profile: half_length must be positive");
  }

  const HomoclinicBranch branch(params, options.tail_tol);
  const std::size_t n = options.n_points;
  const std::size_t half = n / 2;

  WaveProfile prof;
  prof.params = params;
  prof.G = branch.G();
  prof.M = mu_of_phi(prof.G, params);
  prof.half_length = options.half_length.value_or(branch.xi_tail());
  prof.dxi = 2.0 * prof.half_length / static_cast<double>(n);
  prof.xi.resize(n);
  prof.phi.resize(n);
  prof.phi_xi.resize(n);
  prof.mu.resize(n);
  prof.mu_xi.resize(n);
  prof.mu_xixi.resize(n);

  const double c = params.c;
  const double b = params.b;
  auto fill = [&](std::size_t j, double xi, double phi, double phi_xi) {
    const double mu = mu_of_phi(phi, params);
    const double phi_xixi = phi - mu;
    prof.xi[j] = xi;
    prof.phi[j] = phi;
    prof.phi_xi[j] = phi_xi;
    prof.mu[j] = mu;
    prof.mu_xi[j] = b * mu * phi_xi / (c - phi);
    prof.mu_xixi[j] = b * mu / (c - phi) * ((b + 1.0) * phi_xi * phi_xi / (c - phi) + phi_xixi);
  };

  fill(half, 0.0, prof.G, 0.0);
  for (std::size_t k = 1; k <= half; ++k) {
    const double xi = static_cast<double>(k) * prof.dxi;
    const double phi = branch.phi_at(xi);
    const double slope = -std::sqrt(2.0 * std::max(energy_deficit(phi, params), 0.0));
    if (k < half) fill(half + k, xi, phi, slope);
    fill(half - k, -xi, phi, -slope);
  }
  return prof;
}

double xi_of_phi(double phi, const WaveParams& params) {
  const HomoclinicBranch branch(params, 1e-10);
  return branch.xi_of_phi(phi);
}

double line_integral(const WaveParams& params,
                     const std::function<double(const OrbitSample&)>& integrand) {
  const HomoclinicBranch branch(params, 1e-10);
  const double G = branch.G();
  const double k = params.kappa;
  const double crest_rise = G - k;
  const double crest_gap = params.c - G;
  const double g = params.gamma();
  auto upper = [&](double t) {
    const double tau = t * t;
    const double ratio = branch.crest_deficit_ratio(tau);
    const OrbitSample pt{G - tau, crest_rise - tau, crest_gap + tau, 2.0 * tau * ratio};
    return integrand(pt) * 2.0 / std::sqrt(2.0 * ratio);
  };
  auto lower = [&](double sigma) {
    const double s = std::exp(sigma);
    const OrbitSample pt{k + s, s, g - s, 2.0 * energy_deficit(k + s, params)};
    return integrand(pt) * branch.lower_integrand(sigma);
  };
  constexpr double tol = 1e-12;
  constexpr unsigned depth = 20;
  // Break the crest piece where mu varies fastest: c - phi ~ c - G.
  const double t_split = branch.t_split();
  const double t_fast = std::min(t_split, 4.0 * std::sqrt(params.c - G));
  double total = 0.0;
  if (t_fast < t_split) {
    total += KronrodRule::integrate(upper, 0.0, t_fast, depth, tol);
    total += KronrodRule::integrate(upper, t_fast, t_split, depth, tol);
  } else {
    total += KronrodRule::integrate(upper, 0.0, t_split, depth, tol);
  }
  const double sigma_split = branch.sigma_split();
  const double sigma_min = std::log(1e-300) / 2.0;
  // The integrand decays at least like exp(sigma); stop once a chunk no
  // longer changes the sum.
  for (double hi = sigma_split; hi > sigma_min;) {
    const double lo = std::max(sigma_min, hi - 8.0);
    // Far in the tail phi = kappa + exp(sigma) is only known to a few digits,
    // so ask each chunk for accuracy relative to the running total.
    const double rough = std::fabs(KronrodRule::integrate(lower, lo, hi, 0, tol));
    const double chunk_tol =
        rough > 0.0 ? std::clamp(tol * std::fabs(total) / rough, tol, 1e-2) : 1e-2;
    const double piece = KronrodRule::integrate(lower, lo, hi, depth, chunk_tol);
    total += piece;
    if (std::fabs(piece) <= 1e-18 * std::fabs(total)) break;
    hi = lo;
  }
  return 2.0 * total;
}

std::vector<Orbit> phase_portrait(const WaveParams& params, std::span<const double> energies,
                                  std::size_t samples_per_branch) {
  require_admissible(params);
  if (samples_per_branch < 2) throw DomainError("phase_portrait: need >= 2 samples per branch");
  const double e_hom = homoclinic_energy(params);
  const double center = center_point(params);
  const double v_center = potential(center, params);
  const double G = turning_point(params);

  std::vector<Orbit> orbits;
  orbits.reserve(energies.size());
  for (const double e : energies) {
    Orbit orbit;
    orbit.energy = e;
    const double slack = 1e-13 * std::max(1.0, std::fabs(e_hom));
    if (e > e_hom + slack) {
      std::ostringstream os;
      os.precision(17);
      os << "phase_portrait: energy " << e << " exceeds the homoclinic level " << e_hom;
      throw DomainError(os.str());
    }
    if (e < v_center - slack) {
      orbits.push_back(std::move(orbit));
      continue;
    }
    // e - V(phi) written as (e - E_hom) + (E_hom - V(phi)).
    const double offset = std::min(e, e_hom) - e_hom;
    auto radicand = [&](double phi) { return offset + energy_deficit(phi, params); };
    if (e <= v_center) {
      orbit.points.push_back({center, 0.0});
      orbits.push_back(std::move(orbit));
      continue;
    }
    const double left = offset == 0.0 ? params.kappa
                                      : bisect(radicand, params.kappa, center, 1e-15 * params.c);
    const double right = offset == 0.0 ? G : bisect(radicand, center, G, 1e-15 * params.c);
    const std::size_t n = samples_per_branch;
    orbit.points.reserve(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
      const double phi = left + (right - left) * 0.5 * (1.0 - std::cos(theta));
      const double psi = std::sqrt(2.0 * std::max(radicand(phi), 0.0));
      orbit.points.push_back({phi, psi});
    }
    for (std::size_t i = n - 1; i-- > 0;) {
      const PhasePoint& up = orbit.points[i];
      orbit.points.push_back({up.phi, -up.psi});
    }
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

}  // namespace bchlab
