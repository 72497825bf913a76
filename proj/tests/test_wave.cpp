#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bchlab/wave.hpp"
#include "oracles.hpp"

using namespace bchlab;

TEST_CASE("equilibria of the wave ODE sit at kappa and c - kappa") {
  const WaveParams p{1.0, 2.0, 0.4};
  const auto s = vector_field({0.4, 0.0}, p);
  const auto c = vector_field({center_point(p), 0.0}, p);
  CHECK(std::abs(s.phi) + std::abs(s.psi) <= 1e-15);
  CHECK(std::abs(c.phi) + std::abs(c.psi) <= 1e-15);
  CHECK(center_point(p) == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(saddle_rate(p) == doctest::Approx(std::sqrt(0.75)));
}

TEST_CASE("crest agrees with bisection and shooting oracles") {
  SUBCASE("reference point") {
    const WaveParams p{1.0, 2.0, 0.4};
    const double G = turning_point(p);
    CHECK(std::abs(G - 1.888) < 1e-3);
    CHECK(std::abs(G - oracle::crest_by_bisection(1.0, 2.0, 0.4)) < 1e-12);
    CHECK(std::abs(G - oracle::crest_by_shooting(2.0, 0.4)) < 1e-8);
  }
  SUBCASE("random admissible parameters, several b") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
      const double b = 0.5 + 1.5 * U(rng);
      const double c = 0.5 + 4.0 * U(rng);
      // for b < 1 smooth crests also need kappa > c(1-b)/(1+b)
      const double lo = b < 1.0 ? c * (1.0 - b) / (1.0 + b) : 0.0;
      const double hi = c / (b + 1.0);
      const double kappa = lo + (0.05 + 0.9 * U(rng)) * (hi - lo);
      const WaveParams p{b, c, kappa};
      REQUIRE_FALSE(admissibility_violation(p));
      const double G = turning_point(p);
      const double ref = oracle::crest_by_bisection(b, c, kappa);
      CHECK(std::abs(G - ref) <= 1e-10 * c);
      CHECK(G > center_point(p));
      CHECK(G < c);
    }
  }
}

TEST_CASE("b < 1 lower kappa bound matches where the level curve stops closing") {
  // Below the bound V(c) is finite and never climbs back to the saddle level,
  // so no crest exists in (c - kappa, c).
  for (double b : {0.3, 0.6, 0.9}) {
    const double c = 2.0;
    const double bound = c * (1.0 - b) / (1.0 + b);
    for (double f : {0.5, 0.9, 0.99, 1.01, 1.1, 1.5}) {
      const double kappa = f * bound;
      if (kappa >= c / (b + 1.0)) continue;
      const double level = oracle::potential(kappa, b, c, kappa);
      const double at_c = oracle::potential(c, b, c, kappa);
      const double at_centre = oracle::potential(c - kappa, b, c, kappa);
      const bool crest_exists = (at_c - level) * (at_centre - level) < 0.0;
      CHECK(crest_exists == !admissibility_violation(WaveParams{b, c, kappa}).has_value());
    }
  }
}

TEST_CASE("potential matches the independent formula") {
  for (double b : {0.7, 1.0, 1.4}) {
    const WaveParams p{b, 2.0, 0.5};
    for (double phi : {0.3, 0.5, 1.0, 1.5, 1.9}) {
      CHECK(potential(phi, p) == doctest::Approx(oracle::potential(phi, b, 2.0, 0.5)).epsilon(1e-13));
    }
  }
}

TEST_CASE("mu_max closed forms agree") {
  for (double kappa : {0.1, 0.4, 0.9}) {
    const WaveParams p{1.0, 2.0, kappa};
    // the exponential form loses ~c/(c-G) digits as the crest nears c
    CHECK(mu_max(p) == doctest::Approx(mu_max_exponential_form(p)).epsilon(1e-9));
  }
}

TEST_CASE("crest sensitivities match finite differences") {
  const WaveParams p{1.0, 2.0, 0.4};
  const auto s = turning_point_sensitivities(p);
  const double h = 1e-5;
  auto G = [](double c, double k) { return turning_point(WaveParams{1.0, c, k}); };
  const double dc = (G(2.0 + h, 0.4) - G(2.0 - h, 0.4)) / (2 * h);
  const double dk = (G(2.0, 0.4 + h) - G(2.0, 0.4 - h)) / (2 * h);
  CHECK(s.dG_dc == doctest::Approx(dc).epsilon(1e-7));
  CHECK(s.dG_dkappa == doctest::Approx(dk).epsilon(1e-7));
}

TEST_CASE("inadmissible parameters are rejected with the inequality named") {
  CHECK(admissibility_violation(WaveParams{1.0, 2.0, 0.4}) == std::nullopt);
  const auto why = admissibility_violation(WaveParams{1.0, 2.0, 1.2});
  REQUIRE(why.has_value());
  CHECK(why->find("kappa < c/(b+1)") != std::string::npos);
  CHECK_THROWS_AS(require_admissible(WaveParams{1.0, -1.0, 0.4}), DomainError);
  CHECK_THROWS_AS(require_admissible(WaveParams{0.0, 2.0, 0.4}), DomainError);
  CHECK_THROWS_AS(turning_point(WaveParams{1.0, 2.0, 1.0}), DomainError);
  CHECK_THROWS_AS(vector_field({2.0, 0.0}, WaveParams{1.0, 2.0, 0.4}), DomainError);
  CHECK_THROWS_AS(potential(2.5, WaveParams{1.0, 2.0, 0.4}), DomainError);
}

TEST_CASE("profile properties") {
  for (double b : {0.7, 1.0, 1.4}) {
    const WaveParams p{b, 2.0, b == 1.0 ? 0.4 : 0.5};
    ProfileOptions o;
    o.n_points = 2048;
    const auto prof = build_profile(p, o);
    const std::size_t n = prof.size();
    const std::size_t m = prof.center_index();
    CAPTURE(b);
    CHECK(prof.phi[m] == doctest::Approx(prof.G).epsilon(1e-14));
    CHECK(prof.xi[m] == 0.0);
    double sym = 0.0, mono = 0.0, energy_err = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
      sym = std::max(sym, std::abs(prof.phi[m + k] - prof.phi[m - k]));
      mono = std::max(mono, prof.phi[m + k] - prof.phi[m + k - 1]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double e = energy({prof.phi[j], prof.phi_xi[j]}, p) - homoclinic_energy(p);
      energy_err = std::max(energy_err, std::abs(e));
      CHECK(prof.mu[j] == doctest::Approx(mu_of_phi(prof.phi[j], p)).epsilon(1e-14));
    }
    CHECK(sym <= 1e-12);
    CHECK(mono <= 0.0);  // decreasing away from the crest
    CHECK(energy_err <= 1e-10);
    CHECK(prof.phi.front() - p.kappa < 1e-9);
    CHECK(prof.M == doctest::Approx(mu_max(p)));
  }
}

TEST_CASE("xi_of_phi inverts the profile") {
  const WaveParams p{1.0, 2.0, 0.4};
  ProfileOptions o;
  o.n_points = 1024;
  const auto prof = build_profile(p, o);
  for (std::size_t j = prof.center_index() + 1; j < prof.size(); j += 37) {
    if (prof.phi[j] - p.kappa < 1e-6) break;
    CHECK(xi_of_phi(prof.phi[j], p) == doctest::Approx(prof.xi[j]).epsilon(1e-9));
  }
}

TEST_CASE("phase portraits close for b in {0.7, 1, 1.4}") {
  for (double b : {0.7, 1.0, 1.4}) {
    const WaveParams p{b, 2.0, 0.5};
    const double vc = potential(center_point(p), p);
    const double eh = homoclinic_energy(p);
    std::vector<double> levels{vc + 0.3 * (eh - vc), vc + 0.7 * (eh - vc), eh};
    const auto orbits = phase_portrait(p, levels, 200);
    REQUIRE(orbits.size() == 3);
    for (const auto& o : orbits) {
      REQUIRE(o.points.size() > 10);
      // closes: the loop returns to its first point
      const auto& a = o.points.front();
      const auto& z = o.points.back();
      CHECK(std::hypot(a.phi - z.phi, a.psi - z.psi) < 1e-9);
      for (const auto& pt : o.points) {
        CHECK(std::abs(energy(pt, p) - o.energy) <= 1e-9 * std::max(1.0, std::abs(o.energy)));
      }
    }
    // the homoclinic loop reaches the saddle and the crest
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& pt : orbits.back().points) {
      lo = std::min(lo, pt.phi);
      hi = std::max(hi, pt.phi);
    }
    CHECK(lo == doctest::Approx(p.kappa).epsilon(1e-9));
    CHECK(hi == doctest::Approx(turning_point(p)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(phase_portrait(WaveParams{1.0, 2.0, 0.4}, std::vector<double>{1e3}), DomainError);
}

TEST_CASE("line_integral reproduces a trapezoid sum on a fine profile") {
  const WaveParams p{1.0, 2.0, 0.4};
  ProfileOptions o;
  o.n_points = 16384;
  const auto prof = build_profile(p, o);
  double trap = 0.0;
  for (double v : prof.phi) trap += (v - p.kappa);
  trap *= prof.dxi;
  const double li = line_integral(p, [](const OrbitSample& s) { return s.rise; });
  CHECK(li == doctest::Approx(trap).epsilon(1e-6));
}
