#include <doctest.h>

#include <cmath>
#include <random>

#include "bchlab/criterion.hpp"
#include "oracles.hpp"

using namespace bchlab;

TEST_CASE("special functions against direct long double evaluation") {
  for (double phi : {1e-6, 1e-4, 1e-3, 0.1, 0.5, 0.9, 0.999}) {
    const long double x = phi;
    const long double l = std::log1p(-x);
    const long double f = x + (1 - x) * (x + 2 * l);
    const long double A = -x - l;
    const auto sf = special_functions(phi);
    CAPTURE(phi);
    CHECK(sf.F == doctest::Approx(static_cast<double>(oracle::F(x))).epsilon(phi < 1e-3 ? 1e-6 : 1e-12));
    if (phi >= 1e-3) {
      CHECK(sf.f == doctest::Approx(static_cast<double>(f)).epsilon(1e-10));
      CHECK(sf.g == doctest::Approx(static_cast<double>(std::pow(A, 2.5L) / (x * f))).epsilon(1e-10));
      CHECK(sf.Gfun == doctest::Approx(static_cast<double>(std::pow(A, 2.5L) / (f * f * f))).epsilon(1e-10));
    }
  }
  CHECK(special_functions(0.5).F == doctest::Approx(0.039094).epsilon(1e-6 / 0.039094));
  CHECK_THROWS_AS(special_functions(0.0), DomainError);
  CHECK_THROWS_AS(special_functions(1.0), DomainError);
}

TEST_CASE("series branch is continuous at its switch point") {
  for (double phi : {0.99e-4, 1.01e-4, 0.099, 0.101, 0.49, 0.51}) {
    const double a = special_functions(phi * (1 - 1e-9)).F;
    const double b = special_functions(phi * (1 + 1e-9)).F;
    CHECK(a == doctest::Approx(b).epsilon(1e-7));
  }
}

TEST_CASE("F' and F'' match differences of F") {
  for (double phi : {0.01, 0.2, 0.5, 0.8, 0.95}) {
    const double h = 1e-5 * phi;
    const double d1 = (special_functions(phi + h).F - special_functions(phi - h).F) / (2 * h);
    const double d2 = (F_prime(phi + h) - F_prime(phi - h)) / (2 * h);
    CHECK(F_prime(phi) == doctest::Approx(d1).epsilon(1e-6));
    CHECK(F_second(phi) == doctest::Approx(d2).epsilon(1e-6));
  }
}

TEST_CASE("F, F', F'' are positive near both ends") {
  for (double phi : {1e-8, 1e-6, 1e-4, 1 - 1e-4, 1 - 1e-6}) {
    CHECK(special_functions(phi).F > 0.0);
    CHECK(F_prime(phi) > 0.0);
    CHECK(F_second(phi) > 0.0);
  }
}

TEST_CASE("level function and its inverse") {
  CHECK(level_function(0.0) == 2.0);
  for (double phi : {1e-6, 0.01, 0.3, 0.7, 0.99}) {
    // phi + log(1 - phi) = -sum_{n>=2} phi^n / n, summed in long double
    long double denom = 0.0L, term = phi;
    for (int n = 2; n < 4000 && term > 1e-30L; ++n) {
      term *= phi;
      denom -= term / n;
    }
    const double ref = static_cast<double>(-static_cast<long double>(phi) * phi / denom);
    CHECK(level_function(phi) == doctest::Approx(ref).epsilon(1e-10));
    const double delta = 2.0 - level_function(phi);
    if (delta > 1e-8) CHECK(level_inverse_deficit(delta) == doctest::Approx(phi).epsilon(1e-8));
  }
}

TEST_CASE("curve points satisfy the level equation") {
  for (double h : {0.2, 1.0, 1.8}) {
    const auto g = build_gamma(h, 200);
    for (std::size_t i = 0; i < g.phi.size(); ++i) {
      if (g.phi[i] == 0.0) continue;
      CHECK(-g.psibar[i] * g.psibar[i] + level_function(g.phi[i]) == doctest::Approx(h).epsilon(1e-9));
    }
    CHECK(phi_on_curve(0.0, h) == doctest::Approx(g.phi0));
  }
}

TEST_CASE("closed-form derivative matches a difference of Qcal") {
  for (double h : {0.1, 0.5, 1.0, 1.5, 1.9}) {
    const double d = 1e-5 * h;
    const double fd = (transformed_Q(h + d) - transformed_Q(h - d)) / (2 * d);
    CHECK(transformed_dQ_dh(h) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(transformed_dQ_dh(h) < 0.0);
  }
}

TEST_CASE("the charge depends on (c, kappa) only through h") {
  for (auto [c, kappa] : {std::pair{2.0, 0.4}, std::pair{1.0, 0.2}, std::pair{4.0, 0.8}}) {
    const WaveParams p{1.0, c, kappa};
    CHECK(q_value(p) == doctest::Approx(transformed_Q(h_of_params(p))).epsilon(1e-8));
  }
  CHECK(h_of_params(WaveParams{1.0, 2.0, 0.4}) == doctest::Approx(0.5));
  CHECK(dh_dc(WaveParams{1.0, 2.0, 0.4}) == doctest::Approx(-0.8 / 2.56));
}

TEST_CASE("dQ/dc > 0 across random admissible parameters") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    const double c = 0.5 + 4.0 * U(rng);
    // below kappa/c ~ 0.05 the difference quotient of q_value is noise-limited
    const WaveParams p{1.0, c, (0.05 + 0.43 * U(rng)) * c};
    CAPTURE(p.c);
    CAPTURE(p.kappa);
    const double a = dq_dc(p);
    CHECK(a > 0.0);
    CHECK(a == doctest::Approx(transformed_dQ_dh(h_of_params(p)) * dh_dc(p)).epsilon(1e-5));
  }
}

TEST_CASE("sweep is independent of the thread count") {
  std::vector<double> hs;
  for (int i = 1; i <= 9; ++i) hs.push_back(0.2 * i);
  const auto a = criterion_sweep(hs, 1);
  const auto b = criterion_sweep(hs, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].h == b[i].h);
    CHECK(a[i].Qcal == b[i].Qcal);
    CHECK(a[i].dQcal_dh == b[i].dQcal_dh);
  }
}
