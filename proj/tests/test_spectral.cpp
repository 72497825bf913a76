#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bchlab/conserved.hpp"
#include "bchlab/evolution.hpp"
#include "bchlab/spectral.hpp"

using namespace bchlab;

namespace {

// The background mu == kappa dressed up as a profile.
WaveProfile flat_profile(std::size_t n, double L, WaveParams p) {
  WaveProfile f;
  f.params = p;
  f.half_length = L;
  f.dxi = 2 * L / static_cast<double>(n);
  f.G = f.M = p.kappa;
  for (std::size_t j = 0; j < n; ++j) f.xi.push_back((static_cast<double>(j) - n / 2.0) * f.dxi);
  f.phi.assign(n, p.kappa);
  f.mu.assign(n, p.kappa);
  f.phi_xi.assign(n, 0.0);
  f.mu_xi.assign(n, 0.0);
  f.mu_xixi.assign(n, 0.0);
  return f;
}

WaveProfile wave(std::size_t n, double L) {
  ProfileOptions o;
  o.n_points = n;
  o.half_length = L;
  return build_profile(WaveParams{1.0, 2.0, 0.4}, o);
}

void check_same(std::vector<double> a, std::vector<double> b, double rel) {
  REQUIRE(a.size() == b.size());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  }
  CHECK(worst < rel);
}

}  // namespace

TEST_CASE("constant-coefficient symbol (s/kappa^2)(k^2 + 1 - kappa/s)") {
  const WaveParams p{1.0, 2.0, 0.4};
  const std::size_t n = 256;
  const double L = 20.0;
  const auto flat = flat_profile(n, L, p);
  const double dx = 2 * L / n;
  for (Multiplier mult : {Multiplier::RelativeSpeed, Multiplier::WaveSpeed}) {
    const double s = lagrange_multiplier(p, mult);
    const double k2 = p.kappa * p.kappa;
    auto symbol = [&](double kk) { return s / k2 * (kk + 1.0 - p.kappa / s); };
    SUBCASE("spectral collocation") {
      std::vector<double> expect;
      for (std::size_t j = 0; j < n; ++j) {
        const double m = j <= n / 2 ? double(j) : double(j) - double(n);
        const double k = M_PI * m / L;
        expect.push_back(symbol(k * k));
      }
      check_same(eigenvalues(assemble_L(flat, spectral_collocation(mult))), expect, 1e-10);
    }
    SUBCASE("second-order, periodic") {
      std::vector<double> expect;
      for (std::size_t j = 0; j < n; ++j) {
        const double th = M_PI * double(j) / double(n);
        expect.push_back(symbol(4.0 / (dx * dx) * std::sin(th) * std::sin(th)));
      }
      SpectralOptions o;
      o.closure = Closure::Periodic;
      o.multiplier = mult;
      check_same(eigenvalues(assemble_L(flat, o)), expect, 1e-10);
    }
    SUBCASE("second-order, Dirichlet") {
      std::vector<double> expect;
      for (std::size_t j = 1; j < n; ++j) {
        const double th = M_PI * double(j) / (2.0 * double(n));
        expect.push_back(symbol(4.0 / (dx * dx) * std::sin(th) * std::sin(th)));
      }
      SpectralOptions o;
      o.multiplier = mult;
      check_same(eigenvalues(assemble_L(flat, o)), expect, 1e-10);
    }
  }
}

TEST_CASE("operator is symmetric and apply agrees with the dense matrix") {
  const auto prof = wave(512, 20.0);
  for (auto opts : {SpectralOptions{}, SpectralOptions{Closure::Periodic}, spectral_collocation(),
                    SpectralOptions{Closure::Dirichlet, Multiplier::RelativeSpeed,
                                    Discretization::FourthOrder}}) {
    const auto op = assemble_L(prof, opts);
    const auto A = op.dense();
    const std::size_t n = op.size();
    double asym = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        asym = std::max(asym, std::abs(A[i * n + j] - A[j * n + i]));
        scale = std::max(scale, std::abs(A[i * n + j]));
      }
    }
    CHECK(asym <= 1e-13 * scale);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N;
    std::vector<double> u(n);
    for (auto& x : u) x = N(rng);
    const auto Au = op.apply(u);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += A[i * n + j] * u[j];
      err = std::max(err, std::abs(s - Au[i]));
    }
    CHECK(err <= 1e-11 * scale);
  }
}

TEST_CASE("node counting") {
  CHECK(count_sign_changes(std::vector<double>{1, 2, 3}) == 0);
  CHECK(count_sign_changes(std::vector<double>{1, -2, 3}) == 2);
  CHECK(count_sign_changes(std::vector<double>{1, 1e-12, -1e-12, 1}) == 0);
  CHECK(count_sign_changes(std::vector<double>{-1, 0, 0, 2}) == 1);
}

TEST_CASE("constrained minimum on a diagonal operator") {
  SymmetricOperator op;
  op.n = 4;
  op.bands = {{-1.0, 2.0, 3.0, 5.0}, {0.0, 0.0, 0.0}};
  CHECK(constrained_minimum(op, {}) == doctest::Approx(-1.0));
  CHECK(constrained_minimum(op, {{1, 0, 0, 0}}) == doctest::Approx(2.0));
  CHECK(constrained_minimum(op, {{1, 0, 0, 0}, {0, 1, 0, 0}}) == doctest::Approx(3.0));
  // constraint mixing the two lowest modes: minimum of the 2x2 projection
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(constrained_minimum(op, {{r, r, 0, 0}}) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("second-order spectrum: one negative eigenvalue, translation mode converging at second order") {
  std::vector<double> zero;
  for (std::size_t n : {512, 1024}) {
    const auto rep = spectrum(wave(n, 30.0));
    CHECK(rep.negative_count == 1);
    CHECK(rep.ground_sign_changes == 0);
    CHECK(rep.zero_sign_changes == 1);
    CHECK(rep.zero_overlap > 0.99);
    CHECK(rep.essential_edge == doctest::Approx(7.5));
    zero.push_back(std::abs(rep.zero_value));
  }
  CHECK(zero[0] / zero[1] == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("Dirichlet and periodic closures agree on the wave") {
  const auto prof = wave(1024, 30.0);
  const auto d = eigenvalues(assemble_L(prof));
  SpectralOptions o;
  o.closure = Closure::Periodic;
  const auto p = eigenvalues(assemble_L(prof, o));
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(d[i] - p[i]) < 1e-6);
}

TEST_CASE("collocation spectrum at a modest grid") {
  const auto prof = wave(1024, 30.0);
  const auto rep = spectrum(prof, spectral_collocation());
  CHECK(rep.negative_count == 1);
  CHECK(rep.ground_sign_changes == 0);
  CHECK(std::abs(rep.zero_value) < 1e-4);
  CHECK(rep.zero_overlap > 0.999);
  CHECK(rep.cluster_edge == doctest::Approx(rep.essential_edge).epsilon(0.02));
  const auto lit = spectrum(prof, spectral_collocation(Multiplier::WaveSpeed));
  CHECK(lit.essential_edge == doctest::Approx(10.0));
  CHECK(std::abs(lit.zero_value) > 1e-2);  // mu_xi is not in its kernel

  const auto id = coercivity_identity(prof, spectral_collocation());
  CHECK(id.g0 < 0.0);
  CHECK(id.mismatch < 1e-4);
  CHECK(id.g0_profiles == doctest::Approx(id.dQdc).epsilon(1e-6));
  const auto cm = constrained_min_eig(prof, spectral_collocation());
  CHECK(cm.alpha0 > 0.0);
  CHECK(cm.lambda0 < cm.alpha0);
  CHECK(cm.lambda0 == doctest::Approx(rep.lambda0).epsilon(1e-8));
  CHECK(cm.translation_only <= cm.alpha0);
}

TEST_CASE("J_m is skew-symmetric") {
  const auto prof = embedded_profile(WaveParams{1.0, 2.0, 0.4}, 512, 40.0);
  const Field f = wave_field(prof);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N;
  std::vector<double> u(f.size()), v(f.size());
  for (int t = 0; t < 20; ++t) {
    for (auto& x : u) x = N(rng);
    for (auto& x : v) x = N(rng);
    const auto Ju = apply_Jm(f, u), Jv = apply_Jm(f, v);
    double a = 0, b = 0, nu = 0, nv = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      a += Ju[j] * v[j];
      b += u[j] * Jv[j];
      nu += u[j] * u[j];
      nv += v[j] * v[j];
    }
    CHECK(std::abs(a + b) / std::sqrt(nu * nv) < 1e-10);
  }
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(assemble_L(wave(128, 20.0)), DomainError);
  SpectralOptions bad;
  bad.discretization = Discretization::Spectral;
  CHECK_THROWS_AS(assemble_L(wave(512, 20.0), bad), DomainError);
}
