#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bchlab/evolution.hpp"
#include "bchlab/fourier.hpp"

using namespace bchlab;

namespace {

Field smooth_datum(std::size_t n, double L) {
  Field f;
  f.length = L;
  f.kappa = 1.0;
  f.m.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = f.x(j) * 2 * M_PI / L;
    f.m[j] = 1.0 + 0.2 * std::cos(x) + 0.1 * std::sin(2 * x);
  }
  return f;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("the wave is a steady state in the moving frame") {
  const WaveParams p{1.0, 2.0, 0.4};
  const auto prof = embedded_profile(p, 4096, 80.0);
  const Field f = wave_field(prof);
  Fourier fft(f.size(), f.length);
  const auto mx = fft.derivative(f.m);
  // m = mu(x - c t) has m_t = -c mu_x
  const auto r = rhs(f, 1.0, false);
  double res = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    res = std::max(res, std::abs(r[j] + p.c * mx[j]));
    scale = std::max(scale, std::abs(mx[j]));
  }
  CHECK(res < 1e-5 * scale);
}

TEST_CASE("conservative and advective forms agree for b = 1") {
  const auto f = smooth_datum(128, 2 * M_PI);
  CHECK(max_diff(rhs(f, 1.0, false), rhs_advective(f, 1.0)) < 1e-12);
}

TEST_CASE("the background is a fixed point") {
  const auto f = constant_field(64, 10.0, 0.7);
  for (double b : {0.7, 1.0, 1.4}) {
    const auto r = rhs(f, b);
    for (double x : r) CHECK(std::abs(x) < 1e-14);
  }
}

TEST_CASE("RK4 is fourth order in time") {
  const auto f0 = smooth_datum(64, 2 * M_PI);
  auto run = [&](double dt) {
    EvolutionConfig cfg;
    cfg.b = 1.4;
    cfg.kappa = 1.0;
    cfg.c = 3.0;
    cfg.domain_length = 2 * M_PI;
    cfg.n = 64;
    cfg.dt = dt;
    cfg.t_final = 1.0;
    cfg.record_every = 1.0;
    return evolve(f0, cfg).final_state.m;
  };
  const auto ref = run(0.0025);
  const double e1 = max_diff(run(0.04), ref);
  const double e2 = max_diff(run(0.02), ref);
  const double e3 = max_diff(run(0.01), ref);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.15));
  CHECK(e2 / e3 == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("spatial error of the traveling wave falls faster than any fixed order") {
  const WaveParams p{1.0, 2.0, 0.4};
  std::vector<double> mis;
  for (std::size_t n : {1024, 2048}) {
    EvolutionConfig cfg;
    cfg.n = n;
    cfg.domain_length = 80.0;
    cfg.dt = 0.0025;
    cfg.t_final = 1.0;
    cfg.record_every = 0.5;
    const auto prof = embedded_profile(p, n, cfg.domain_length);
    const auto trace = evolve(wave_field(prof), cfg, &prof);
    REQUIRE_FALSE(trace.failed);
    mis.push_back(traveling_mismatch(trace.final_state, prof));
  }
  CHECK(mis[0] / mis[1] > 16.0);
}

TEST_CASE("invariants drift little for b != 1") {
  for (double b : {0.8, 1.4}) {
    const WaveParams p{b, 2.0, 0.5};
    EvolutionConfig cfg;
    cfg.b = b;
    cfg.c = 2.0;
    cfg.kappa = 0.5;
    cfg.n = 8192;
    cfg.domain_length = 60.0;
    cfg.dt = 0.0025;
    cfg.t_final = 1.0;
    const auto prof = embedded_profile(p, cfg.n, cfg.domain_length);
    const auto trace = evolve(wave_field(prof), cfg, &prof);
    REQUIRE_FALSE(trace.failed);
    CHECK(trace.names[0] == "E");
    for (double d : trace.max_drift) CHECK(d < 1e-6);
  }
}

TEST_CASE("best_shift recovers a translation") {
  const std::size_t n = 512;
  const double L = 40.0;
  Fourier fft(n, L);
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = -L / 2 + j * L / n;
    g[j] = std::exp(-x * x / 4.0);
  }
  for (double s : {0.0, 0.3, -1.234, 7.77}) {
    const auto f = fft.shift(g, s);
    const auto fit = best_shift(f, g, L, 1);
    CHECK(fit.shift == doctest::Approx(s).epsilon(1e-8));
    CHECK(fit.distance < 1e-8);
  }
}

TEST_CASE("bumps are mean-zero with the requested H1 size, and reproducible") {
  const auto prof = embedded_profile(WaveParams{1.0, 2.0, 0.4}, 1024, 80.0);
  const Field f = wave_field(prof);
  const auto bump = random_bump(42);
  CHECK(bump.width >= 0.5);
  CHECK(bump.width <= 2.0);
  CHECK(std::abs(bump.centre) <= 2.0);
  const auto again = random_bump(42);
  CHECK(again.centre == bump.centre);
  CHECK(again.width == bump.width);
  const auto v = gaussian_bump(f, bump, 0.01);
  CHECK(std::abs(std::accumulate(v.begin(), v.end(), 0.0)) < 1e-12);
  CHECK(h1_norm(v, f.length) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("stability experiments are deterministic and recover the wave when eps = 0") {
  EvolutionConfig cfg;
  cfg.n = 4096;
  cfg.domain_length = 80.0;
  cfg.dt = 0.0025;
  cfg.t_final = 0.5;
  const WaveParams p{1.0, 2.0, 0.4};
  const auto a = stability_experiment(p, 0.01, cfg, 5);
  const auto b = stability_experiment(p, 0.01, cfg, 5);
  CHECK(a.trace.final_state.m == b.trace.final_state.m);
  CHECK(a.initial_distance == doctest::Approx(0.01).epsilon(0.05));
  const auto z = stability_experiment(p, 0.0, cfg, 5);
  CHECK(z.max_distance < 1e-3);
  CHECK(z.settled_speed == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("configuration is validated") {
  EvolutionConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.n = 1000;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = {};
  cfg.domain_length = -1;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = {};
  cfg.t_final = -1;
  CHECK_THROWS_AS(validate(cfg), DomainError);
}

TEST_CASE("an oversized step is refused rather than run unstably") {
  EvolutionConfig cfg;
  cfg.n = 1024;
  cfg.domain_length = 60.0;
  cfg.dt = 0.5;
  cfg.t_final = 1.0;
  const auto prof = embedded_profile(WaveParams{1.0, 2.0, 0.4}, cfg.n, cfg.domain_length);
  const auto trace = evolve(wave_field(prof), cfg, &prof);
  CHECK(trace.failed);
  CHECK_FALSE(trace.failure.empty());
}
