#include "bchlab/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>
#include <stdexcept>

#include "bchlab/conserved.hpp"
#include "bchlab/criterion.hpp"
#include "bchlab/evolution.hpp"
#include "bchlab/spectral.hpp"
#include "bchlab/wave.hpp"

namespace bchlab::verify {

namespace {

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Check check(std::string invariant, bool ok, double measured, double target, double tol,
            std::string detail = {}) {
  return Check{std::move(invariant), ok, measured, target, tol, std::move(detail)};
}

// |measured - target| <= tol
Check near(std::string invariant, double measured, double target, double tol,
           std::string detail = {}) {
  return check(std::move(invariant), std::abs(measured - target) <= tol, measured, target, tol,
               std::move(detail));
}

// measured < bound
Check below(std::string invariant, double measured, double bound, std::string detail = {}) {
  return check(std::move(invariant), measured < bound, measured, bound, 0.0, std::move(detail));
}

std::string params_tag(const WaveParams& p) {
  return fmt("(b,c,kappa) = (%g, %g, %g)", p.b, p.c, p.kappa);
}

// Crest of the homoclinic orbit by plain bisection on V(phi) = V(kappa),
// V(phi) = -phi^2/2 - kappa (c - kappa) ln(c - phi). Only the b = 1 potential.
double bisection_crest(double c, double kappa) {
  const double g = c - kappa;
  auto V = [&](double phi) { return -0.5 * phi * phi - kappa * g * std::log(c - phi); };
  const double level = V(kappa);
  double lo = c - kappa;  // V(lo) < level
  double hi = c;          // V -> +inf
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (V(mid) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// 4 (phi^2 + (phi - 1) ln^2(1 - phi)), written out independently of the library.
double F_direct(double phi) {
  const double l = std::log1p(-phi);
  return 4.0 * (phi * phi + (phi - 1.0) * l * l);
}

CriterionResult existence(const SuiteOptions&) {
  CriterionResult r;
  const WaveParams p{1.0, 2.0, 0.4};
  const auto at_saddle = vector_field({p.kappa, 0.0}, p);
  const auto at_centre = vector_field({center_point(p), 0.0}, p);
  const double vs = std::hypot(at_saddle.phi, at_saddle.psi);
  const double vc = std::hypot(at_centre.phi, at_centre.psi);
  r.checks.push_back(check("vector field vanishes at the saddle (0.4, 0)", vs <= 1e-15, vs, 0.0,
                           1e-15));
  r.checks.push_back(near("centre equilibrium at 1.6", center_point(p), 1.6, 1e-15));
  r.checks.push_back(
      check("vector field vanishes at the centre (1.6, 0)", vc <= 1e-15, vc, 0.0, 1e-15));
  const double G = turning_point(p);
  const double oracle = bisection_crest(p.c, p.kappa);
  r.checks.push_back(near("crest G(2, 0.4) = 1.888", G, 1.888, 1e-3));
  r.checks.push_back(near("crest agrees with bisection oracle", G, oracle, 1e-3,
                          fmt("difference %.3e", G - oracle)));
  return r;
}

CriterionResult mu_consistency(const SuiteOptions&) {
  CriterionResult r;
  const WaveParams p{1.0, 2.0, 0.4};
  std::array<double, 3> err{};
  const std::array<std::size_t, 3> ns{1024, 2048, 4096};
  for (std::size_t k = 0; k < ns.size(); ++k) {
    ProfileOptions o;
    o.n_points = ns[k];
    const auto prof = build_profile(p, o);
    const auto dd = central_second(prof.phi, prof.dxi);
    double e = 0.0;
    for (std::size_t j = 0; j < prof.size(); ++j) {
      e = std::max(e, std::abs(prof.phi[j] - dd[j] - prof.mu[j]));
    }
    err[k] = e;
  }
  for (std::size_t k = 0; k + 1 < ns.size(); ++k) {
    const double ratio = err[k] / err[k + 1];
    r.checks.push_back(near(fmt("(1 - d^2) phi - mu shrinks 4x from N = %g to %g",
                                static_cast<double>(ns[k]), static_cast<double>(ns[k + 1])),
                            ratio, 4.0, 0.5, fmt("errors %.3e -> %.3e", err[k], err[k + 1])));
  }
  return r;
}

CriterionResult stability_criterion(const SuiteOptions& opt) {
  CriterionResult r;
  for (double c : {1.0, 2.0, 4.0}) {
    for (double ratio : {0.05, 0.2, 0.45}) {
      const WaveParams p{1.0, c, ratio * c};
      const double a = dq_dc(p);
      r.checks.push_back(check("dQ/dc > 0 at " + params_tag(p), a > 0.0, a, 0.0, 0.0));
      const double h = h_of_params(p);
      const double b = transformed_dQ_dh(h) * dh_dc(p);
      const double rel = std::abs(a - b) / std::abs(a);
      r.checks.push_back(check("dQ/dc agrees with Qcal'(h) dh/dc at " + params_tag(p), rel < 1e-4,
                               rel, 0.0, 1e-4, fmt("dQ/dc %.10g, chain rule %.10g", a, b)));
    }
  }
  std::vector<double> hs;
  for (int i = 1; i <= 19; ++i) hs.push_back(0.1 * i);
  for (const auto& row : criterion_sweep(hs, opt.jobs)) {
    r.checks.push_back(check(fmt("Qcal'(h) < 0 at h = %.1f", row.h), row.dQcal_dh < 0.0,
                             row.dQcal_dh, 0.0, 0.0));
  }
  return r;
}

CriterionResult f_positivity(const SuiteOptions&) {
  CriterionResult r;
  const int n = 10000;
  const double top = 1.0 - 1e-6;
  double minF = INFINITY, minF1 = INFINITY, minF2 = INFINITY;
  for (int i = 1; i <= n; ++i) {
    const double phi = top * i / (n + 1.0);
    minF = std::min(minF, special_functions(phi).F);
    minF1 = std::min(minF1, F_prime(phi));
    minF2 = std::min(minF2, F_second(phi));
  }
  r.checks.push_back(check("F > 0 on (0, 1 - 1e-6)", minF > 0.0, minF, 0.0, 0.0, "minimum shown"));
  r.checks.push_back(check("F' > 0 on (0, 1 - 1e-6)", minF1 > 0.0, minF1, 0.0, 0.0));
  r.checks.push_back(check("F'' > 0 on (0, 1 - 1e-6)", minF2 > 0.0, minF2, 0.0, 0.0));
  const double F05 = special_functions(0.5).F;
  r.checks.push_back(near("F(0.5) = 0.039094", F05, 0.039094, 1e-6));
  r.checks.push_back(near("F(0.5) matches direct evaluation", F05, F_direct(0.5), 1e-6));
  return r;
}

WaveProfile spectral_profile() {
  ProfileOptions o;
  o.n_points = 2048;
  o.half_length = 60.0;
  return build_profile(WaveParams{1.0, 2.0, 0.4}, o);
}

CriterionResult spectrum_criterion(const SuiteOptions&) {
  CriterionResult r;
  const auto prof = spectral_profile();
  const auto rep = spectrum(prof, spectral_collocation());
  r.checks.push_back(near("exactly one negative eigenvalue", static_cast<double>(rep.negative_count),
                          1.0, 0.0, fmt("lambda0 = %.8g", rep.lambda0)));
  r.checks.push_back(near("ground state is nodeless",
                          static_cast<double>(rep.ground_sign_changes), 0.0, 0.0));
  r.checks.push_back(below("near-zero eigenvalue |lambda| < 1e-4", std::abs(rep.zero_value), 1e-4));
  r.checks.push_back(check("zero mode overlaps mu_xi > 0.999", rep.zero_overlap > 0.999,
                           rep.zero_overlap, 0.999, 0.0));
  const double rel = std::abs(rep.cluster_edge - 10.0) / 10.0;
  r.checks.push_back(check("cluster edge within 2% of (c - kappa)/kappa^2 = 10", rel <= 0.02,
                           rep.cluster_edge, 10.0, 0.2,
                           fmt("edge of the operator with multiplier s = %g is (s - kappa)/kappa^2 "
                               "= %g; relative gap to 10 is %.3f",
                               rep.multiplier, rep.essential_edge, rel)));
  return r;
}

CriterionResult coercivity_criterion(const SuiteOptions&) {
  CriterionResult r;
  const auto prof = spectral_profile();
  const auto opts = spectral_collocation();
  const auto id = coercivity_identity(prof, opts);
  r.checks.push_back(check("g0 = <L0^-1 psi_Q, psi_Q> < 0", id.g0 < 0.0, id.g0, 0.0, 0.0));
  r.checks.push_back(check("g0 matches dQ(mu)/dc", id.mismatch < 1e-3, id.g0, id.dQdc,
                           1e-3 * std::abs(id.dQdc), fmt("relative mismatch %.3e", id.mismatch)));
  const auto cm = constrained_min_eig(prof, opts);
  r.checks.push_back(check("constrained minimum alpha0 > 0", cm.alpha0 > 0.0, cm.alpha0, 0.0, 0.0));
  r.checks.push_back(check("lambda0 < alpha0", cm.lambda0 < cm.alpha0, cm.lambda0, cm.alpha0, 0.0));
  return r;
}

CriterionResult skew_criterion(const SuiteOptions& opt) {
  CriterionResult r;
  const auto prof = embedded_profile(WaveParams{1.0, 2.0, 0.4}, 1024, 80.0);
  const Field f = wave_field(prof);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  std::vector<double> u(f.size()), v(f.size());
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < a.size(); ++j) s += static_cast<long double>(a[j]) * b[j];
    return static_cast<double>(s);
  };
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    for (auto& x : u) x = normal(rng);
    for (auto& x : v) x = normal(rng);
    const auto Ju = apply_Jm(f, u);
    const auto Jv = apply_Jm(f, v);
    const double q = std::abs(dot(Ju, v) + dot(u, Jv)) / std::sqrt(dot(u, u) * dot(v, v));
    worst = std::max(worst, q);
  }
  r.checks.push_back(below("J_m skew-symmetric over 100 random pairs", worst, 1e-10));
  return r;
}

struct StabilityCase {
  WaveParams params;
  std::size_t n;
  double length;
  double dt;
};

CriterionResult evolution_criterion(const SuiteOptions& opt) {
  CriterionResult r;
  const WaveParams base{1.0, 2.0, 0.4};
  EvolutionConfig cfg;
  cfg.b = base.b;
  cfg.c = base.c;
  cfg.kappa = base.kappa;
  cfg.n = 4096;
  cfg.domain_length = 80.0;
  cfg.dt = 0.0025;
  cfg.t_final = 5.0;
  cfg.record_every = 0.25;

  auto traveling = [&] {
    const auto prof = embedded_profile(base, cfg.n, cfg.domain_length);
    auto trace = evolve(wave_field(prof), cfg, &prof);
    const double mis = trace.failed ? INFINITY : traveling_mismatch(trace.final_state, prof);
    return std::make_pair(std::move(trace), mis);
  };

  // The b = 0.7 wave has a crest of width ~0.06 and needs the finer grid.
  const std::array<StabilityCase, 3> cases{{
      {{1.0, 2.0, 0.4}, 4096, 80.0, 0.0025},
      {{0.7, 2.0, 0.5}, 16384, 50.0, 0.0005},
      {{1.4, 2.0, 0.5}, 4096, 80.0, 0.0025},
  }};
  const double eps = 1e-2;
  auto stability = [&](const StabilityCase& sc) {
    EvolutionConfig c = cfg;
    c.n = sc.n;
    c.domain_length = sc.length;
    c.dt = sc.dt;
    c.t_final = opt.fast ? 5.0 : 20.0;
    return stability_experiment(sc.params, eps, c, opt.seed);
  };

  std::pair<EvolutionTrace, double> trav;
  std::vector<StabilityReport> reps;
  if (opt.jobs > 1) {
    auto ft = std::async(std::launch::async, traveling);
    std::vector<std::future<StabilityReport>> fs;
    for (const auto& sc : cases) fs.push_back(std::async(std::launch::async, stability, sc));
    trav = ft.get();
    for (auto& f : fs) reps.push_back(f.get());
  } else {
    trav = traveling();
    for (const auto& sc : cases) reps.push_back(stability(sc));
  }

  const auto& tt = trav.first;
  if (tt.failed) r.checks.push_back(check("traveling run completes", false, 0, 0, 0, tt.failure));
  r.checks.push_back(below("traveling wave keeps its shape for T = 5", trav.second, 1e-4,
                           "relative shifted-profile mismatch"));
  for (std::size_t i = 0; i < 3; ++i) {
    r.checks.push_back(below(tt.names[i] + " drift along the traveling wave", tt.max_drift[i], 1e-6));
  }
  for (const auto& rep : reps) {
    const auto tag = params_tag(rep.params);
    if (rep.trace.failed) {
      r.checks.push_back(check("perturbed run completes at " + tag, false, 0, 0, 0,
                               rep.trace.failure));
      continue;
    }
    r.checks.push_back(below(
        "orbital distance < 5 eps at " + tag, rep.max_distance, 5.0 * eps,
        fmt("ratio %.3g; settles near c' = %.6g at distance %.3g", rep.ratio, rep.settled_speed,
            rep.settled_distance) +
            fmt("; bump centre %.3g width %.3g", rep.bump.centre, rep.bump.width)));
    for (std::size_t i = 0; i < 3; ++i) {
      r.checks.push_back(
          below(rep.trace.names[i] + " drift at " + tag, rep.trace.max_drift[i], 1e-6));
    }
  }
  return r;
}

CriterionResult remainder_criterion(const SuiteOptions&) {
  CriterionResult r;
  ProfileOptions o;
  o.n_points = 2048;
  const auto prof = build_profile(WaveParams{1.0, 2.0, 0.4}, o);
  const std::vector<double> eps{0.0025, 0.005, 0.01, 0.02, 0.04};
  struct Shape {
    const char* name;
    double (*f)(double);
  };
  const Shape shapes[] = {
      {"gaussian", [](double x) { return std::exp(-x * x); }},
      {"sech^2", [](double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); }},
  };
  double mm = 0.0;
  for (double v : prof.mu_xi) mm += v * v;
  for (const auto& s : shapes) {
    std::vector<double> h(prof.size());
    double hm = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
      h[j] = s.f(prof.xi[j]);
      hm += h[j] * prof.mu_xi[j];
    }
    for (std::size_t j = 0; j < h.size(); ++j) h[j] -= hm / mm * prof.mu_xi[j];
    const auto rs = remainder_scaling(prof, h, eps);
    r.checks.push_back(near(std::string("remainder slope 3 for the ") + s.name + " bump", rs.slope,
                            3.0, 0.2));
  }
  return r;
}

struct Entry {
  const char* title;
  double budget;
  CriterionResult (*run)(const SuiteOptions&);
};

const std::array<Entry, criterion_count> entries{{
    {"equilibria and crest of the wave ODE", 1.0, existence},
    {"second-order consistency of mu", 5.0, mu_consistency},
    {"stability criterion, both routes", 30.0, stability_criterion},
    {"positivity of F", 1.0, f_positivity},
    {"spectrum of the linearised operator", 60.0, spectrum_criterion},
    {"coercivity identity and constrained minimum", 60.0, coercivity_criterion},
    {"skew-symmetry of J_m", 5.0, skew_criterion},
    {"evolution: traveling, drifts, orbital stability", 600.0, evolution_criterion},
    {"cubic remainder of the Lagrangian expansion", 10.0, remainder_criterion},
}};

}  // namespace

bool CriterionResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* CriterionResult::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

CriterionResult run_criterion(int id, const SuiteOptions& options) {
  if (id < 1 || id > criterion_count) throw std::out_of_range("no criterion " + std::to_string(id));
  const auto& e = entries[static_cast<std::size_t>(id - 1)];
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = e.run(options);
  } catch (const std::exception& ex) {
    r.checks.push_back(check("criterion ran without error", false, 0, 0, 0, ex.what()));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.id = id;
  r.title = e.title;
  r.budget_seconds = e.budget;
  r.checks.push_back(below("runtime within budget", r.seconds, e.budget, "seconds"));
  return r;
}

std::vector<CriterionResult> run_suite(const SuiteOptions& options, std::span<const int> ids) {
  std::vector<CriterionResult> out;
  if (ids.empty()) {
    for (int i = 1; i <= criterion_count; ++i) out.push_back(run_criterion(i, options));
  } else {
    for (int i : ids) out.push_back(run_criterion(i, options));
  }
  return out;
}

std::string summary_line(const CriterionResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "criterion %d %s  %s  (%.2f s)", r.id, r.passed() ? "PASS" : "FAIL",
                r.title.c_str(), r.seconds);
  std::string s = buf;
  for (const auto& c : r.checks) {
    if (c.passed) continue;
    std::snprintf(buf, sizeof buf, "\n    violated: %s: measured %.6g, target %.6g", c.invariant.c_str(),
                  c.measured, c.target);
    s += buf;
    if (!c.detail.empty()) s += " (" + c.detail + ")";
  }
  return s;
}

}  // namespace bchlab::verify
