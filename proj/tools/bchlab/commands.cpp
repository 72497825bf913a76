#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "bchlab/conserved.hpp"
#include "bchlab/criterion.hpp"
#include "bchlab/evolution.hpp"
#include "bchlab/io.hpp"
#include "bchlab/spectral.hpp"
#include "bchlab/verify.hpp"
#include "bchlab/wave.hpp"

namespace bchlab::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using verify::Check;

namespace {

struct Result {
  std::vector<Check> checks;
  std::vector<std::string> outputs;
  std::vector<verify::CriterionResult> criteria;
};

Check check(std::string invariant, bool ok, double measured, double target, double tol = 0.0,
            std::string detail = {}) {
  return Check{std::move(invariant), ok, measured, target, tol, std::move(detail)};
}

json check_json(const Check& c) {
  json j;
  j["invariant"] = c.invariant;
  j["passed"] = c.passed;
  j["measured"] = c.measured;
  j["target"] = c.target;
  j["tolerance"] = c.tolerance;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

json params_json(const WaveParams& p) { return json{{"b", p.b}, {"c", p.c}, {"kappa", p.kappa}}; }

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

void emit_csv(Result& r, const fs::path& dir, const std::string& name, const CsvTable& t) {
  write_csv(dir / name, t);
  r.outputs.push_back(name);
}

void emit_json(Result& r, const fs::path& dir, const std::string& name, const json& j) {
  write_json(dir / name, j);
  r.outputs.push_back(name);
}

std::string numbered(const char* stem, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu.csv", stem, i);
  return buf;
}

// ---------------------------------------------------------------------------

Result cmd_profile(const RunConfig& cfg, const fs::path& dir) {
  Result r;
  const auto& p = cfg.params;
  ProfileOptions o;
  o.n_points = cfg.n.value_or(cfg.fast ? 1024 : 4096);
  if (cfg.domain_length) o.half_length = *cfg.domain_length / 2.0;
  const auto prof = build_profile(p, o);
  emit_csv(r, dir, "profile.csv", profile_table(prof));

  const json grid{{"n", prof.size()}, {"half_length", prof.half_length}, {"dxi", prof.dxi}};
  json records = json::array();
  auto record = [&](const char* name, double value) {
    records.push_back(json{{"name", name}, {"value", value}, {"params", params_json(p)}, {"grid", grid}});
  };

  const auto dd = central_second(prof.phi, prof.dxi);
  double residual = 0.0;
  for (std::size_t j = 0; j < prof.size(); ++j) {
    residual = std::max(residual, std::abs(prof.phi[j] - dd[j] - prof.mu[j]));
  }
  record("G", prof.G);
  record("M", prof.M);
  record("mu_residual", residual);

  const auto [lo, hi] = std::minmax_element(prof.phi.begin(), prof.phi.end());
  const double slack = 1e-12 * p.c;
  r.checks.push_back(check("phi stays within [kappa, G]", *lo >= p.kappa - slack && *hi <= prof.G + slack,
                           *hi, prof.G, slack));
  const double crest_gap = std::abs(prof.phi[prof.center_index()] - prof.G);
  const double crest_tol = tolerance(cfg, "crest", 1e-10);
  r.checks.push_back(check("crest sample equals the turning point", crest_gap <= crest_tol, crest_gap,
                           0.0, crest_tol));
  const double mu_min = *std::min_element(prof.mu.begin(), prof.mu.end());
  r.checks.push_back(check("mu is positive", mu_min > 0.0, mu_min, 0.0));

  const Field f = field_from_profile(prof);
  if (p.is_b1()) {
    const double H = hamiltonian_H(f);
    const double Q = q_functional(prof);
    record("H", H);
    record("Q1", q1(f));
    record("Q2", q2(f));
    record("charge", charge_Q(f));
    record("Q", Q);
    record("Q_orbit_quadrature", q_value(p));
    const auto grad = lagrangian_gradient(prof);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    record("lagrangian_gradient_sup", gmax);
    const auto psi = psi_Q(prof);
    std::vector<double> prod(prof.size());
    for (std::size_t j = 0; j < prod.size(); ++j) prod[j] = psi.closed[j] * prof.mu_xi[j];
    const double orth = std::abs(periodic_trapezoid(prod, prof.dxi));
    record("psi_Q_mu_xi_inner", orth);
    record("psi_Q_formula_mismatch", psi.mismatch);
    const double orth_tol = tolerance(cfg, "psi_Q_orthogonality", 1e-8);
    r.checks.push_back(check("psi_Q orthogonal to mu_xi", orth < orth_tol, orth, 0.0, orth_tol));
    r.checks.push_back(check("H > 0", H > 0.0, H, 0.0));
    r.checks.push_back(check("Q > 0", Q > 0.0, Q, 0.0));
  } else {
    const auto inv = conserved_family_bneq1(f, p.b);
    record("E", inv.E);
    record("F1", inv.F1);
    record("F2", inv.F2);
  }
  emit_json(r, dir, "functionals.json", records);
  return r;
}

Result cmd_portrait(const RunConfig& cfg, const fs::path& dir) {
  Result r;
  const auto& p = cfg.params;
  const double centre = center_point(p);
  const double e_hom = homoclinic_energy(p);
  const double v_centre = potential(centre, p);
  std::vector<double> energies = cfg.energies;
  if (energies.empty()) {
    for (double frac : {0.2, 0.4, 0.6, 0.8, 1.0}) energies.push_back(v_centre + frac * (e_hom - v_centre));
    energies.back() = e_hom;
  }
  const auto orbits = phase_portrait(p, energies, cfg.fast ? 128 : 512);

  const double fp_tol = tolerance(cfg, "equilibrium", 1e-12);
  for (double phi : {p.kappa, centre}) {
    const auto v = vector_field({phi, 0.0}, p);
    const double size = std::hypot(v.phi, v.psi);
    char name[96];
    std::snprintf(name, sizeof name, "vector field vanishes at (%.17g, 0)", phi);
    r.checks.push_back(check(name, size <= fp_tol, size, 0.0, fp_tol));
  }

  const double e_tol = tolerance(cfg, "orbit_energy", 1e-8);
  json list = json::array();
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const auto& o = orbits[i];
    const auto file = numbered("orbit", i);
    emit_csv(r, dir, file, orbit_table(o));
    double worst = 0.0;
    for (const auto& pt : o.points) worst = std::max(worst, std::abs(energy(pt, p) - o.energy));
    worst /= std::max(1.0, std::abs(o.energy));
    char name[96];
    std::snprintf(name, sizeof name, "first integral constant along orbit %zu", i);
    r.checks.push_back(check(name, worst <= e_tol, worst, 0.0, e_tol));
    list.push_back(json{{"energy", o.energy}, {"file", file}, {"points", o.points.size()},
                        {"homoclinic", o.energy == e_hom}});
  }
  json j;
  j["params"] = params_json(p);
  j["saddle"] = p.kappa;
  j["centre"] = centre;
  j["crest"] = turning_point(p);
  j["homoclinic_energy"] = e_hom;
  j["centre_energy"] = v_centre;
  j["orbits"] = list;
  emit_json(r, dir, "portrait.json", j);
  return r;
}

Result cmd_criterion(const RunConfig& cfg, const fs::path& dir) {
  Result r;
  const double chain_tol = tolerance(cfg, "chain_rule", 1e-4);
  json verdict;
  if (cfg.sweep) {
    std::vector<double> hs;
    const std::size_t k = cfg.sweep_points;
    for (std::size_t i = 1; i <= k; ++i) hs.push_back(2.0 * static_cast<double>(i) / static_cast<double>(k + 1));
    const auto rows = criterion_sweep(hs, cfg.jobs);
    emit_csv(r, dir, "sweep.csv", sweep_table(rows));
    for (const auto& row : rows) {
      char name[64];
      std::snprintf(name, sizeof name, "Qcal'(h) < 0 at h = %.6g", row.h);
      r.checks.push_back(check(name, row.dQcal_dh < 0.0, row.dQcal_dh, 0.0));
    }
    verdict["grid"] = json{{"h_min", hs.front()}, {"h_max", hs.back()}, {"points", hs.size()}};
  } else {
    const auto& p = cfg.params;
    const double h = h_of_params(p);
    const double Qcal = transformed_Q(h);
    const double dQdh = transformed_dQ_dh(h);
    const double a = dq_dc(p);
    const double b = dQdh * dh_dc(p);
    const double rel = std::abs(a - b) / std::abs(a);
    r.checks.push_back(check("Qcal'(h) < 0", dQdh < 0.0, dQdh, 0.0));
    r.checks.push_back(check("dQ/dc > 0", a > 0.0, a, 0.0));
    r.checks.push_back(check("dQ/dc agrees with Qcal'(h) dh/dc", rel < chain_tol, rel, 0.0, chain_tol));
    verdict["params"] = params_json(p);
    verdict["h"] = h;
    verdict["Qcal"] = Qcal;
    verdict["dQcal_dh"] = dQdh;
    verdict["Q"] = q_value(p);
    verdict["dQ_dc"] = a;
    verdict["chain_rule_dQ_dc"] = b;
    verdict["grid"] = json{{"h", h}, {"points", 1}};
  }
  const bool holds =
      std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.passed; });
  json out;
  out["criterion_holds"] = holds;
  for (auto& [k, v] : verdict.items()) out[k] = v;
  out["tolerances"] = json{{"chain_rule", chain_tol}};
  emit_json(r, dir, "criterion.json", out);
  return r;
}

Result cmd_spectrum(const RunConfig& cfg, const fs::path& dir) {
  Result r;
  const auto& p = cfg.params;
  ProfileOptions o;
  o.n_points = cfg.n.value_or(cfg.fast ? 1024 : 2048);
  o.half_length = cfg.domain_length.value_or(cfg.fast ? 60.0 : 120.0) / 2.0;
  const auto prof = build_profile(p, o);

  SpectralOptions so;
  so.multiplier = cfg.multiplier == "wave" ? Multiplier::WaveSpeed : Multiplier::RelativeSpeed;
  const bool periodic =
      cfg.closure == "periodic" || (cfg.closure == "auto" && cfg.discretization == "spectral");
  so.closure = periodic ? Closure::Periodic : Closure::Dirichlet;
  so.discretization = cfg.discretization == "fd4"        ? Discretization::FourthOrder
                      : cfg.discretization == "spectral" ? Discretization::Spectral
                                                         : Discretization::SecondOrder;
  const auto rep = spectrum(prof, so);
  const auto id = coercivity_identity(prof, so);
  const auto cm = constrained_min_eig(prof, so);
  emit_csv(r, dir, "eigenfunctions.csv", eigenfunction_table(prof, rep));

  const double zero_tol = tolerance(cfg, "zero_eigenvalue", 1e-4);
  const double overlap_tol = tolerance(cfg, "zero_overlap", 1e-3);
  const double g0_tol = tolerance(cfg, "g0_identity", 1e-3);
  const double edge_tol = tolerance(cfg, "cluster_edge", 0.02);
  r.checks.push_back(check("exactly one negative eigenvalue", rep.negative_count == 1,
                           static_cast<double>(rep.negative_count), 1.0));
  r.checks.push_back(check("ground state is nodeless", rep.ground_sign_changes == 0,
                           static_cast<double>(rep.ground_sign_changes), 0.0));
  r.checks.push_back(check("near-zero eigenvalue", std::abs(rep.zero_value) < zero_tol,
                           rep.zero_value, 0.0, zero_tol));
  r.checks.push_back(check("zero mode overlaps mu_xi", rep.zero_overlap > 1.0 - overlap_tol,
                           rep.zero_overlap, 1.0, overlap_tol));
  const double edge_gap = std::abs(rep.cluster_edge - rep.essential_edge) / rep.essential_edge;
  r.checks.push_back(check("cluster edge at (s - kappa)/kappa^2", edge_gap <= edge_tol,
                           rep.cluster_edge, rep.essential_edge, edge_tol * rep.essential_edge));
  r.checks.push_back(check("g0 < 0", id.g0 < 0.0, id.g0, 0.0));
  r.checks.push_back(check("g0 matches dQ(mu)/dc", id.mismatch < g0_tol, id.g0, id.dQdc,
                           g0_tol * std::abs(id.dQdc)));
  r.checks.push_back(check("constrained minimum alpha0 > 0", cm.alpha0 > 0.0, cm.alpha0, 0.0));
  r.checks.push_back(check("lambda0 < alpha0", cm.lambda0 < cm.alpha0, cm.lambda0, cm.alpha0));

  json j;
  j["params"] = params_json(p);
  j["grid"] = json{{"n", rep.n_points}, {"half_length", rep.half_length}, {"dxi", rep.dxi}};
  j["discretization"] = cfg.discretization;
  j["closure"] = periodic ? "periodic" : "dirichlet";
  j["multiplier"] = rep.multiplier;
  j["negative_count"] = rep.negative_count;
  j["lambda0"] = rep.lambda0;
  j["ground_sign_changes"] = rep.ground_sign_changes;
  j["zero_index"] = rep.zero_index;
  j["zero_value"] = rep.zero_value;
  j["zero_overlap"] = rep.zero_overlap;
  j["zero_sign_changes"] = rep.zero_sign_changes;
  j["essential_edge"] = rep.essential_edge;
  j["cluster_edge"] = rep.cluster_edge;
  j["positive_point_eigenvalues"] = rep.positive_point_eigenvalues;
  const std::size_t shown = std::min<std::size_t>(rep.eigenvalues.size(), 16);
  j["lowest_eigenvalues"] =
      std::vector<double>(rep.eigenvalues.begin(), rep.eigenvalues.begin() + static_cast<long>(shown));
  j["coercivity"] = json{{"g0", id.g0}, {"dQdc", id.dQdc}, {"mismatch", id.mismatch},
                         {"g0_profiles", id.g0_profiles}};
  j["constrained"] = json{{"alpha0", cm.alpha0}, {"translation_only", cm.translation_only},
                          {"lambda0", cm.lambda0}};
  emit_json(r, dir, "spectrum.json", j);
  return r;
}

Result cmd_evolve(const RunConfig& cfg, const fs::path& dir) {
  Result r;
  const auto& p = cfg.params;
  EvolutionConfig ec;
  ec.b = p.b;
  ec.c = p.c;
  ec.kappa = p.kappa;
  ec.n = cfg.n.value_or(4096);
  ec.domain_length = cfg.domain_length.value_or(80.0);
  ec.dt = cfg.dt.value_or(0.0025);
  ec.t_final = cfg.t_final.value_or(cfg.fast ? 1.0 : 5.0);
  ec.record_every = cfg.record_every;
  ec.snapshot_every = cfg.snapshot_every;
  validate(ec);

  const double drift_tol = tolerance(cfg, "drift", 1e-6);
  EvolutionTrace trace;
  json extra;
  if (cfg.eps > 0.0) {
    const double ratio_tol = tolerance(cfg, "orbital_ratio", 5.0);
    auto rep = stability_experiment(p, cfg.eps, ec, cfg.seed);
    if (!rep.trace.failed) {
      r.checks.push_back(check("orbital distance stays below ratio * eps", rep.max_distance < ratio_tol * cfg.eps,
                               rep.max_distance, ratio_tol * cfg.eps, 0.0));
    }
    extra["perturbation"] = json{{"eps", cfg.eps},
                                 {"seed", cfg.seed},
                                 {"generator", "mt19937_64"},
                                 {"bump_centre", rep.bump.centre},
                                 {"bump_width", rep.bump.width}};
    extra["orbital"] = json{{"initial_distance", rep.initial_distance},
                            {"max_distance", rep.max_distance},
                            {"ratio", rep.ratio},
                            {"settled_speed", rep.settled_speed},
                            {"settled_distance", rep.settled_distance}};
    trace = std::move(rep.trace);
  } else {
    const auto prof = embedded_profile(p, ec.n, ec.domain_length);
    trace = evolve(wave_field(prof), ec, &prof);
    if (!trace.failed) {
      const double mis = traveling_mismatch(trace.final_state, prof);
      const double mis_tol = tolerance(cfg, "mismatch", 1e-4);
      r.checks.push_back(check("traveling wave keeps its shape", mis < mis_tol, mis, 0.0, mis_tol));
      extra["traveling_mismatch"] = mis;
    }
  }
  if (trace.failed) {
    r.checks.push_back(check("run completes", false, trace.times.empty() ? 0.0 : trace.times.back(),
                             ec.t_final, 0.0, trace.failure));
  }
  for (std::size_t i = 0; i < 3; ++i) {
    r.checks.push_back(check(trace.names[i] + " drift", trace.max_drift[i] < drift_tol,
                             trace.max_drift[i], 0.0, drift_tol));
  }

  emit_csv(r, dir, "trace.csv", trace_table(trace));
  json snaps = json::array();
  for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
    const auto file = numbered("snapshot", i);
    emit_csv(r, dir, file, snapshot_table(trace.snapshots[i]));
    snaps.push_back(json{{"t", trace.snapshot_times[i]}, {"file", file}});
  }

  json c;
  c["b"] = ec.b;
  c["c"] = ec.c;
  c["kappa"] = ec.kappa;
  c["domain_length"] = ec.domain_length;
  c["n"] = ec.n;
  c["dt"] = ec.dt;
  c["t_final"] = ec.t_final;
  c["dealias"] = ec.dealias;
  c["record_every"] = ec.record_every;
  c["snapshot_every"] = ec.snapshot_every;
  c["dt_used"] = trace.dt;
  c["steps"] = trace.steps;
  c["invariants"] = trace.names;
  c["max_drift"] = trace.max_drift;
  c["snapshots"] = snaps;
  for (auto& [k, v] : extra.items()) c[k] = v;
  emit_json(r, dir, "config.json", c);
  return r;
}

Result cmd_verify_all(const RunConfig& cfg, std::ostream& log) {
  Result r;
  verify::SuiteOptions opt;
  opt.fast = cfg.fast;
  opt.jobs = cfg.jobs;
  opt.seed = cfg.seed;
  const std::vector<int> ids = cfg.criteria;
  for (int id = 1; id <= verify::criterion_count; ++id) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    auto res = verify::run_criterion(id, opt);
    log << verify::summary_line(res) << std::endl;
    for (const auto& c : res.checks) {
      auto copy = c;
      copy.invariant = "criterion " + std::to_string(id) + ": " + c.invariant;
      r.checks.push_back(std::move(copy));
    }
    r.criteria.push_back(std::move(res));
  }
  return r;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  validate(cfg);
  const fs::path dir = output_dir(cfg);
  fs::create_directories(dir);
  const auto t0 = std::chrono::steady_clock::now();

  Result r;
  const auto& s = cfg.subcommand;
  if (s == "profile") r = cmd_profile(cfg, dir);
  else if (s == "portrait") r = cmd_portrait(cfg, dir);
  else if (s == "criterion") r = cmd_criterion(cfg, dir);
  else if (s == "spectrum") r = cmd_spectrum(cfg, dir);
  else if (s == "evolve") r = cmd_evolve(cfg, dir);
  else if (s == "verify-all") r = cmd_verify_all(cfg, log);
  else throw ConfigError("unknown subcommand \"" + s + "\"");

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool passed =
      std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.passed; });

  json report;
  report["subcommand"] = s;
  report["passed"] = passed;
  report["exit_status"] = passed ? 0 : 1;
  report["seed"] = cfg.seed;
  report["generator"] = "mt19937_64";
  report["config"] = to_json(cfg);
  report["elapsed_seconds"] = elapsed;
  report["outputs"] = r.outputs;
  json checks = json::array();
  json failures = json::array();
  for (const auto& c : r.checks) {
    checks.push_back(check_json(c));
    if (!c.passed) failures.push_back(c.invariant);
  }
  report["checks"] = checks;
  report["failures"] = failures;
  if (!r.criteria.empty()) {
    json crit = json::array();
    for (const auto& c : r.criteria) {
      json cj;
      cj["id"] = c.id;
      cj["title"] = c.title;
      cj["passed"] = c.passed();
      cj["seconds"] = c.seconds;
      cj["budget_seconds"] = c.budget_seconds;
      json cc = json::array();
      for (const auto& ch : c.checks) cc.push_back(check_json(ch));
      cj["checks"] = cc;
      crit.push_back(cj);
    }
    report["criteria"] = crit;
  }
  write_json(dir / "report.json", report);

  for (const auto& c : r.checks) {
    if (c.passed) continue;
    err << "FAIL " << c.invariant << ": measured " << format_double(c.measured) << ", target "
        << format_double(c.target);
    if (c.tolerance > 0.0) err << " +/- " << format_double(c.tolerance);
    if (!c.detail.empty()) err << " (" << c.detail << ")";
    err << '\n';
  }
  log << s << ": " << (passed ? "all checks passed" : "some checks failed") << "; wrote "
      << (dir / "report.json").string() << std::endl;
  return passed ? 0 : 1;
}

}  // namespace bchlab::cli
