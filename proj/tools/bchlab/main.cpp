#include <iostream>

#include <CLI11.hpp>

#include "bchlab/params.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

// Assigns a flag's value only when it was given on the command line, so
// that flags override the config file and untouched flags do not.
template <class T, class U>
void take(const CLI::Option* opt, const T& value, U& target) {
  if (opt->count() > 0) target = value;
}

}  // namespace

int main(int argc, char** argv) {
  using bchlab::cli::ConfigError;
  using bchlab::cli::RunConfig;

  CLI::App app{"bchlab: solitary waves of the b-family on a constant background"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  double b = 0, c = 0, kappa = 0, domain_length = 0, dt = 0, t_final = 0, eps = 0;
  double record_every = 0, snapshot_every = 0;
  std::size_t n = 0, sweep_points = 0;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  std::string out, multiplier, discretization, closure;
  std::vector<double> energies;
  std::vector<int> criteria;
  std::map<std::string, double> tols;

  app.add_option("--config", config_path, "JSON config; command-line flags win")->check(CLI::ExistingFile);
  auto* o_b = app.add_option("--b", b, "b-family parameter (default 1)");
  auto* o_c = app.add_option("--c", c, "wave speed (default 2)");
  auto* o_kappa = app.add_option("--kappa", kappa, "background (default 0.4)");
  auto* o_n = app.add_option("--n", n, "grid points");
  auto* o_len = app.add_option("--domain-length", domain_length, "length of the grid");
  auto* o_dt = app.add_option("--dt", dt, "time step (0 picks one from the CFL bound)");
  auto* o_tf = app.add_option("--t-final", t_final, "evolution horizon");
  auto* o_out = app.add_option("--out", out, "output directory (default $BCHLAB_OUT or ./bchlab_out)");
  auto* o_jobs = app.add_option("--jobs", jobs, "worker threads for sweeps");
  auto* o_seed = app.add_option("--seed", seed, "seed of the perturbation generator");
  auto* o_fast = app.add_flag("--fast", "smaller default grids and shorter horizons");
  app.add_option("--tol", tols, "tolerance override NAME=VALUE (repeatable)");

  auto* profile = app.add_subcommand("profile", "solitary-wave profile and functionals");
  auto* portrait = app.add_subcommand("portrait", "phase-portrait orbits");
  auto* o_energies = portrait->add_option("--energies", energies, "energy levels of the orbits")->delimiter(',');
  auto* criterion = app.add_subcommand("criterion", "monotonicity of the charge along the family");
  auto* o_sweep = criterion->add_flag("--sweep", "tabulate Qcal and Qcal' on an h grid");
  auto* o_points = criterion->add_option("--sweep-points", sweep_points, "h values in the sweep");
  auto* spectrum = app.add_subcommand("spectrum", "spectrum of the linearised operator");
  auto* o_mult = spectrum->add_option("--multiplier", multiplier, "relative | wave");
  auto* o_disc = spectrum->add_option("--discretization", discretization, "fd2 | fd4 | spectral");
  auto* o_clos = spectrum->add_option("--closure", closure, "auto | dirichlet | periodic (auto: periodic for spectral, else dirichlet)");
  auto* evolve = app.add_subcommand("evolve", "pseudo-spectral evolution of the wave");
  auto* o_eps = evolve->add_option("--eps", eps, "H1 size of a random bump added to the wave");
  auto* o_rec = evolve->add_option("--record-every", record_every, "invariant sampling interval");
  auto* o_snap = evolve->add_option("--snapshot-every", snapshot_every, "snapshot interval (0: first and last)");
  auto* verify = app.add_subcommand("verify-all", "run the acceptance suite");
  auto* o_crit = verify->add_option("--criteria", criteria, "subset of criteria 1..9")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) bchlab::cli::apply_json_file(cfg, config_path);
    for (auto* sub : {profile, portrait, criterion, spectrum, evolve, verify}) {
      if (sub->parsed()) cfg.subcommand = sub->get_name();
    }
    take(o_b, b, cfg.params.b);
    take(o_c, c, cfg.params.c);
    take(o_kappa, kappa, cfg.params.kappa);
    take(o_n, n, cfg.n);
    take(o_len, domain_length, cfg.domain_length);
    take(o_dt, dt, cfg.dt);
    take(o_tf, t_final, cfg.t_final);
    if (o_out->count() > 0) cfg.out = out;
    take(o_jobs, jobs, cfg.jobs);
    take(o_seed, seed, cfg.seed);
    if (o_fast->count() > 0) cfg.fast = true;
    for (const auto& [k, v] : tols) cfg.tolerances[k] = v;
    take(o_energies, energies, cfg.energies);
    if (o_sweep->count() > 0) cfg.sweep = true;
    take(o_points, sweep_points, cfg.sweep_points);
    take(o_mult, multiplier, cfg.multiplier);
    take(o_disc, discretization, cfg.discretization);
    take(o_clos, closure, cfg.closure);
    take(o_eps, eps, cfg.eps);
    take(o_rec, record_every, cfg.record_every);
    take(o_snap, snapshot_every, cfg.snapshot_every);
    take(o_crit, criteria, cfg.criteria);

    return bchlab::cli::run(cfg, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const bchlab::DomainError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
