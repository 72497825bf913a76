#include "config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

namespace bchlab::cli {

namespace {

template <class T>
T get(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key \"" + key + "\": " + e.what());
  }
}

double number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key \"" + key + "\" must be a number");
  return v.get<double>();
}

std::size_t count(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("config key \"" + key + "\" must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

void one_of(const std::string& value, const std::set<std::string>& allowed, const char* what) {
  if (allowed.count(value)) return;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  throw ConfigError(std::string(what) + " \"" + value + "\" is not one of: " + list);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "b") cfg.params.b = number(v, key);
    else if (key == "c") cfg.params.c = number(v, key);
    else if (key == "kappa") cfg.params.kappa = number(v, key);
    else if (key == "n") cfg.n = count(v, key);
    else if (key == "domain_length") cfg.domain_length = number(v, key);
    else if (key == "dt") cfg.dt = number(v, key);
    else if (key == "t_final") cfg.t_final = number(v, key);
    else if (key == "out") cfg.out = get<std::string>(v, key);
    else if (key == "jobs") cfg.jobs = static_cast<unsigned>(count(v, key));
    else if (key == "seed") cfg.seed = get<std::uint64_t>(v, key);
    else if (key == "fast") cfg.fast = get<bool>(v, key);
    else if (key == "sweep") cfg.sweep = get<bool>(v, key);
    else if (key == "sweep_points") cfg.sweep_points = count(v, key);
    else if (key == "energies") cfg.energies = get<std::vector<double>>(v, key);
    else if (key == "multiplier") cfg.multiplier = get<std::string>(v, key);
    else if (key == "discretization") cfg.discretization = get<std::string>(v, key);
    else if (key == "closure") cfg.closure = get<std::string>(v, key);
    else if (key == "eps") cfg.eps = number(v, key);
    else if (key == "record_every") cfg.record_every = number(v, key);
    else if (key == "snapshot_every") cfg.snapshot_every = number(v, key);
    else if (key == "criteria") cfg.criteria = get<std::vector<int>>(v, key);
    else if (key == "tolerances") {
      if (!v.is_object()) throw ConfigError("config key \"tolerances\" must be an object");
      for (const auto& [name, t] : v.items()) cfg.tolerances[name] = number(t, "tolerances." + name);
    } else {
      throw ConfigError("unknown config key \"" + key + "\"");
    }
  }
}

void apply_json_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  apply_json(cfg, j);
}

void validate(const RunConfig& cfg) {
  if (auto why = admissibility_violation(cfg.params)) {
    throw ConfigError("inadmissible wave parameters " + describe(cfg.params) + ": " + *why);
  }
  const auto& s = cfg.subcommand;
  if ((s == "criterion" || s == "spectrum") && cfg.params.b != 1.0) {
    throw ConfigError(s + " is only defined for b = 1");
  }
  if (cfg.n && *cfg.n < 16) throw ConfigError("n must be at least 16");
  if (s == "spectrum" && cfg.n && *cfg.n < 256) throw ConfigError("spectrum needs n >= 256");
  if (s == "evolve" && cfg.n && !is_power_of_two(*cfg.n)) {
    throw ConfigError("evolve needs n to be a power of two");
  }
  if (cfg.domain_length && !(*cfg.domain_length > 0.0 && std::isfinite(*cfg.domain_length))) {
    throw ConfigError("domain_length must be positive");
  }
  if (cfg.dt && !(*cfg.dt >= 0.0 && std::isfinite(*cfg.dt))) {
    throw ConfigError("dt must be >= 0 (0 picks the step automatically)");
  }
  if (cfg.t_final && !(*cfg.t_final > 0.0 && std::isfinite(*cfg.t_final))) {
    throw ConfigError("t_final must be positive");
  }
  if (cfg.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (cfg.sweep_points < 1) throw ConfigError("sweep_points must be at least 1");
  if (!(cfg.eps >= 0.0 && cfg.eps <= 0.1)) throw ConfigError("eps must lie in [0, 0.1]");
  if (!(cfg.record_every > 0.0)) throw ConfigError("record_every must be positive");
  if (!(cfg.snapshot_every >= 0.0)) throw ConfigError("snapshot_every must be >= 0");
  one_of(cfg.multiplier, {"relative", "wave"}, "multiplier");
  one_of(cfg.discretization, {"fd2", "fd4", "spectral"}, "discretization");
  one_of(cfg.closure, {"auto", "dirichlet", "periodic"}, "closure");
  if (cfg.discretization == "spectral" && cfg.closure == "dirichlet") {
    throw ConfigError("the spectral discretization needs the periodic closure");
  }
  for (int id : cfg.criteria) {
    if (id < 1 || id > 9) throw ConfigError("criteria are numbered 1 to 9");
  }
  for (const auto& [name, t] : cfg.tolerances) {
    if (!(t > 0.0)) throw ConfigError("tolerance \"" + name + "\" must be positive");
  }
}

std::filesystem::path output_dir(const RunConfig& cfg) {
  if (cfg.out) return *cfg.out;
  if (const char* env = std::getenv("BCHLAB_OUT"); env && *env) return env;
  return "bchlab_out";
}

double tolerance(const RunConfig& cfg, const std::string& name, double fallback) {
  auto it = cfg.tolerances.find(name);
  return it == cfg.tolerances.end() ? fallback : it->second;
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["subcommand"] = cfg.subcommand;
  j["b"] = cfg.params.b;
  j["c"] = cfg.params.c;
  j["kappa"] = cfg.params.kappa;
  auto opt = [&](const char* k, const auto& v) {
    if (v) j[k] = *v;
    else j[k] = nullptr;
  };
  opt("n", cfg.n);
  opt("domain_length", cfg.domain_length);
  opt("dt", cfg.dt);
  opt("t_final", cfg.t_final);
  j["out"] = output_dir(cfg).string();
  j["jobs"] = cfg.jobs;
  j["seed"] = cfg.seed;
  j["fast"] = cfg.fast;
  j["sweep"] = cfg.sweep;
  j["sweep_points"] = cfg.sweep_points;
  j["energies"] = cfg.energies;
  j["multiplier"] = cfg.multiplier;
  j["discretization"] = cfg.discretization;
  j["closure"] = cfg.closure;
  j["eps"] = cfg.eps;
  j["record_every"] = cfg.record_every;
  j["snapshot_every"] = cfg.snapshot_every;
  j["criteria"] = cfg.criteria;
  j["tolerances"] = cfg.tolerances;
  return j;
}

}  // namespace bchlab::cli
