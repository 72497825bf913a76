#include <doctest.h>

#include <cstdlib>

#include "config.hpp"

using namespace bchlab::cli;

TEST_CASE("JSON keys set the matching fields") {
  RunConfig cfg;
  apply_json(cfg, nlohmann::json::parse(R"({"b": 1.4, "c": 3, "kappa": 0.5, "n": 2048,
      "dt": 0.001, "seed": 99, "fast": true, "energies": [0.1, 0.2],
      "tolerances": {"drift": 1e-7}})"));
  CHECK(cfg.params.b == 1.4);
  CHECK(cfg.params.c == 3.0);
  CHECK(cfg.n == std::size_t{2048});
  CHECK(cfg.dt == 0.001);
  CHECK(cfg.seed == 99u);
  CHECK(cfg.fast);
  CHECK(cfg.energies.size() == 2);
  CHECK(tolerance(cfg, "drift", 1e-6) == 1e-7);
  CHECK(tolerance(cfg, "mismatch", 1e-4) == 1e-4);
}

TEST_CASE("bad JSON is a configuration error") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_json(cfg, nlohmann::json::parse(R"({"speed": 2})")), ConfigError);
  CHECK_THROWS_AS(apply_json(cfg, nlohmann::json::parse(R"({"c": "two"})")), ConfigError);
  CHECK_THROWS_AS(apply_json(cfg, nlohmann::json::parse(R"({"n": -4})")), ConfigError);
  CHECK_THROWS_AS(apply_json(cfg, nlohmann::json::parse("[1, 2]")), ConfigError);
  CHECK_THROWS_AS(apply_json_file(cfg, "/nonexistent/config.json"), ConfigError);
}

TEST_CASE("validation names the problem") {
  RunConfig cfg;
  cfg.subcommand = "profile";
  CHECK_NOTHROW(validate(cfg));

  auto fails_with = [](RunConfig c, const char* needle) {
    try {
      validate(c);
    } catch (const ConfigError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  RunConfig k = cfg;
  k.params.kappa = 1.5;
  CHECK(fails_with(k, "kappa < c/(b+1)"));
  RunConfig s = cfg;
  s.subcommand = "spectrum";
  s.params.b = 0.7;
  s.params.kappa = 0.5;
  CHECK(fails_with(s, "b = 1"));
  RunConfig e = cfg;
  e.subcommand = "evolve";
  e.n = 1000;
  CHECK(fails_with(e, "power of two"));
  RunConfig d = cfg;
  d.discretization = "fd3";
  CHECK(fails_with(d, "discretization"));
  RunConfig cl = cfg;
  cl.closure = "dirichlet";
  CHECK(fails_with(cl, "periodic closure"));
  RunConfig ep = cfg;
  ep.eps = 0.5;
  CHECK(fails_with(ep, "eps"));
  RunConfig cr = cfg;
  cr.criteria = {0};
  CHECK(fails_with(cr, "criteria"));
}

TEST_CASE("output directory precedence") {
  RunConfig cfg;
  ::unsetenv("BCHLAB_OUT");
  CHECK(output_dir(cfg) == "bchlab_out");
  ::setenv("BCHLAB_OUT", "/tmp/from_env", 1);
  CHECK(output_dir(cfg) == "/tmp/from_env");
  cfg.out = "explicit";
  CHECK(output_dir(cfg) == "explicit");
  ::unsetenv("BCHLAB_OUT");
}

TEST_CASE("config serialises every field") {
  RunConfig cfg;
  cfg.subcommand = "evolve";
  cfg.n = 256;
  const auto j = to_json(cfg);
  for (const char* key : {"subcommand", "b", "c", "kappa", "n", "domain_length", "dt", "t_final", "out",
                          "jobs", "seed", "fast", "eps", "tolerances"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["n"] == 256);
  CHECK(j["dt"].is_null());
}
