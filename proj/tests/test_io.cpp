#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "bchlab/io.hpp"

using namespace bchlab;

TEST_CASE("17 significant digits round-trip every double") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  int tested = 0;
  while (tested < 2000) {
    const std::uint64_t u = bits(rng);
    double v;
    std::memcpy(&v, &u, sizeof v);
    if (!std::isfinite(v)) continue;
    ++tested;
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("tables: headers, shape checks and identical text for identical input") {
  const auto prof = build_profile(WaveParams{1.0, 2.0, 0.4}, ProfileOptions{512, 1e-10, {}});
  const auto a = profile_table(prof).str();
  const auto b = profile_table(build_profile(WaveParams{1.0, 2.0, 0.4}, ProfileOptions{512, 1e-10, {}})).str();
  CHECK(a == b);
  CHECK(a.rfind("xi,phi,phi_xi,mu,mu_xi,mu_xixi\n", 0) == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 513);

  CsvTable t;
  t.add("x", {1.0, 2.0});
  t.add("y", {1.0});
  CHECK_THROWS(t.str());
}

TEST_CASE("write_csv creates directories and writes the exact text") {
  const auto dir = std::filesystem::temp_directory_path() / "bchlab_test_io" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  CsvTable t;
  t.add("h", {0.5});
  t.add("Qcal", {1.0 / 3.0});
  write_csv(dir / "t.csv", t);
  std::ifstream is(dir / "t.csv", std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  CHECK(ss.str() == "h,Qcal\n0.5,0.33333333333333331\n");
  std::filesystem::remove_all(dir.parent_path());
}
