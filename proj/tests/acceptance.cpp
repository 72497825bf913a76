// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any failed.
// Optional arguments select criteria by number.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "bchlab/verify.hpp"

int main(int argc, char** argv) {
  using namespace bchlab::verify;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (int i = 1; i <= criterion_count; ++i) ids.push_back(i);
  }
  SuiteOptions opt;
  int failed = 0;
  for (int id : ids) {
    const auto r = run_criterion(id, opt);
    std::printf("%s\n", summary_line(r).c_str());
    std::fflush(stdout);
    if (!r.passed()) ++failed;
  }
  std::printf("%zu criteria, %d failed\n", ids.size(), failed);
  return failed ? 1 : 0;
}
