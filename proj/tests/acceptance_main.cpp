// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "semitoric/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int i = 1; i <= 9; ++i) ids.push_back(i);
  int failed = 0;
  for (int id : ids) {
    const auto r = semitoric::run_criterion(id);
    std::printf("%s\n", semitoric::format_line(r).c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
