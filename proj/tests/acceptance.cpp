#include <cstdio>

#include "osb/suites.hpp"

int main() {
  const osb::SuiteOptions opt;
  const auto results = osb::run_suites("all", opt);
  int failed = 0;
  int criterion = 0;
  for (const auto& r : results) {
    ++criterion;
    std::printf("%s criterion %d: %s [%.2fs] %s\n", r.pass ? "PASS" : "FAIL", criterion, r.name.c_str(), r.seconds,
                r.detail.c_str());
    if (!r.pass) ++failed;
  }
  std::printf("seed %llu: %d/%d criteria passed\n", static_cast<unsigned long long>(opt.seed), criterion - failed,
              criterion);
  return failed == 0 ? 0 : 1;
}
