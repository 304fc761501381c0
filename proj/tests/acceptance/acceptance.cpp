#include <cstdio>
#include <cstdlib>
#include <string>

#include "matmoment/selftest.hpp"

int main(int argc, char** argv) {
  matmoment::selftest::SuiteOptions opts;
  if (argc > 1) opts.fraction = std::stod(argv[1]);
  if (const char* env = std::getenv("MATMOMENT_SEED")) opts.seed = std::stoull(env);
  int failed = 0;
  for (const auto& r : matmoment::selftest::run_suite(opts)) {
    std::printf("%s [%d] %s: %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%d of 11 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
