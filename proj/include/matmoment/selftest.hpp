#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace matmoment::selftest {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct SuiteOptions {
  double fraction = 1.0;  // share of the full instance counts to run
  std::uint64_t seed = 20240611;
};

CheckResult hankel_identity(int cases, std::uint64_t seed);
CheckResult positivity_equivalence(int sequences, int probes, std::uint64_t seed);
CheckResult flat_round_trip(int cases, std::uint64_t seed);
CheckResult richter_reduction(int cases, std::uint64_t seed);
CheckResult example_e1012();
CheckResult example_e1802(int grid);
CheckResult ordered_maximal(int random_problems, int probes, std::uint64_t seed);
CheckResult commutative_loop(int cases, std::uint64_t seed);
CheckResult transport_identities(int cases, std::uint64_t seed);
CheckResult apolar_duality(int pairs, int cones, std::uint64_t seed);
CheckResult laplacian_example(int polys, std::uint64_t seed);

// Criteria 1-11 in order.
std::vector<CheckResult> run_suite(const SuiteOptions& opts = {});

}  // namespace matmoment::selftest
