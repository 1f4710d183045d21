#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace irsguard {

struct SuiteResult {
  std::string name;
  int passed = 0;
  int total = 0;
  std::string worst;  // human-readable worst case

  bool ok() const { return passed == total; }
};

// Gradient, AO monotonicity, rank-one recovery and S-procedure property
// suites on small random instances.
std::vector<SuiteResult> run_selftest(std::uint64_t seed, int scale = 1);

void print_selftest(std::ostream& os, const std::vector<SuiteResult>& results);

}  // namespace irsguard
