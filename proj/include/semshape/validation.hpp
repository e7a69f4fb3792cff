#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace semshape {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// The release gate: every numbered check pins a computed quantity against an
// independent oracle (closed form, difference quotient, or scaling law) with
// a fixed tolerance.  Deterministic for a fixed seed.  `log` receives one
// line per check as it finishes.
std::vector<CheckResult> run_validation_suite(std::ostream& log,
                                              std::uint64_t seed = 12345);

bool all_passed(const std::vector<CheckResult>& results);

}
