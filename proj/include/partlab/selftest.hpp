#pragma once

#include <string>
#include <vector>

namespace partlab {

// One acceptance criterion: id "1".."8", a behavior-naming label, the
// verdict, wall time, and a detail block (sub-check outcomes; failure
// evidence). Criteria 4 and 5 pin a frozen reference coefficient set for
// the cap-24 none/none derivation that the sound derivation provably
// cannot reproduce (the reference set itself is numerically false at
// n = 22); those two criteria therefore fail on a healthy build, and their
// detail text says so. Everything else passes on a healthy build.
struct CheckResult {
  std::string id;
  std::string label;
  bool pass = false;
  long millis = 0;
  std::string detail;  // possibly multi-line, '\n'-separated
};

struct SelftestOptions {
  // Corrupts the generator rule to lambda = 2*tau - head + 1, proving the
  // suite catches a broken rule (criteria 1-3 go red).
  bool mutate_generator = false;
};

// Runs all eight acceptance criteria and returns one result per criterion,
// in order. Deterministic apart from the timing field.
std::vector<CheckResult> run_acceptance_checks(const SelftestOptions& options = {});

}  // namespace partlab
