// Acceptance gate: runs every criterion, prints one verdict line each with
// failure evidence indented beneath, and exits nonzero if any criterion
// fails. Criteria 4 and 5 pin a reference coefficient set that is itself
// numerically false at n = 22, so a healthy build reports exactly those two
// as FAIL; see the README's "Known expected failures".
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "partlab/selftest.hpp"

int main() {
  const std::vector<partlab::CheckResult> results =
      partlab::run_acceptance_checks();

  long failed = 0;
  for (const auto& result : results) {
    std::cout << (result.pass ? "PASS" : "FAIL") << " " << result.id << " - "
              << result.label << " (" << result.millis << " ms)\n";
    if (!result.pass) {
      ++failed;
      std::istringstream lines(result.detail);
      std::string line;
      while (std::getline(lines, line)) {
        std::cout << "    " << line << "\n";
      }
    }
  }

  if (failed == 0) {
    std::cout << "all " << results.size() << " criteria pass\n";
  } else {
    std::cout << results.size() - failed << " of " << results.size()
              << " criteria pass, " << failed << " fail\n";
  }
  return failed == 0 ? 0 : 1;
}
