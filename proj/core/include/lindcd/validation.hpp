#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lindcd::harness {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // measured values, one line
};

struct ValidationReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool passed() const;
};

// Runs the full invariant suite: operator-basis algebra, generator
// structure, bath thermodynamics, gauge identities, solver properties and
// harness round-trips. Prints one [PASS]/[FAIL] line per check to `progress`
// when given. Deterministic for a fixed seed.
ValidationReport cmd_validate(std::uint64_t seed = 0,
                              std::ostream* progress = nullptr);

std::string validation_report_to_json(const ValidationReport& report);

}  // namespace lindcd::harness
