#pragma once
// The acceptance checklist: one entry per shipped criterion, shared by the
// dedicated test binary and the CLI self test.

#include <string>
#include <vector>

namespace holant3 {

struct CheckResult {
  std::string id;      // "A1".."A10" or sub-check id like "A8-fixture2"
  bool pass = false;
  std::string detail;  // one-line summary, includes measured numbers
};

// Runs every acceptance check. fixture_dir points at tests/fixtures.
// filter, when non-empty, keeps only checks whose id contains it.
std::vector<CheckResult> run_acceptance(const std::string& fixture_dir,
                                        const std::string& filter = "");

// Small named self tests for the CLI (`selftest --filter json-roundtrip`).
std::vector<CheckResult> run_selftest(const std::string& filter = "");

}  // namespace holant3
