#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace conclab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the acceptance suite: fifteen criteria, each executed with 1 and 8
// workers from fixed seeds. Criterion 15 is the byte-equality of every
// report across the two worker counts. `quick` shrinks sample counts and
// grids for a fast smoke run; `inject_fault` corrupts one expected value so
// the failure path can be exercised.
std::vector<CriterionResult> run_acceptance(bool quick, std::ostream& log,
                                            bool inject_fault = false);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace conclab
