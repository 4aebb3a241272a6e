#pragma once

#include <string>
#include <vector>

namespace distlab {
namespace verify {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the full property suite on the bundled reference instances and
/// returns one result per check credit. `quick` shrinks the Monte Carlo
/// budgets for smoke use.
std::vector<CheckResult> run_all(bool quick = false);

}  // namespace verify
}  // namespace distlab
