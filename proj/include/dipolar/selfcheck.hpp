#pragma once

// Fast invariant suite: constants, special-function oracles, low-temperature
// expansion residuals and analytic limit anchors.

#include <ostream>
#include <string>
#include <vector>

#include "dipolar/constants.hpp"

namespace dipolar::cli {

struct CheckItem {
  std::string name;
  double value = 0.0;  // the measured residual, ≥ 0
  double limit = 0.0;  // pass when value ≤ limit (or ≥ for floors)
  bool floor = false;  // value must stay above the limit instead
  bool pass = false;
  // > 1 when passing; how far the value sits from its limit.
  double margin() const;
};

struct SelfcheckOptions {
  SpecialConstants constants = kSpecialConstants;  // the table under test
  double tolerance_scale = 1.0;                    // < 1 tightens every limit
};

struct SelfcheckReport {
  std::vector<CheckItem> items;
  double tolerance_scale = 1.0;
  bool all_pass() const;
};

SelfcheckReport selfcheck(const SelfcheckOptions& opt = {});
void print_report(std::ostream& out, const SelfcheckReport& r);

}  // namespace dipolar::cli
