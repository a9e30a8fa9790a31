#pragma once

#include <string>
#include <vector>

namespace gapboot {

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Algebraic identities the estimators must satisfy on fixed inputs.  Every
/// check runs even if an earlier one fails; exceptions count as failures.
std::vector<CheckOutcome> run_self_checks();

}  // namespace gapboot
