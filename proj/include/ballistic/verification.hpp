#pragma once

#include <string>
#include <vector>

namespace ballistic {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    bool informational = false; // reported measurement, no pass/fail semantics
    double measured = 0;
    double threshold = 0;
    std::string detail;
};

/// Runs one module's Invariants & Properties at desk-scale sizes.
/// suite in {operators, propagation, spectral, transport, all}; throws
/// std::invalid_argument on an unknown suite.
std::vector<CheckResult> run_verify_suite(const std::string& suite);

/// One line per invariant: PASS/FAIL, measured margin, threshold.
std::string format_check_line(const CheckResult& r);

} // namespace ballistic
