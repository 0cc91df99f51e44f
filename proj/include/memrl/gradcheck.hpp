#pragma once

#include "memrl/policy.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace memrl {

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0; // worst observed error statistic
    double tolerance = 0.0;
};

/// Central-difference relative error ||a - b|| / max(||a||, ||b||, floor).
double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-8);

/**
 * Finite-difference and enumeration checks on the small built-in tasks
 * plus the score-gradient check on `arch` (the configured policy).
 */
std::vector<CheckResult> run_gradcheck_suite(const PolicyArch& arch, std::uint64_t seed,
                                             int points = 50);

} // namespace memrl
