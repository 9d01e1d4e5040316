#pragma once
// Acceptance battery shared by `malvol selfcheck` and the acceptance test.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "malvol/pricing.hpp"

namespace malvol {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct BatteryOptions {
    std::uint64_t seed = 20240601;
    unsigned threads = 0;
    NormalCdf cdf = normal_cdf;  ///< swapped out by fault-injection tests
};

/// Black-Scholes call, s0 = K = 100, r = 0.05, T = 1, sigma = 0.2.
inline constexpr double kBlackScholesOracle = 10.450583572185565;

/// Criteria 1-13 followed by the Black-Scholes shape check (14).
std::vector<CheckResult> run_battery(const BatteryOptions& opts);

/// One "PASS|FAIL  id  name  detail" line per check.
void print_results(std::ostream& out, const std::vector<CheckResult>& results);

int cmd_selfcheck(const BatteryOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace malvol
