#pragma once

#include "qcs/quat.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qcs {

using QuaternionMul = Quaternion (*)(const Quaternion&, const Quaternion&);

struct SelftestOptions {
    /// Product used by the algebra check; tests swap in a faulty one.
    QuaternionMul mul = nullptr;
    std::uint64_t seed = 20160521;
};

struct SelftestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Names of the checks in execution order.
std::vector<std::string> selftest_check_names();

std::vector<SelftestCheck> run_selftest_checks(const SelftestOptions& options = {});

/// Prints one PASS/FAIL line per check to `log`. Returns 0 when every check
/// passes, otherwise 2 after naming the first failing check.
int run_selftest(std::ostream& log, const SelftestOptions& options = {});

} // namespace qcs
