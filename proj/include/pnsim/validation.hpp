#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pnsim {

struct CheckResult {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct ValidationOptions {
    int num_subcarriers = 64;
    bool inject_stride_fault = false;  // the fast kernel runs with its symbol stride off by one
    std::uint64_t seed = 20240601;
    int monte_carlo_traces = 4000;
    int orthogonality_trials = 3000;
};

std::vector<CheckResult> run_validation(const ValidationOptions& opts);

/// One line per check; returns true when every check passed.
bool print_report(std::ostream& os, const std::vector<CheckResult>& checks);

}  // namespace pnsim
