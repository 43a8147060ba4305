#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pnsim/config.hpp"

namespace pnsim {

/// One CSV row. channel_use = 0 and tau = 0 mark the per-block SE.
struct ResultRecord {
    std::string experiment;
    std::string scheme;
    std::string estimator;
    bool phase_noise = true;
    int num_ues = 0;
    int num_aps = 0;
    int channel_use = 0;
    int tau = 0;  // one-based
    double se_per_ue = 0.0;
    int n_geometries = 0;
    int n_trials = 0;
    double standard_error = 0.0;
    long long invalid = 0;
    std::uint64_t master_seed = 0;
};

struct ExperimentResult {
    std::vector<ResultRecord> records;
    long long sinr_evaluations = 0;
    long long invalid_sinr = 0;
    long long pseudo_inverse_fallbacks = 0;

    double invalid_fraction() const {
        return sinr_evaluations > 0 ? static_cast<double>(invalid_sinr) / sinr_evaluations : 0.0;
    }
};

struct RunOptions {
    int threads = 1;
    std::ostream* progress = nullptr;
};

/// Runs every pass (PN setting x UE count) of the configuration.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

void write_csv(std::ostream& os, const std::vector<ResultRecord>& records);

/// Parses a CSV written by write_csv.
std::vector<ResultRecord> read_csv(std::istream& is);

}  // namespace pnsim
