#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pnsim/channel_estimation.hpp"
#include "pnsim/combining.hpp"
#include "pnsim/layout.hpp"
#include "pnsim/network_model.hpp"
#include "pnsim/ofdm_signal.hpp"
#include "pnsim/phase_noise.hpp"

namespace pnsim {

struct ExperimentConfig {
    std::string experiment = "custom";
    SimulationLayout layout;
    PnParams pn;
    Propagation prop;
    PilotPolicy pilot_policy = PilotPolicy::round_robin;
    std::vector<Estimator> estimators{Estimator::pna_ofdm, Estimator::pna_sc, Estimator::unaware};
    std::vector<Scheme> schemes{Scheme::mmse, Scheme::mr};
    IciModel ici_model = IciModel::as_printed;
    IciSynthesis ici_synthesis = IciSynthesis::exact;
    StrideMode stride = StrideMode::fft_length;
    DataSymbols data_symbols = DataSymbols::gaussian;
    std::vector<bool> phase_noise{true};  // one pass per entry; `false` is the PN-free reference
    std::vector<int> channel_uses;        // one-based; empty means every channel use of the block
    std::vector<int> ue_counts;           // K sweep; empty means layout.num_ues only
    int n_geometries = 50;
    int n_trials = 200;
    int min_trials = 2;
    double max_invalid_fraction = 0.01;
    std::uint64_t master_seed = 1;
    std::string output;

    /// Throws ConfigError on any violated constraint.
    void validate() const;
};

/// Parses `key = value` lines. Unknown keys and malformed values throw ConfigError with the
/// line number. Keys not mentioned keep their defaults.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path);

/// Applies one `key=value` override (command-line form, no line number).
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

/// Every effective value, including the derived bandwidth, sample time, PN and noise variances.
void echo_config(std::ostream& os, const ExperimentConfig& cfg);

/// Full-scale parameter sets of the two reference figures.
ExperimentConfig preset_fig2();
ExperimentConfig preset_fig3();

/// Reduced dimensions used by the desk-scale checks: L=30, K=5, N=120, N_c=12, tau_c=5, tau_p=4.
ExperimentConfig preset_ci();

std::string to_string(Estimator e);
std::string to_string(IciModel m);

}  // namespace pnsim
