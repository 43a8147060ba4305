#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pnsim/channel_estimation.hpp"
#include "pnsim/combining.hpp"
#include "pnsim/config.hpp"
#include "pnsim/network_model.hpp"
#include "pnsim/ofdm_signal.hpp"
#include "pnsim/phase_noise.hpp"
#include "pnsim/se_evaluator.hpp"

namespace pnsim {

/// Everything shared by all geometries of one pass (one PN setting, one UE count).
struct PassContext {
    ExperimentConfig cfg;
    bool phase_noise = true;
    PnParams pn;  // gammas zeroed when phase_noise is false
    std::vector<Estimator> estimators;
    PilotBook book;
    KernelParams kernel;
    CorrelationTable table;
    std::optional<IciCovariance> ici;  // only when the OFDM-aware estimator runs with PN

    int num_variants() const { return static_cast<int>(estimators.size() * cfg.schemes.size()); }
};

/// The PN-free pass runs one estimator: with B = 1 and Z = 0 all three coincide.
PassContext make_pass(const ExperimentConfig& cfg, bool phase_noise);

struct GeometryContext {
    int index = 0;
    NetworkRealization net;
    std::vector<EstimatorContext> estimators;  // parallel to PassContext::estimators
    VectorXd lambda_sum;                       // per AP: sum_i lambda_{i,l}
};

GeometryContext make_geometry(const PassContext& pass, int geometry);

/// Random draws of one trial, each from its own derived stream.
struct TrialDraws {
    ChannelRealization channel;
    PhaseNoiseTrace trace;
    TransmitGrid grid;
    PilotSynthesis synthesis;
    std::vector<MatrixXcd> h_eff;  // per symbol: K x L, J_0 h
};

TrialDraws draw_trial(const PassContext& pass, const GeometryContext& geom, int trial);

/// Per-trial SINR terms, indexed by term_index().
struct TrialOutcome {
    std::vector<TrialTerms> terms;
    int pseudo_inverse_fallbacks = 0;
};

inline std::size_t term_index(int variant, int tau, int k, int tau_c, int K) {
    return (static_cast<std::size_t>(variant) * tau_c + tau) * K + k;
}

/// Variant v pairs estimator v / |schemes| with scheme v % |schemes|.
TrialOutcome evaluate_trial(const PassContext& pass, const GeometryContext& geom, const TrialDraws& draws);

}  // namespace pnsim
