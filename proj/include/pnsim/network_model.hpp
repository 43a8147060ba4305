#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pnsim/layout.hpp"
#include "pnsim/rng.hpp"
#include "pnsim/types.hpp"

namespace pnsim {

/// Path loss, shadowing and power budget.
struct Propagation {
    double pathloss_intercept_db = -30.5;
    double pathloss_slope_db = 36.7;    // dB per decade of distance
    double shadow_sigma_db = 4.0;
    double min_distance = 1.0;          // m
    bool wraparound = true;
    double ue_power = 0.1;              // W
    double noise_figure_db = 7.0;

    /// Thermal noise over the whole signal bandwidth, in W.
    double noise_power(double bandwidth_hz) const;
};

struct NodePositions {
    Eigen::Matrix2Xd ap;  // one column per AP, metres
    Eigen::Matrix2Xd ue;  // one column per UE
};

enum class PilotPolicy { round_robin, greedy };

/// Small-scale fading, one K x L matrix per coherence block (block 0 is the one evaluated).
struct ChannelRealization {
    std::vector<MatrixXcd> blocks;
    const MatrixXcd& own_block() const { return blocks.front(); }
};

/// Q-tap time-domain channel, taps[q](k, l). Only the time-domain oracle uses it.
struct FirChannel {
    std::vector<MatrixXcd> taps;
};

struct NetworkRealization {
    NodePositions positions;
    MatrixXd beta;               // K x L, linear power gain
    DccMatrix serve;             // K x L, d_{k,l}
    std::vector<int> pilot;      // zero-based pilot index per UE
    VectorXd power;              // W per UE
    double noise_power = 0.0;    // W

    int num_ues() const { return static_cast<int>(beta.rows()); }
    int num_aps() const { return static_cast<int>(beta.cols()); }
};

NodePositions place_nodes(const SimulationLayout& layout, std::uint64_t seed);

/// Minimum-image 2-D distance on the torus of side `side` when wraparound is set.
double link_distance(const Eigen::Vector2d& ue, const Eigen::Vector2d& ap, double side, bool wraparound);

/// beta_{k,l} = 10^((A - B log10(max(d, d_min)) + F) / 10), F ~ N(0, shadow_sigma_db^2).
MatrixXd large_scale_fading(const NodePositions& pos, double side, const Propagation& prop,
                            std::uint64_t seed);

/// Zero-based pilot per UE. Round-robin: t_k = k mod tau_p. Greedy: UEs in descending
/// max_l beta order pick the pilot with least accumulated beta at their strongest AP.
std::vector<int> assign_pilots(const MatrixXd& beta, int tau_p, PilotPolicy policy = PilotPolicy::round_robin);

/// Dynamic cooperation clusters. AP l serves, per pilot, the UE with the largest beta_{.,l}
/// among the UEs using that pilot; afterwards each UE's strongest AP is forced to serve it.
///
/// The forcing step can put two UEs of one pilot on the same AP when two co-pilot UEs share
/// their strongest AP; every UE is guaranteed at least one serving AP.
DccMatrix form_dcc(const MatrixXd& beta, const std::vector<int>& pilot);

/// Independent CN(0, beta) draws per (k, l, block).
ChannelRealization gen_channel(const MatrixXd& beta, int num_blocks, Rng& rng);

/// Exponential power-delay profile normalized so that sum_q E|h_q|^2 = beta.
FirChannel gen_fir_channel(const MatrixXd& beta, int num_taps, Rng& rng);

/// Positions, fading, pilots and clusters for one geometry. Every stage draws from its own
/// stream derived from `seed`.
NetworkRealization make_network(const SimulationLayout& layout, const Propagation& prop, PilotPolicy policy,
                                std::uint64_t seed);

/// CSV with columns node_type,index,x_m,y_m.
void write_geometry_csv(std::ostream& os, const NodePositions& pos);

}  // namespace pnsim
