#pragma once

#include <vector>

#include "pnsim/types.hpp"

namespace pnsim {

/// One pilot sample inside a coherence block.
struct PilotPosition {
    int subcarrier;  ///< offset inside the block, in [0, N_c)
    int symbol;      ///< zero-based OFDM symbol, in [0, tau_c)
};

/// Time-frequency numerology, pilot placement and network size.
///
/// Pilot symbols are stored with the one-based numbering used in configuration files
/// (1..tau_c); every computational accessor below hands out zero-based symbols.
/// The pilot samples form the grid pilot_subcarriers x pilot_symbols, ordered
/// symbol-major, and there must be exactly tau_p of them.
struct SimulationLayout {
    int num_subcarriers = 1200;         // N
    int cp_length = 84;                 // N_cp
    double subcarrier_spacing = 15e3;   // Hz
    int block_subcarriers = 12;         // N_c
    int block_symbols = 15;             // tau_c
    int pilot_length = 12;              // tau_p
    std::vector<int> pilot_subcarriers{0};
    std::vector<int> pilot_symbols{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    int num_aps = 200;                  // L
    int num_ues = 10;                   // K
    double area_side = 1000.0;          // m

    int num_blocks() const { return (num_subcarriers + block_subcarriers - 1) / block_subcarriers; }
    double bandwidth() const { return num_subcarriers * subcarrier_spacing; }
    double sample_time() const { return 1.0 / bandwidth(); }
    int channel_uses_per_block() const { return block_subcarriers * block_symbols; }

    /// Pilot samples in stacking order (the order of y_l).
    std::vector<PilotPosition> pilot_positions() const;

    /// Absolute subcarriers in [0, N) that carry pilots, over all blocks.
    std::vector<int> pilot_subcarriers_all_blocks() const;

    /// True when zero-based symbol tau carries pilots.
    bool is_pilot_symbol(int tau) const;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// OFDM symbol (zero-based) that a one-based channel use of the block falls in.
inline int symbol_of_channel_use(int channel_use, int block_subcarriers) {
    return (channel_use + block_subcarriers - 1) / block_subcarriers - 1;
}

}  // namespace pnsim
