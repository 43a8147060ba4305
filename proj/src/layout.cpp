#include "pnsim/layout.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace pnsim {

std::vector<PilotPosition> SimulationLayout::pilot_positions() const {
    std::vector<PilotPosition> out;
    out.reserve(pilot_symbols.size() * pilot_subcarriers.size());
    for (int sym : pilot_symbols)
        for (int sc : pilot_subcarriers) out.push_back({sc, sym - 1});
    return out;
}

std::vector<int> SimulationLayout::pilot_subcarriers_all_blocks() const {
    std::vector<int> out;
    for (int r = 0; r < num_blocks(); ++r)
        for (int sc : pilot_subcarriers) {
            const int j = r * block_subcarriers + sc;
            if (j < num_subcarriers) out.push_back(j);
        }
    std::sort(out.begin(), out.end());
    return out;
}

bool SimulationLayout::is_pilot_symbol(int tau) const {
    return std::find(pilot_symbols.begin(), pilot_symbols.end(), tau + 1) != pilot_symbols.end();
}

void SimulationLayout::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(num_subcarriers >= 2 && num_subcarriers % 2 == 0, "N must be an even number >= 2");
    require(cp_length >= 0, "N_cp must be >= 0");
    require(subcarrier_spacing > 0, "delta_f must be > 0");
    require(block_subcarriers >= 1 && block_subcarriers <= num_subcarriers, "N_c must lie in [1, N]");
    require(block_symbols >= 1, "tau_c must be >= 1");
    require(pilot_length >= 1, "tau_p must be >= 1");
    require(pilot_length <= block_subcarriers * block_symbols,
            "tau_p must not exceed N_c * tau_c (" + std::to_string(block_subcarriers * block_symbols) + ")");
    require(num_aps >= 1 && num_ues >= 1, "L and K must be >= 1");
    require(area_side > 0, "area_side must be > 0");
    require(!pilot_subcarriers.empty() && !pilot_symbols.empty(), "pilot placement must be non-empty");
    require(std::set<int>(pilot_subcarriers.begin(), pilot_subcarriers.end()).size() == pilot_subcarriers.size(),
            "pilot_subcarriers contains duplicates");
    require(std::set<int>(pilot_symbols.begin(), pilot_symbols.end()).size() == pilot_symbols.size(),
            "pilot_symbols contains duplicates");
    for (int sc : pilot_subcarriers)
        require(sc >= 0 && sc < block_subcarriers, "pilot subcarrier " + std::to_string(sc) + " outside [0, N_c)");
    for (int sym : pilot_symbols)
        require(sym >= 1 && sym <= block_symbols, "pilot symbol " + std::to_string(sym) + " outside [1, tau_c]");
    require(static_cast<int>(pilot_subcarriers.size() * pilot_symbols.size()) == pilot_length,
            "|pilot_subcarriers| * |pilot_symbols| must equal tau_p");
}

}  // namespace pnsim
