#pragma once

#include <vector>

#include "pnsim/layout.hpp"
#include "pnsim/network_model.hpp"
#include "pnsim/phase_noise.hpp"
#include "pnsim/rng.hpp"
#include "pnsim/types.hpp"

namespace pnsim {

/// tau_p mutually orthogonal pilots; column t is s_t, entry m is the m-th pilot sample.
struct PilotBook {
    MatrixXcd sequences;

    int length() const { return static_cast<int>(sequences.rows()); }
    auto sequence(int t) const { return sequences.col(t); }
};

/// Unit-modulus exponential basis: s_t[m] = exp(-j 2 pi m t / tau_p), so S^H S = tau_p I.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> exponential_pilot_basis(int tau_p) {
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> s(tau_p, tau_p);
    for (int m = 0; m < tau_p; ++m)
        for (int t = 0; t < tau_p; ++t)
            s(m, t) = std::polar(Scalar(1), Scalar(-2.0 * kPi * ((static_cast<long long>(m) * t) % tau_p) / tau_p));
    return s;
}

inline PilotBook build_pilot_book(int tau_p) { return PilotBook{exponential_pilot_basis<double>(tau_p)}; }

enum class DataSymbols { gaussian, qpsk };

/// Frequency-domain transmit symbols of the pilot-bearing OFDM symbols (the only ones the
/// SE pipeline ever synthesizes). Entries are unit power; sqrt(p_k) is applied at use.
struct TransmitGrid {
    std::vector<int> symbols;      // zero-based pilot symbols
    std::vector<MatrixXcd> grid;   // per entry of `symbols`: N x K

    const MatrixXcd& at_symbol(int tau) const;
};

/// Index m of the pilot sample at (subcarrier offset, zero-based symbol), or -1.
int pilot_sample_index(const SimulationLayout& layout, int subcarrier_in_block, int tau);

TransmitGrid build_transmit_grid(const SimulationLayout& layout, const PilotBook& book,
                                 const std::vector<int>& pilot, DataSymbols data, Rng& rng);

/// Received pilot samples of one AP in pilot order, with their three components.
struct PilotObservation {
    VectorXcd y;
    VectorXcd effective;  // sum_k sqrt(p_k) s J_0 h
    VectorXcd ici;        // sum_k zeta_k
    VectorXcd noise;
};

enum class IciSynthesis {
    exact,    ///< zeta summed over all N subcarriers from the drawn J, data and channels
    gaussian  ///< zeta replaced by CN(0, sum_k p_k beta_{k,l} (1 - B_{0,0}^{(0)}))
};

struct SynthesisOptions {
    IciSynthesis ici = IciSynthesis::exact;
    double ici_power_fraction = 0.0;  // 1 - B_{0,0}^{(0)}, used by the gaussian mode
    bool phase_noise = true;          // false: all walks are constant, zeta is identically zero
};

struct PilotSynthesis {
    std::vector<PilotObservation> per_ap;
    std::vector<MatrixXcd> cpe;  // per symbol: L x K matrix of J_{k,l,0}^{(tau)}
};

/// Pilot observations of block 0 at every AP, plus the CPE of every (link, symbol).
PilotSynthesis synth_pilot_observations(const ChannelRealization& channel, const PhaseNoiseTrace& trace,
                                        const TransmitGrid& grid, const NetworkRealization& net,
                                        const SimulationLayout& layout, const PilotBook& book,
                                        const SynthesisOptions& options, Rng& noise_rng);

/// Per-AP outputs (columns) of the time-domain oracle.
struct OracleOutput {
    MatrixXcd time;       // N x L received samples
    MatrixXcd frequency;  // unitary N-point DFT of `time`
};

/// y_l = sum_k sqrt(p_k) diag(exp(j theta_{k,l})) (h_{k,l} (*) s_k) + eta_l, with circular
/// convolution, s_k the unitary IDFT of the frequency-domain symbol (column k of
/// `symbol_grid`, N x K) and `noise` the time-domain noise (N x L).
OracleOutput time_domain_oracle(const FirChannel& fir, const MatrixXcd& symbol_grid, const PhaseNoiseTrace& trace,
                                int tau, const VectorXd& power, const MatrixXcd& noise);

/// Direct frequency-domain evaluation y = sum_k sqrt(p_k) J_{k,l} (*) (h_{k,l} . s_k) + eta with
/// h the N-point DFT of the taps and J from the trace. `noise` is frequency-domain (N x L).
MatrixXcd received_frequency_domain(const FirChannel& fir, const MatrixXcd& symbol_grid,
                                    const PhaseNoiseTrace& trace, int tau, const VectorXd& power,
                                    const MatrixXcd& noise);

/// Unnormalized N-point DFT of the taps of link (k, l): h_n = sum_q h_q exp(-j 2 pi q n / N).
VectorXcd fir_frequency_response(const FirChannel& fir, int k, int l, int num_subcarriers);

VectorXcd unitary_dft(const VectorXcd& x);
VectorXcd unitary_idft(const VectorXcd& x);

}  // namespace pnsim
