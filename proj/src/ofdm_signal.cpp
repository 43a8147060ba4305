#include "pnsim/ofdm_signal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include <fftw3.h>

#include <unsupported/Eigen/FFT>

namespace pnsim {

const MatrixXcd& TransmitGrid::at_symbol(int tau) const {
    const auto it = std::find(symbols.begin(), symbols.end(), tau);
    if (it == symbols.end()) throw std::logic_error("TransmitGrid: symbol is not a pilot symbol");
    return grid[it - symbols.begin()];
}

int pilot_sample_index(const SimulationLayout& layout, int subcarrier_in_block, int tau) {
    const auto& sc = layout.pilot_subcarriers;
    const auto& sym = layout.pilot_symbols;
    const auto a = std::find(sc.begin(), sc.end(), subcarrier_in_block);
    const auto b = std::find(sym.begin(), sym.end(), tau + 1);
    if (a == sc.end() || b == sym.end()) return -1;
    return static_cast<int>((b - sym.begin()) * sc.size() + (a - sc.begin()));
}

TransmitGrid build_transmit_grid(const SimulationLayout& layout, const PilotBook& book,
                                 const std::vector<int>& pilot, DataSymbols data, Rng& rng) {
    const int n_sc = layout.num_subcarriers;
    const int K = static_cast<int>(pilot.size());
    TransmitGrid g;
    for (int sym : layout.pilot_symbols) {
        const int tau = sym - 1;
        MatrixXcd s(n_sc, K);
        for (int k = 0; k < K; ++k)
            for (int j = 0; j < n_sc; ++j) {
                const int m = pilot_sample_index(layout, j % layout.block_subcarriers, tau);
                if (m >= 0) {
                    s(j, k) = book.sequences(m, pilot[k]);
                } else if (data == DataSymbols::gaussian) {
                    s(j, k) = rng.complex_normal(1.0);
                } else {
                    const double a = std::sqrt(0.5);
                    const double re = rng.uniform(0.0, 1.0) < 0.5 ? -a : a;
                    const double im = rng.uniform(0.0, 1.0) < 0.5 ? -a : a;
                    s(j, k) = {re, im};
                }
            }
        g.symbols.push_back(tau);
        g.grid.push_back(std::move(s));
    }
    return g;
}

namespace {

MatrixXcd phasors(const MatrixXd& phase) {
    MatrixXcd out(phase.rows(), phase.cols());
    for (Eigen::Index c = 0; c < phase.cols(); ++c)
        for (Eigen::Index r = 0; r < phase.rows(); ++r) out(r, c) = std::polar(1.0, phase(r, c));
    return out;
}

// Unscaled backward transforms of `howmany` contiguous length-n columns. Plans are created
// once under a lock; executing a plan on new arrays is thread-safe.
void inverse_dft_columns(const MatrixXcd& in, MatrixXcd& out) {
    static std::mutex lock;
    static std::map<std::pair<int, int>, fftw_plan> plans;
    const int n = static_cast<int>(in.rows());
    const int howmany = static_cast<int>(in.cols());
    fftw_plan plan = nullptr;
    {
        std::lock_guard<std::mutex> guard(lock);
        auto& slot = plans[{n, howmany}];
        if (!slot) {
            MatrixXcd a(n, howmany), b(n, howmany);
            slot = fftw_plan_many_dft(1, &n, howmany, reinterpret_cast<fftw_complex*>(a.data()), nullptr, 1, n,
                                      reinterpret_cast<fftw_complex*>(b.data()), nullptr, 1, n, FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
        }
        plan = slot;
    }
    out.resize(n, howmany);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

PilotSynthesis synth_pilot_observations(const ChannelRealization& channel, const PhaseNoiseTrace& trace,
                                        const TransmitGrid& grid, const NetworkRealization& net,
                                        const SimulationLayout& layout, const PilotBook& book,
                                        const SynthesisOptions& options, Rng& noise_rng) {
    const int n_sc = layout.num_subcarriers;
    const int n_c = layout.block_subcarriers;
    const int K = net.num_ues();
    const int L = net.num_aps();
    const int tau_p = layout.pilot_length;
    const auto positions = layout.pilot_positions();
    const MatrixXcd& h0 = channel.own_block();

    PilotSynthesis out;
    out.per_ap.assign(L, PilotObservation{VectorXcd::Zero(tau_p), VectorXcd::Zero(tau_p), VectorXcd::Zero(tau_p),
                                          VectorXcd::Zero(tau_p)});
    out.cpe.resize(layout.block_symbols);

    const bool exact_ici = options.phase_noise && options.ici == IciSynthesis::exact;
    MatrixXcd x_all(n_sc, L), x_time_all(n_sc, L);
    VectorXcd weight(n_sc);

    for (int tau = 0; tau < layout.block_symbols; ++tau) {
        const MatrixXcd ap = phasors(trace.ap[tau]);
        const MatrixXcd ue = phasors(trace.ue[tau]);
        out.cpe[tau] = (ap * ue.transpose()) / static_cast<double>(n_sc);
        if (!layout.is_pilot_symbol(tau)) continue;

        for (int m = 0; m < tau_p; ++m) {
            if (positions[m].symbol != tau) continue;
            for (int l = 0; l < L; ++l)
                for (int k = 0; k < K; ++k)
                    out.per_ap[l].effective(m) += std::sqrt(net.power(k)) * book.sequences(m, net.pilot[k]) *
                                                  out.cpe[tau](l, k) * h0(k, l);
        }
        if (!exact_ici) continue;

        const MatrixXcd& s = grid.at_symbol(tau);
        const MatrixXcd ap_t = ap.transpose();
        for (int k = 0; k < K; ++k) {
            for (int r = 0; r < layout.num_blocks(); ++r) {
                const int first = r * n_c;
                const int count = std::min(n_c, n_sc - first);
                const auto s_block = s.col(k).segment(first, count);
                for (int l = 0; l < L; ++l) x_all.col(l).segment(first, count) = s_block * channel.blocks[r](k, l);
            }
            inverse_dft_columns(x_all, x_time_all);
            x_time_all.array() *= ap_t.array();
            for (int m = 0; m < tau_p; ++m) {
                if (positions[m].symbol != tau) continue;
                const int n = positions[m].subcarrier;
                for (int t = 0; t < n_sc; ++t)
                    weight(t) = ue(k, t) * std::polar(1.0, -2.0 * kPi * ((static_cast<long long>(t) * n) % n_sc) / n_sc) /
                                static_cast<double>(n_sc);
                // sum_j x_j J_{n-j} over all j, then drop the j = n (CPE) term.
                const VectorXcd full = x_time_all.transpose() * weight;
                for (int l = 0; l < L; ++l) {
                    const cd own = s(n, k) * h0(k, l) * out.cpe[tau](l, k);
                    out.per_ap[l].ici(m) += std::sqrt(net.power(k)) * (full(l) - own);
                }
            }
        }
    }

    for (int l = 0; l < L; ++l) {
        auto& obs = out.per_ap[l];
        if (options.phase_noise && options.ici == IciSynthesis::gaussian) {
            const double var = options.ici_power_fraction * (net.power.array() * net.beta.col(l).array()).sum();
            for (int m = 0; m < tau_p; ++m) obs.ici(m) = noise_rng.complex_normal(var);
        }
        for (int m = 0; m < tau_p; ++m) obs.noise(m) = noise_rng.complex_normal(net.noise_power);
        obs.y = obs.effective + obs.ici + obs.noise;
    }
    return out;
}

VectorXcd unitary_dft(const VectorXcd& x) {
    Eigen::FFT<double> fft;
    VectorXcd out(x.size());
    fft.fwd(out, x);
    return out / std::sqrt(static_cast<double>(x.size()));
}

VectorXcd unitary_idft(const VectorXcd& x) {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    VectorXcd out(x.size());
    fft.inv(out, x);
    return out / std::sqrt(static_cast<double>(x.size()));
}

VectorXcd fir_frequency_response(const FirChannel& fir, int k, int l, int num_subcarriers) {
    VectorXcd h = VectorXcd::Zero(num_subcarriers);
    for (int n = 0; n < num_subcarriers; ++n)
        for (std::size_t q = 0; q < fir.taps.size(); ++q)
            h(n) += fir.taps[q](k, l) *
                    std::polar(1.0, -2.0 * kPi * ((static_cast<long long>(q) * n) % num_subcarriers) / num_subcarriers);
    return h;
}

OracleOutput time_domain_oracle(const FirChannel& fir, const MatrixXcd& symbol_grid, const PhaseNoiseTrace& trace,
                                int tau, const VectorXd& power, const MatrixXcd& noise) {
    const int n_sc = static_cast<int>(symbol_grid.rows());
    const int K = static_cast<int>(symbol_grid.cols());
    const int L = static_cast<int>(noise.cols());
    const int Q = static_cast<int>(fir.taps.size());

    OracleOutput out;
    out.time = noise;
    for (int k = 0; k < K; ++k) {
        const VectorXcd s_time = unitary_idft(symbol_grid.col(k));
        for (int l = 0; l < L; ++l) {
            for (int i = 0; i < n_sc; ++i) {
                cd conv{0.0, 0.0};
                for (int q = 0; q < Q; ++q) conv += fir.taps[q](k, l) * s_time(((i - q) % n_sc + n_sc) % n_sc);
                out.time(i, l) += std::sqrt(power(k)) * std::polar(1.0, trace.theta(k, l, tau, i)) * conv;
            }
        }
    }
    out.frequency.resize(n_sc, L);
    for (int l = 0; l < L; ++l) out.frequency.col(l) = unitary_dft(out.time.col(l));
    return out;
}

MatrixXcd received_frequency_domain(const FirChannel& fir, const MatrixXcd& symbol_grid,
                                    const PhaseNoiseTrace& trace, int tau, const VectorXd& power,
                                    const MatrixXcd& noise) {
    const int n_sc = static_cast<int>(symbol_grid.rows());
    const int K = static_cast<int>(symbol_grid.cols());
    const int L = static_cast<int>(noise.cols());
    MatrixXcd y = noise;
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l) {
            const PhaseDriftSpectrum J = phase_drift(trace.theta_symbol(k, l, tau));
            const VectorXcd h = fir_frequency_response(fir, k, l, n_sc);
            for (int m = 0; m < n_sc; ++m) {
                cd acc{0.0, 0.0};
                for (int n = 0; n < n_sc; ++n) acc += J(m - n) * h(n) * symbol_grid(n, k);
                y(m, l) += std::sqrt(power(k)) * acc;
            }
        }
    return y;
}

}  // namespace pnsim
