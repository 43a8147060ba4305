#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "pnsim/layout.hpp"
#include "pnsim/rng.hpp"
#include "pnsim/types.hpp"

namespace pnsim {

/// sigma^2 = 4 pi^2 f_c^2 gamma T_s, the per-sample Wiener increment variance in rad^2.
double pn_increment_variance(double carrier_frequency, double gamma, double sample_time);

/// Oscillator description shared by all APs and by all UEs.
struct PnParams {
    double carrier_frequency = 2e9;  // Hz
    double gamma_ap = 4e-17;
    double gamma_ue = 4e-17;
    double sample_time = 1.0 / 18e6;  // s

    double sigma2_ap() const { return pn_increment_variance(carrier_frequency, gamma_ap, sample_time); }
    double sigma2_ue() const { return pn_increment_variance(carrier_frequency, gamma_ue, sample_time); }
    double sigma2_total() const { return sigma2_ap() + sigma2_ue(); }
};

/// Wiener phases of every oscillator over one coherence block.
///
/// The AP and UE walks are kept separately; the phase seen on link (k, l) is their sum.
struct PhaseNoiseTrace {
    std::vector<MatrixXd> ap;  // per symbol: L x N
    std::vector<MatrixXd> ue;  // per symbol: K x N

    int num_symbols() const { return static_cast<int>(ap.size()); }
    int num_samples() const { return ap.empty() ? 0 : static_cast<int>(ap.front().cols()); }

    double theta(int k, int l, int tau, int m) const { return ap[tau](l, m) + ue[tau](k, m); }
    VectorXd theta_symbol(int k, int l, int tau) const {
        return (ap[tau].row(l) + ue[tau].row(k)).transpose();
    }
};

/// Independent walks per AP and per UE, initial phase uniform on [0, 2 pi), per-sample
/// increments N(0, sigma^2), and a N(0, (N_cp + 1) sigma^2) jump across each cyclic prefix.
PhaseNoiseTrace gen_pn_trace(const PnParams& params, int num_samples, int cp_length, int num_symbols,
                             int num_aps, int num_ues, Rng& rng);

inline PhaseNoiseTrace gen_pn_trace(const PnParams& params, const SimulationLayout& layout, Rng& rng) {
    return gen_pn_trace(params, layout.num_subcarriers, layout.cp_length, layout.block_symbols,
                        layout.num_aps, layout.num_ues, rng);
}

/// Frequency-domain phase drift J_i, i in [-N/2, N/2), stored in FFT order.
class PhaseDriftSpectrum {
public:
    explicit PhaseDriftSpectrum(VectorXcd coeffs) : coeffs_(std::move(coeffs)) {}

    int size() const { return static_cast<int>(coeffs_.size()); }
    cd operator()(int i) const {
        const int n = size();
        return coeffs_(((i % n) + n) % n);
    }
    cd cpe() const { return coeffs_(0); }
    const VectorXcd& coeffs() const { return coeffs_; }

private:
    VectorXcd coeffs_;
};

/// J_i = (1/N) sum_n exp(j theta_n) exp(-j 2 pi n i / N).
template <typename Derived>
PhaseDriftSpectrum phase_drift(const Eigen::MatrixBase<Derived>& theta) {
    static_assert(Derived::ColsAtCompileTime == 1, "phase_drift expects a column vector");
    const Eigen::Index n = theta.size();
    VectorXcd x(n);
    for (Eigen::Index m = 0; m < n; ++m) x(m) = std::polar(1.0, static_cast<double>(theta(m)));
    Eigen::FFT<double> fft;
    VectorXcd out(n);
    fft.fwd(out, x);
    return PhaseDriftSpectrum(out / static_cast<double>(n));
}

/// Checked variant for callers holding a symbol of unknown length.
PhaseDriftSpectrum phase_drift_checked(const VectorXd& theta, int expected_length);

enum class StrideMode {
    fft_length,    ///< symbol lag spans N samples
    cp_consistent  ///< symbol lag spans N + N_cp samples, matching the generator's CP jump
};

/// Everything the kernel B_{i1,i2}^{(dtau)} depends on.
struct KernelParams {
    int num_subcarriers = 0;
    double sigma2_total = 0.0;
    int stride = 0;  // samples per symbol lag
};

KernelParams kernel_params(const SimulationLayout& layout, const PnParams& pn, StrideMode mode);

/// Literal O(N^2) double sum defining E{J_{i1}^{(tau1)} J_{i2}^{*(tau2)}}, dtau = tau1 - tau2.
cd correlation_b_oracle(int i1, int i2, int dtau, const KernelParams& params);

/// O(N) evaluation of the same kernel: the sum is regrouped by lag d = n1 - n2 and the
/// inner sum over n2 is a closed-form geometric series.
cd correlation_b_fast(int i1, int i2, int dtau, const KernelParams& params);

/// CPE correlation of the single-carrier model, one drift sample every N samples:
/// exp(-sigma2_total * N * |dtau| / 2).
double single_carrier_cpe_correlation(double sigma2_total, int num_subcarriers, int dtau);

/// Reusable state for many fast-kernel evaluations with fixed parameters.
class KernelEvaluator {
public:
    explicit KernelEvaluator(const KernelParams& params);
    cd operator()(int i1, int i2, int dtau) const;
    const KernelParams& params() const { return params_; }

private:
    const VectorXd& decay(int dtau) const;

    KernelParams params_;
    VectorXcd twiddle_;  // exp(-j 2 pi q / N)
    mutable std::unordered_map<int, VectorXd> decay_;  // per dtau: w(dtau*stride + d), d in [-(N-1), N-1]
};

struct KernelKey {
    int i1;
    int i2;
    int dtau;
};

/// Immutable cache of B_{i1,i2}^{(dtau)} over an explicit key set. Subcarrier offsets are
/// reduced modulo N; lookups outside the key set are a logic error.
class CorrelationTable {
public:
    CorrelationTable() = default;
    CorrelationTable(const KernelParams& params, const std::vector<KernelKey>& keys);

    cd at(int i1, int i2, int dtau) const;
    /// B_{0,0}^{(dtau)}; real-valued.
    double cpe(int dtau) const { return at(0, 0, dtau).real(); }
    bool contains(int i1, int i2, int dtau) const;
    std::size_t size() const { return values_.size(); }
    const KernelParams& params() const { return params_; }

private:
    std::uint64_t key(int i1, int i2, int dtau) const;

    KernelParams params_;
    std::unordered_map<std::uint64_t, cd> values_;
};

/// CPE lags |dtau| <= tau_c - 1 plus the full diagonal B_{i,i}^{(0)}.
std::vector<KernelKey> cpe_and_diagonal_keys(int num_subcarriers, int num_symbols);

inline CorrelationTable build_correlation_table(const KernelParams& params, const std::vector<KernelKey>& keys) {
    return CorrelationTable(params, keys);
}

}  // namespace pnsim
