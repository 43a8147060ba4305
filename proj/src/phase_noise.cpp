#include "pnsim/phase_noise.hpp"

#include <cmath>
#include <string>

namespace pnsim {
namespace {

int wrap(long long i, int n) {
    const long long r = i % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

VectorXcd twiddles(int n) {
    VectorXcd t(n);
    for (int q = 0; q < n; ++q) t(q) = std::polar(1.0, -2.0 * kPi * q / n);
    return t;
}

}  // namespace

double pn_increment_variance(double carrier_frequency, double gamma, double sample_time) {
    return 4.0 * kPi * kPi * carrier_frequency * carrier_frequency * gamma * sample_time;
}

PhaseNoiseTrace gen_pn_trace(const PnParams& params, int num_samples, int cp_length, int num_symbols,
                             int num_aps, int num_ues, Rng& rng) {
    PhaseNoiseTrace trace;
    trace.ap.assign(num_symbols, MatrixXd(num_aps, num_samples));
    trace.ue.assign(num_symbols, MatrixXd(num_ues, num_samples));

    auto walk = [&](std::vector<MatrixXd>& dst, int node, double sigma2) {
        const double step = std::sqrt(sigma2);
        const double jump = std::sqrt((cp_length + 1) * sigma2);
        double phase = rng.uniform(0.0, 2.0 * kPi);
        for (int tau = 0; tau < num_symbols; ++tau) {
            if (tau > 0) phase += jump * rng.normal();
            dst[tau](node, 0) = phase;
            for (int m = 1; m < num_samples; ++m) {
                phase += step * rng.normal();
                dst[tau](node, m) = phase;
            }
        }
    };
    for (int l = 0; l < num_aps; ++l) walk(trace.ap, l, params.sigma2_ap());
    for (int k = 0; k < num_ues; ++k) walk(trace.ue, k, params.sigma2_ue());
    return trace;
}

PhaseDriftSpectrum phase_drift_checked(const VectorXd& theta, int expected_length) {
    if (theta.size() != expected_length)
        throw std::invalid_argument("phase_drift: expected " + std::to_string(expected_length) + " samples, got " +
                                    std::to_string(theta.size()));
    return phase_drift(theta);
}

KernelParams kernel_params(const SimulationLayout& layout, const PnParams& pn, StrideMode mode) {
    KernelParams p;
    p.num_subcarriers = layout.num_subcarriers;
    p.sigma2_total = pn.sigma2_total();
    p.stride = mode == StrideMode::fft_length ? layout.num_subcarriers : layout.num_subcarriers + layout.cp_length;
    return p;
}

cd correlation_b_oracle(int i1, int i2, int dtau, const KernelParams& params) {
    const int n = params.num_subcarriers;
    const VectorXcd tw = twiddles(n);
    cd acc{0.0, 0.0};
    for (int n1 = 0; n1 < n; ++n1)
        for (int n2 = 0; n2 < n; ++n2) {
            const double lag = std::abs(static_cast<double>(dtau) * params.stride + n1 - n2);
            const double w = std::exp(-0.5 * params.sigma2_total * lag);
            acc += w * tw(wrap(static_cast<long long>(n1) * i1 - static_cast<long long>(n2) * i2, n));
        }
    return acc / (static_cast<double>(n) * n);
}

cd correlation_b_fast(int i1, int i2, int dtau, const KernelParams& params) {
    return KernelEvaluator(params)(i1, i2, dtau);
}

double single_carrier_cpe_correlation(double sigma2_total, int num_subcarriers, int dtau) {
    return std::exp(-0.5 * sigma2_total * num_subcarriers * std::abs(dtau));
}

KernelEvaluator::KernelEvaluator(const KernelParams& params) : params_(params), twiddle_(twiddles(params.num_subcarriers)) {}

const VectorXd& KernelEvaluator::decay(int dtau) const {
    auto it = decay_.find(dtau);
    if (it != decay_.end()) return it->second;
    const int n = params_.num_subcarriers;
    VectorXd w(2 * n - 1);
    for (int d = -(n - 1); d <= n - 1; ++d)
        w(d + n - 1) = std::exp(-0.5 * params_.sigma2_total *
                                std::abs(static_cast<double>(dtau) * params_.stride + d));
    return decay_.emplace(dtau, std::move(w)).first->second;
}

cd KernelEvaluator::operator()(int i1, int i2, int dtau) const {
    const int n = params_.num_subcarriers;
    const VectorXd& w = decay(dtau);
    const int delta = wrap(static_cast<long long>(i1) - i2, n);
    const cd q = twiddle_(delta);
    const cd inv_one_minus_q = delta == 0 ? cd{} : 1.0 / (1.0 - q);

    cd acc{0.0, 0.0};
    for (int d = -(n - 1); d <= n - 1; ++d) {
        const int first = d < 0 ? -d : 0;
        const int count = n - std::abs(d);
        cd inner;
        if (delta == 0) {
            inner = static_cast<double>(count);
        } else {
            const cd q_first = twiddle_(wrap(static_cast<long long>(delta) * first, n));
            const cd q_count = twiddle_(wrap(static_cast<long long>(delta) * count, n));
            inner = q_first * (1.0 - q_count) * inv_one_minus_q;
        }
        acc += w(d + n - 1) * twiddle_(wrap(static_cast<long long>(d) * i1, n)) * inner;
    }
    return acc / (static_cast<double>(n) * n);
}

std::uint64_t CorrelationTable::key(int i1, int i2, int dtau) const {
    const int n = params_.num_subcarriers;
    const auto a = static_cast<std::uint64_t>(wrap(i1, n));
    const auto b = static_cast<std::uint64_t>(wrap(i2, n));
    const auto c = static_cast<std::uint64_t>(static_cast<std::uint32_t>(dtau + (1 << 20)));
    return (a << 42) | (b << 21) | c;
}

CorrelationTable::CorrelationTable(const KernelParams& params, const std::vector<KernelKey>& keys) : params_(params) {
    const KernelEvaluator eval(params);
    values_.reserve(keys.size());
    for (const auto& k : keys) {
        const auto id = key(k.i1, k.i2, k.dtau);
        if (!values_.count(id)) values_.emplace(id, eval(k.i1, k.i2, k.dtau));
    }
}

cd CorrelationTable::at(int i1, int i2, int dtau) const {
    auto it = values_.find(key(i1, i2, dtau));
    if (it == values_.end())
        throw std::logic_error("CorrelationTable: missing entry B(" + std::to_string(i1) + "," + std::to_string(i2) +
                               "; " + std::to_string(dtau) + ")");
    return it->second;
}

bool CorrelationTable::contains(int i1, int i2, int dtau) const { return values_.count(key(i1, i2, dtau)) > 0; }

std::vector<KernelKey> cpe_and_diagonal_keys(int num_subcarriers, int num_symbols) {
    std::vector<KernelKey> keys;
    for (int d = -(num_symbols - 1); d <= num_symbols - 1; ++d) keys.push_back({0, 0, d});
    for (int i = -num_subcarriers / 2; i < num_subcarriers / 2; ++i) keys.push_back({i, i, 0});
    return keys;
}

}  // namespace pnsim
