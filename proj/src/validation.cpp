#include "pnsim/validation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pnsim/channel_estimation.hpp"
#include "pnsim/csv.hpp"
#include "pnsim/ofdm_signal.hpp"
#include "pnsim/phase_noise.hpp"
#include "pnsim/rng.hpp"
#include "pnsim/se_evaluator.hpp"

namespace pnsim {
namespace {

CheckResult bound_check(std::string name, double observed, double tolerance, std::string detail = {}) {
    return {std::move(name), observed <= tolerance, observed, 0.0, tolerance, std::move(detail)};
}

SimulationLayout small_layout(int n) {
    SimulationLayout y;
    y.num_subcarriers = n;
    y.cp_length = static_cast<int>(std::lround(0.07 * n));
    y.block_subcarriers = std::max(1, n / 8);
    y.block_symbols = 4;
    y.pilot_length = 3;
    y.pilot_subcarriers = {0};
    y.pilot_symbols = {1, 2, 3};
    y.num_aps = 2;
    y.num_ues = 2;
    y.subcarrier_spacing = 15e3;
    return y;
}

// Per-sample increment variance giving the same N * sigma^2 as the full-scale setup.
double scaled_sigma2(int n) { return 2.0 * 3.509e-4 * 1200.0 / n; }

PnParams params_for(const SimulationLayout& y, double sigma2_total) {
    PnParams pn;
    pn.sample_time = y.sample_time();
    const double per_node = 0.5 * sigma2_total;
    const double unit = pn_increment_variance(pn.carrier_frequency, 1.0, pn.sample_time);
    pn.gamma_ap = per_node / unit;
    pn.gamma_ue = per_node / unit;
    return pn;
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& opts) {
    const int n = opts.num_subcarriers;
    std::vector<CheckResult> out;
    Rng rng(opts.seed);

    const SimulationLayout layout = small_layout(n);
    const PnParams pn = params_for(layout, scaled_sigma2(n));
    const KernelParams kp = kernel_params(layout, pn, StrideMode::cp_consistent);
    KernelParams fast_kp = kp;
    if (opts.inject_stride_fault) fast_kp.stride += 1;

    {
        double worst = 0.0;
        const int imax = std::min(8, n / 2);
        for (int i1 = -imax; i1 <= imax; ++i1)
            for (int i2 = -imax; i2 <= imax; ++i2)
                for (int dt = -3; dt <= 3; ++dt)
                    worst = std::max(worst, std::abs(correlation_b_fast(i1, i2, dt, fast_kp) -
                                                     correlation_b_oracle(i1, i2, dt, kp)));
        out.push_back(bound_check("kernel fast vs literal sum", worst, 1e-10));
    }

    {
        double worst = 0.0;
        for (int r = 0; r < 50; ++r) {
            VectorXd theta(n);
            double phase = rng.uniform(0.0, 2.0 * kPi);
            for (int m = 0; m < n; ++m) theta(m) = phase += rng.normal(std::sqrt(kp.sigma2_total));
            worst = std::max(worst, std::abs(phase_drift(theta).coeffs().squaredNorm() - 1.0));
        }
        out.push_back(bound_check("Parseval sum |J_i|^2 = 1", worst, 1e-12));
    }

    const KernelEvaluator eval(kp);
    {
        double diag = 0.0;
        for (int i = -n / 2; i < n / 2; ++i) diag += eval(i, i, 0).real();
        out.push_back(bound_check("trace sum of B_ii", std::abs(diag - 1.0), 1e-10));
        const double off = diag - eval(0, 0, 0).real();
        out.push_back(bound_check("1 - B_00 equals off-diagonal trace", std::abs(1.0 - eval(0, 0, 0).real() - off),
                                  1e-10));
        NetworkRealization net;
        net.beta = MatrixXd::Constant(1, 1, 2e-9);
        net.power = VectorXd::Constant(1, 0.1);
        const double lam = lambda_ici(net, eval(0, 0, 0).real())(0, 0);
        out.push_back(bound_check("ICI power from the off-diagonal trace", std::abs(lam / (0.1 * 2e-9) - off), 1e-10));
    }

    {
        double worst = 0.0;
        const int K = 2, L = 2;
        for (int r = 0; r < 20; ++r) {
            const MatrixXd beta = MatrixXd::Constant(K, L, 1.0);
            const FirChannel fir = gen_fir_channel(beta, 4, rng);
            const PhaseNoiseTrace trace = gen_pn_trace(pn, n, layout.cp_length, 1, L, K, rng);
            MatrixXcd grid(n, K);
            for (int k = 0; k < K; ++k)
                for (int j = 0; j < n; ++j) grid(j, k) = j % 4 == 0 ? cd(1.0, 0.0) : rng.complex_normal(1.0);
            MatrixXcd noise_t(n, L);
            for (int l = 0; l < L; ++l)
                for (int j = 0; j < n; ++j) noise_t(j, l) = rng.complex_normal(0.01);
            const VectorXd power = VectorXd::Constant(K, 1.0);
            const OracleOutput td = time_domain_oracle(fir, grid, trace, 0, power, noise_t);
            MatrixXcd noise_f(n, L);
            for (int l = 0; l < L; ++l) noise_f.col(l) = unitary_dft(noise_t.col(l));
            const MatrixXcd fd = received_frequency_domain(fir, grid, trace, 0, power, noise_f);
            worst = std::max(worst, (td.frequency - fd).norm() / fd.norm());
        }
        out.push_back(bound_check("time vs frequency domain model", worst, 1e-9));
    }

    {
        const int tau_c = layout.block_symbols;
        const int traces = opts.monte_carlo_traces;
        std::vector<cd> sum(tau_c, 0.0);
        std::vector<double> sum_sq(tau_c, 0.0);
        for (int r = 0; r < traces; ++r) {
            const PhaseNoiseTrace trace = gen_pn_trace(pn, n, layout.cp_length, tau_c, 1, 1, rng);
            std::vector<cd> j0(tau_c);
            for (int tau = 0; tau < tau_c; ++tau) j0[tau] = phase_drift(trace.theta_symbol(0, 0, tau)).cpe();
            for (int d = 0; d < tau_c; ++d) {
                const cd x = j0[d] * std::conj(j0[0]);
                sum[d] += x;
                sum_sq[d] += std::norm(x);
            }
        }
        double worst = 0.0;
        for (int d = 0; d < tau_c; ++d) {
            const cd mean = sum[d] / double(traces);
            const double se = std::sqrt(std::max(sum_sq[d] / traces - std::norm(mean), 1e-300) / traces);
            worst = std::max(worst, std::abs(mean - correlation_b_fast(0, 0, d, fast_kp)) / se);
        }
        out.push_back(bound_check("Monte Carlo CPE correlation (standard errors)", worst, 3.0 * std::sqrt(2.0)));
    }

    {
        SimulationLayout y = layout;
        y.num_ues = 1;
        y.num_aps = 1;
        PnParams quiet = pn;
        quiet.gamma_ap = quiet.gamma_ue = 0.0;
        const KernelParams kq = kernel_params(y, quiet, StrideMode::fft_length);
        const CorrelationTable table(kq, cpe_and_diagonal_keys(n, y.block_symbols));
        NetworkRealization net;
        net.beta = MatrixXd::Constant(1, 1, 3e-8);
        net.power = VectorXd::Constant(1, 0.1);
        net.pilot = {0};
        net.serve = DccMatrix::Constant(1, 1, true);
        net.noise_power = 1e-9;
        const PilotBook book = build_pilot_book(y.pilot_length);
        const IciCovariance cov = build_ici_covariance(y, book, kq, IciModel::as_printed);
        const auto z = build_z_ici(net, cov);
        const EstimatorContext ofdm(net, y, book, Estimator::pna_ofdm, table, 0.0, &z);
        const EstimatorContext sc(net, y, book, Estimator::pna_sc, table, 0.0);
        const EstimatorContext un(net, y, book, Estimator::unaware, table, 0.0);
        const double p = 0.1, b = 3e-8, s2 = 1e-9, tp = y.pilot_length;
        const double eps_ref = p * b * b * tp / (p * b * tp + s2);
        out.push_back(bound_check("PN-free estimate variance vs closed form", std::abs(ofdm.eps(0, 0, 0) - eps_ref) / eps_ref,
                                  1e-10));
        VectorXcd y0(y.pilot_length);
        for (auto& v : y0) v = rng.complex_normal(1e-7);
        double worst = 0.0;
        for (int tau = 0; tau < y.block_symbols; ++tau) {
            const cd a = ofdm.estimate(y0, 0, 0, tau);
            worst = std::max({worst, std::abs(a - sc.estimate(y0, 0, 0, tau)) / std::abs(a),
                              std::abs(a - un.estimate(y0, 0, 0, tau)) / std::abs(a)});
        }
        out.push_back(bound_check("PN-free estimators coincide", worst, 1e-10));
    }

    {
        // Exact generator-consistent statistics: single pilot subcarrier, independent data, CP stride.
        NetworkRealization net;
        net.beta = (MatrixXd(2, 2) << 4e-8, 1e-8, 2e-8, 5e-8).finished();
        net.power = VectorXd::Constant(2, 0.1);
        net.pilot = {0, 1};
        net.serve = DccMatrix::Constant(2, 2, true);
        net.noise_power = 1e-9;
        const PilotBook book = build_pilot_book(layout.pilot_length);
        const CorrelationTable table(kp, cpe_and_diagonal_keys(n, layout.block_symbols));
        const IciCovariance cov = build_ici_covariance(layout, book, kp, IciModel::independent_data);
        const auto z = build_z_ici(net, cov);
        const EstimatorContext ctx(net, layout, book, Estimator::pna_ofdm, table, kp.sigma2_total, &z);
        const int tau = layout.block_symbols - 1;
        const int trials = opts.orthogonality_trials;
        VectorXcd sum = VectorXcd::Zero(layout.pilot_length);
        VectorXd sum_sq = VectorXd::Zero(layout.pilot_length);
        SynthesisOptions so;
        for (int t = 0; t < trials; ++t) {
            const ChannelRealization ch = gen_channel(net.beta, layout.num_blocks(), rng);
            const PhaseNoiseTrace trace = gen_pn_trace(pn, layout, rng);
            const TransmitGrid grid = build_transmit_grid(layout, book, net.pilot, DataSymbols::gaussian, rng);
            const PilotSynthesis syn = synth_pilot_observations(ch, trace, grid, net, layout, book, so, rng);
            const VectorXcd& yv = syn.per_ap[0].y;
            const cd err = syn.cpe[tau](0, 0) * ch.own_block()(0, 0) - ctx.estimate(yv, 0, 0, tau);
            for (int m = 0; m < layout.pilot_length; ++m) {
                const cd x = err * std::conj(yv(m));
                sum(m) += x;
                sum_sq(m) += std::norm(x);
            }
        }
        double worst = 0.0;
        for (int m = 0; m < layout.pilot_length; ++m) {
            const cd mean = sum(m) / double(trials);
            const double se = std::sqrt((sum_sq(m) / trials - std::norm(mean)) / trials);
            worst = std::max(worst, std::abs(mean) / se);
        }
        out.push_back(bound_check("orthogonality of the estimation error (standard errors)", worst, 3.0 * std::sqrt(2.0)));
    }
    return out;
}

bool print_report(std::ostream& os, const std::vector<CheckResult>& checks) {
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.pass;
        os << (c.pass ? "PASS " : "FAIL ") << c.name << ": observed " << csv_number(c.observed) << ", tolerance "
           << csv_number(c.tolerance);
        if (!c.detail.empty()) os << " (" << c.detail << ')';
        os << '\n';
    }
    os << (all ? "all checks passed" : "validation FAILED") << '\n';
    return all;
}

}  // namespace pnsim
