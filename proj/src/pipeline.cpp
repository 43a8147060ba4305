#include "pnsim/pipeline.hpp"

#include <algorithm>

#include "pnsim/rng.hpp"

namespace pnsim {

PassContext make_pass(const ExperimentConfig& cfg, bool phase_noise) {
    PassContext pass;
    pass.cfg = cfg;
    pass.phase_noise = phase_noise;
    pass.pn = cfg.pn;
    pass.pn.sample_time = cfg.layout.sample_time();
    if (!phase_noise) {
        pass.pn.gamma_ap = 0.0;
        pass.pn.gamma_ue = 0.0;
    }
    pass.estimators = phase_noise ? cfg.estimators : std::vector<Estimator>{Estimator::unaware};
    pass.book = build_pilot_book(cfg.layout.pilot_length);
    pass.kernel = kernel_params(cfg.layout, pass.pn, cfg.stride);
    pass.table = build_correlation_table(pass.kernel,
                                         cpe_and_diagonal_keys(cfg.layout.num_subcarriers, cfg.layout.block_symbols));
    const bool ofdm_aware =
        std::find(pass.estimators.begin(), pass.estimators.end(), Estimator::pna_ofdm) != pass.estimators.end();
    if (phase_noise && ofdm_aware) pass.ici = build_ici_covariance(cfg.layout, pass.book, pass.kernel, cfg.ici_model);
    return pass;
}

GeometryContext make_geometry(const PassContext& pass, int geometry) {
    const auto& cfg = pass.cfg;
    GeometryContext geom;
    geom.index = geometry;
    geom.net = make_network(cfg.layout, cfg.prop, cfg.pilot_policy, derive_seed(cfg.master_seed, geometry, 0, "geometry"));
    std::optional<std::vector<MatrixXcd>> z;
    if (pass.ici) z = build_z_ici(geom.net, *pass.ici);
    for (Estimator e : pass.estimators)
        geom.estimators.emplace_back(geom.net, cfg.layout, pass.book, e, pass.table, pass.pn.sigma2_total(),
                                     z ? &*z : nullptr);
    geom.lambda_sum = lambda_ici(geom.net, pass.table).colwise().sum().transpose();
    return geom;
}

TrialDraws draw_trial(const PassContext& pass, const GeometryContext& geom, int trial) {
    const auto& cfg = pass.cfg;
    const auto& layout = cfg.layout;
    const auto& net = geom.net;
    const std::uint64_t g = static_cast<std::uint64_t>(geom.index);
    const std::uint64_t t = static_cast<std::uint64_t>(trial);
    Rng channel_rng(derive_seed(cfg.master_seed, g, t, "channel"));
    Rng pn_rng(derive_seed(cfg.master_seed, g, t, "phase_noise"));
    Rng data_rng(derive_seed(cfg.master_seed, g, t, "data"));
    Rng noise_rng(derive_seed(cfg.master_seed, g, t, "noise"));

    const bool exact_ici = pass.phase_noise && cfg.ici_synthesis == IciSynthesis::exact;
    TrialDraws d;
    d.channel = gen_channel(net.beta, exact_ici ? layout.num_blocks() : 1, channel_rng);
    d.trace = gen_pn_trace(pass.pn, layout, pn_rng);
    if (exact_ici) d.grid = build_transmit_grid(layout, pass.book, net.pilot, cfg.data_symbols, data_rng);

    SynthesisOptions opts;
    opts.ici = cfg.ici_synthesis;
    opts.ici_power_fraction = 1.0 - pass.table.cpe(0);
    opts.phase_noise = pass.phase_noise;
    d.synthesis = synth_pilot_observations(d.channel, d.trace, d.grid, net, layout, pass.book, opts, noise_rng);

    d.h_eff.reserve(layout.block_symbols);
    for (int tau = 0; tau < layout.block_symbols; ++tau)
        d.h_eff.push_back(d.synthesis.cpe[tau].transpose().cwiseProduct(d.channel.own_block()));
    return d;
}

TrialOutcome evaluate_trial(const PassContext& pass, const GeometryContext& geom, const TrialDraws& draws) {
    const int K = geom.net.num_ues();
    const int tau_c = pass.cfg.layout.block_symbols;
    const int n_schemes = static_cast<int>(pass.cfg.schemes.size());
    TrialOutcome out;
    out.terms.resize(static_cast<std::size_t>(pass.num_variants()) * tau_c * K);
    for (std::size_t e = 0; e < geom.estimators.size(); ++e) {
        const auto& ctx = geom.estimators[e];
        const EstimateSet est = ctx.estimate_all(draws.synthesis.per_ap);
        for (int tau = 0; tau < tau_c; ++tau) {
            const CombinerInputs in{est.h_hat[tau], ctx.err(tau), geom.net};
            for (int s = 0; s < n_schemes; ++s) {
                const CombinerSet set = combine_all(pass.cfg.schemes[s], in);
                out.pseudo_inverse_fallbacks += set.pseudo_inverse_fallbacks;
                const auto terms = trial_terms(set.v, draws.h_eff[tau], geom.lambda_sum, geom.net.power);
                const int variant = static_cast<int>(e) * n_schemes + s;
                for (int k = 0; k < K; ++k) out.terms[term_index(variant, tau, k, tau_c, K)] = terms[k];
            }
        }
    }
    return out;
}

}  // namespace pnsim
