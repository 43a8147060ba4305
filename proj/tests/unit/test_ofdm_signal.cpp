#include <doctest.h>

#include <cmath>

#include "pnsim/ofdm_signal.hpp"

using namespace pnsim;

namespace {

SimulationLayout toy_layout(int n, int n_c, int L, int K) {
    SimulationLayout y;
    y.num_subcarriers = n;
    y.cp_length = 2;
    y.block_subcarriers = n_c;
    y.block_symbols = 2;
    y.pilot_length = 2;
    y.pilot_subcarriers = {0};
    y.pilot_symbols = {1, 2};
    y.num_aps = L;
    y.num_ues = K;
    return y;
}

NetworkRealization toy_network(int L, int K, const std::vector<int>& pilot, double noise) {
    NetworkRealization net;
    net.beta = MatrixXd::Constant(K, L, 1.0);
    net.serve = DccMatrix::Constant(K, L, true);
    net.pilot = pilot;
    net.power = VectorXd::LinSpaced(K, 0.5, 1.5);
    net.noise_power = noise;
    return net;
}

PnParams strong_pn(double sigma2_each) {
    PnParams p;
    p.carrier_frequency = 1.0 / (2.0 * kPi);
    p.sample_time = 1.0;
    p.gamma_ap = sigma2_each;
    p.gamma_ue = sigma2_each;
    return p;
}

PhaseNoiseTrace zero_trace(const SimulationLayout& y) {
    PhaseNoiseTrace tr;
    tr.ap.assign(y.block_symbols, MatrixXd::Zero(y.num_aps, y.num_subcarriers));
    tr.ue.assign(y.block_symbols, MatrixXd::Zero(y.num_ues, y.num_subcarriers));
    return tr;
}

// Inter-carrier term at pilot sample m of AP l, summed literally over every interfering subcarrier.
cd brute_force_ici(const SimulationLayout& y, const NetworkRealization& net, const ChannelRealization& ch,
                   const TransmitGrid& grid, const PhaseNoiseTrace& tr, int l, int m) {
    const auto pos = y.pilot_positions()[m];
    const int n = pos.subcarrier;
    const MatrixXcd& s = grid.at_symbol(pos.symbol);
    cd acc{0.0, 0.0};
    for (int k = 0; k < net.num_ues(); ++k) {
        const auto j_spec = phase_drift(tr.theta_symbol(k, l, pos.symbol));
        for (int j = 0; j < y.num_subcarriers; ++j) {
            if (j == n) continue;
            acc += std::sqrt(net.power(k)) * s(j, k) * ch.blocks[j / y.block_subcarriers](k, l) * j_spec(n - j);
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("exponential pilot basis") {
    CHECK(exponential_pilot_basis(1)(0, 0) == cd(1.0, 0.0));
    const MatrixXcd s = exponential_pilot_basis(12);
    CHECK((s.adjoint() * s - 12.0 * MatrixXcd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("transmit grid carries pilots and unit-power data") {
    SimulationLayout y = toy_layout(16, 4, 1, 2);
    const PilotBook book = build_pilot_book(2);
    Rng rng(3);
    const auto grid = build_transmit_grid(y, book, {0, 1}, DataSymbols::qpsk, rng);
    REQUIRE(grid.symbols == std::vector<int>{0, 1});
    for (int tau = 0; tau < 2; ++tau)
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 16; ++j) {
                const cd v = grid.at_symbol(tau)(j, k);
                if (j % 4 == 0)
                    CHECK(v == book.sequences(tau, k));
                else
                    CHECK(std::norm(v) == doctest::Approx(1.0));
            }
    CHECK(pilot_sample_index(y, 0, 1) == 1);
    CHECK(pilot_sample_index(y, 1, 1) == -1);
    CHECK_THROWS_AS(grid.at_symbol(5), std::logic_error);
}

TEST_CASE("no phase noise and no noise leaves the bare pilot") {
    SimulationLayout y = toy_layout(16, 4, 3, 1);
    const auto net = toy_network(3, 1, {1}, 0.0);
    const PilotBook book = build_pilot_book(2);
    Rng rng(8);
    const auto ch = gen_channel(net.beta, y.num_blocks(), rng);
    const auto grid = build_transmit_grid(y, book, net.pilot, DataSymbols::gaussian, rng);
    const auto tr = zero_trace(y);
    Rng noise(1);
    const auto out = synth_pilot_observations(ch, tr, grid, net, y, book, SynthesisOptions{}, noise);
    for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 2; ++m) {
            const cd expected = std::sqrt(net.power(0)) * book.sequences(m, 1) * ch.own_block()(0, l);
            CHECK(std::abs(out.per_ap[l].y(m) - expected) < 1e-12);
            CHECK(std::abs(out.per_ap[l].ici(m)) < 1e-12);
        }
}

TEST_CASE("exact inter-carrier term against a literal sum") {
    SimulationLayout y = toy_layout(16, 4, 2, 3);
    const auto net = toy_network(2, 3, {0, 1, 0}, 1e-3);
    const PilotBook book = build_pilot_book(2);
    Rng rng(21);
    const auto ch = gen_channel(net.beta, y.num_blocks(), rng);
    const auto tr = gen_pn_trace(strong_pn(0.02), y, rng);

    SUBCASE("random data") {
        const auto grid = build_transmit_grid(y, book, net.pilot, DataSymbols::gaussian, rng);
        Rng noise(2);
        const auto out = synth_pilot_observations(ch, tr, grid, net, y, book, SynthesisOptions{}, noise);
        for (int l = 0; l < 2; ++l)
            for (int m = 0; m < 2; ++m) {
                const cd ref = brute_force_ici(y, net, ch, grid, tr, l, m);
                CHECK(std::abs(out.per_ap[l].ici(m) - ref) < 1e-12 * (1.0 + std::abs(ref)));
                CHECK(std::abs(out.per_ap[l].y(m) - out.per_ap[l].effective(m) - out.per_ap[l].ici(m) -
                               out.per_ap[l].noise(m)) < 1e-15);
            }
    }
    SUBCASE("silent data leaves only cross-pilot leakage") {
        auto grid = build_transmit_grid(y, book, net.pilot, DataSymbols::gaussian, rng);
        for (auto& g : grid.grid)
            for (int j = 0; j < 16; ++j)
                if (j % 4 != 0) g.row(j).setZero();
        Rng noise(2);
        const auto out = synth_pilot_observations(ch, tr, grid, net, y, book, SynthesisOptions{}, noise);
        for (int l = 0; l < 2; ++l)
            for (int m = 0; m < 2; ++m) {
                const auto pos = y.pilot_positions()[m];
                cd ref{0.0, 0.0};
                for (int k = 0; k < 3; ++k) {
                    const auto j_spec = phase_drift(tr.theta_symbol(k, l, pos.symbol));
                    for (int j : {4, 8, 12})
                        ref += std::sqrt(net.power(k)) * book.sequences(m, net.pilot[k]) * ch.blocks[j / 4](k, l) *
                               j_spec(-j);
                }
                CHECK(std::abs(out.per_ap[l].ici(m) - ref) < 1e-12);
            }
    }
    SUBCASE("CPE is the zeroth drift coefficient") {
        const auto grid = build_transmit_grid(y, book, net.pilot, DataSymbols::gaussian, rng);
        Rng noise(2);
        const auto out = synth_pilot_observations(ch, tr, grid, net, y, book, SynthesisOptions{}, noise);
        for (int tau = 0; tau < 2; ++tau)
            for (int l = 0; l < 2; ++l)
                for (int k = 0; k < 3; ++k)
                    CHECK(std::abs(out.cpe[tau](l, k) - phase_drift(tr.theta_symbol(k, l, tau)).cpe()) < 1e-14);
    }
}

TEST_CASE("inter-carrier power matches the CPE deficit") {
    SimulationLayout y = toy_layout(64, 8, 1, 1);
    const auto net = toy_network(1, 1, {0}, 0.0);
    const PilotBook book = build_pilot_book(2);
    const PnParams pn = strong_pn(0.01);
    const KernelParams kp{64, pn.sigma2_total(), 64};
    const double expected = net.power(0) * (1.0 - correlation_b_fast(0, 0, 0, kp).real());

    const int n = 10000;
    for (auto mode : {IciSynthesis::exact, IciSynthesis::gaussian}) {
        SynthesisOptions opt;
        opt.ici = mode;
        opt.ici_power_fraction = 1.0 - correlation_b_fast(0, 0, 0, kp).real();
        Rng rng(mode == IciSynthesis::exact ? 31 : 32);
        double sum = 0.0, sum2 = 0.0;
        for (int t = 0; t < n; ++t) {
            const auto ch = gen_channel(net.beta, y.num_blocks(), rng);
            const auto tr = gen_pn_trace(pn, y, rng);
            const auto grid = build_transmit_grid(y, book, net.pilot, DataSymbols::gaussian, rng);
            const auto out = synth_pilot_observations(ch, tr, grid, net, y, book, opt, rng);
            const double p = std::norm(out.per_ap[0].ici(0));
            sum += p;
            sum2 += p * p;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
        CHECK(std::abs(mean - expected) < 3.0 * se);
    }
}

TEST_CASE("time-domain model") {
    SimulationLayout y = toy_layout(16, 4, 2, 2);
    const VectorXd power = VectorXd::LinSpaced(2, 0.3, 0.9);
    Rng rng(14);

    SUBCASE("identity channel without phase noise") {
        FirChannel fir;
        fir.taps.assign(3, MatrixXcd::Zero(2, 2));
        fir.taps[0].setOnes();
        MatrixXcd s(16, 2), eta(16, 2);
        for (int i = 0; i < 16; ++i)
            for (int c = 0; c < 2; ++c) {
                s(i, c) = rng.complex_normal();
                eta(i, c) = rng.complex_normal(0.1);
            }
        const auto out = time_domain_oracle(fir, s, zero_trace(y), 0, power, eta);
        for (int l = 0; l < 2; ++l) {
            VectorXcd expected = eta.col(l);
            for (int k = 0; k < 2; ++k) expected += std::sqrt(power(k)) * unitary_idft(s.col(k));
            CHECK((out.time.col(l) - expected).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    SUBCASE("frequency-domain form agrees on random draws") {
        for (int n : {16, 64}) {
            SimulationLayout yn = toy_layout(n, 4, 2, 2);
            for (int rep = 0; rep < 20; ++rep) {
                const auto fir = gen_fir_channel(MatrixXd::Ones(2, 2), 4, rng);
                const auto tr = gen_pn_trace(strong_pn(0.01), yn, rng);
                MatrixXcd s(n, 2), eta(n, 2);
                for (int i = 0; i < n; ++i)
                    for (int c = 0; c < 2; ++c) {
                        s(i, c) = rng.complex_normal();
                        eta(i, c) = rng.complex_normal(0.05);
                    }
                const auto out = time_domain_oracle(fir, s, tr, 1, power, eta);
                MatrixXcd eta_f(n, 2);
                for (int l = 0; l < 2; ++l) eta_f.col(l) = unitary_dft(eta.col(l));
                const MatrixXcd direct = received_frequency_domain(fir, s, tr, 1, power, eta_f);
                CHECK((out.frequency - direct).norm() / direct.norm() < 1e-9);
            }
        }
    }

    SUBCASE("single active subcarrier spreads by the drift spectrum") {
        const int n0 = 5;
        const auto fir = gen_fir_channel(MatrixXd::Ones(2, 2), 3, rng);
        const auto tr = gen_pn_trace(strong_pn(0.02), y, rng);
        MatrixXcd s = MatrixXcd::Zero(16, 2);
        s(n0, 0) = cd(0.6, -0.8);
        const auto out = time_domain_oracle(fir, s, tr, 0, power, MatrixXcd::Zero(16, 2));
        for (int l = 0; l < 2; ++l) {
            const auto j_spec = phase_drift(tr.theta_symbol(0, l, 0));
            const cd h = fir_frequency_response(fir, 0, l, 16)(n0);
            for (int i = -8; i < 8; ++i) {
                const cd expected = std::sqrt(power(0)) * s(n0, 0) * j_spec(i) * h;
                CHECK(std::abs(out.frequency(((n0 + i) % 16 + 16) % 16, l) - expected) < 1e-12);
            }
        }
    }
}

TEST_CASE("unitary transforms invert each other") {
    Rng rng(6);
    VectorXcd x(30);
    for (int i = 0; i < 30; ++i) x(i) = rng.complex_normal();
    CHECK((unitary_idft(unitary_dft(x)) - x).norm() < 1e-12);
    CHECK(unitary_dft(x).norm() == doctest::Approx(x.norm()));
}
