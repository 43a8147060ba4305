#include <doctest.h>

#include <cmath>
#include <random>

#include "pnsim/phase_noise.hpp"

using namespace pnsim;

namespace {

// sigma^2 equals gamma when f_c = 1 / (2 pi) and T_s = 1.
PnParams unit_params(double sigma2_ap, double sigma2_ue) {
    PnParams p;
    p.carrier_frequency = 1.0 / (2.0 * kPi);
    p.sample_time = 1.0;
    p.gamma_ap = sigma2_ap;
    p.gamma_ue = sigma2_ue;
    return p;
}

KernelParams kp(int n, double sigma2, int stride) { return KernelParams{n, sigma2, stride}; }

}  // namespace

TEST_CASE("Wiener increment variance") {
    CHECK(pn_increment_variance(2e9, 4e-17, 1.0 / 18e6) == doctest::Approx(3.509e-4).epsilon(1e-3));
    CHECK(pn_increment_variance(0.0, 4e-17, 1.0 / 18e6) == 0.0);
    CHECK(pn_increment_variance(1e9, 4e-17, 5.5556e-8) == doctest::Approx(8.77e-5).epsilon(1e-3));
    const PnParams p = unit_params(2e-3, 3e-3);
    CHECK(p.sigma2_total() == doctest::Approx(5e-3));
}

TEST_CASE("trace generation") {
    SUBCASE("no phase noise keeps every phase constant") {
        Rng rng(3);
        const auto tr = gen_pn_trace(unit_params(0.0, 0.0), 16, 3, 4, 2, 2, rng);
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                const double first = tr.theta(k, l, 0, 0);
                for (int tau = 0; tau < 4; ++tau)
                    for (int m = 0; m < 16; ++m) CHECK(tr.theta(k, l, tau, m) == first);
            }
    }
    SUBCASE("sample and prefix increments") {
        const double s_ap = 2e-3, s_ue = 1e-3;
        const int cp = 5, n = 100000;
        Rng rng(11);
        double inc = 0.0, jump = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto tr = gen_pn_trace(unit_params(s_ap, s_ue), 4, cp, 2, 1, 1, rng);
            const double a = tr.theta(0, 0, 0, 2) - tr.theta(0, 0, 0, 1);
            const double b = tr.theta(0, 0, 1, 0) - tr.theta(0, 0, 0, 3);
            inc += a * a;
            jump += b * b;
        }
        const double expect_inc = s_ap + s_ue;
        const double expect_jump = (cp + 1) * (s_ap + s_ue);
        // Zero-mean increments: the sample second moment has relative sd sqrt(2/n).
        CHECK(std::abs(inc / n - expect_inc) < 3.0 * expect_inc * std::sqrt(2.0 / n));
        CHECK(std::abs(jump / n - expect_jump) < 3.0 * expect_jump * std::sqrt(2.0 / n));
    }
}

TEST_CASE("phase drift spectrum") {
    SUBCASE("zero phase is a delta") {
        const auto j = phase_drift(VectorXd::Zero(32));
        CHECK(std::abs(j.cpe() - 1.0) < 1e-15);
        for (int i = 1; i < 32; ++i) CHECK(std::abs(j(i)) < 1e-15);
    }
    SUBCASE("constant phase") {
        const auto j = phase_drift(VectorXd::Constant(32, 0.7));
        CHECK(std::abs(j.cpe() - std::polar(1.0, 0.7)) < 1e-15);
        for (int i = 1; i < 32; ++i) CHECK(std::abs(j(i)) < 1e-15);
    }
    SUBCASE("Parseval on random walks") {
        std::mt19937_64 eng(9);
        std::normal_distribution<double> g(0.0, 0.3);
        for (int rep = 0; rep < 20; ++rep) {
            VectorXd theta(64);
            double acc = 0.0;
            for (int m = 0; m < 64; ++m) theta(m) = acc += g(eng);
            CHECK(std::abs(phase_drift(theta).coeffs().squaredNorm() - 1.0) < 1e-12);
        }
    }
    SUBCASE("negative indices wrap") {
        VectorXd theta = VectorXd::LinSpaced(8, 0.0, 1.0);
        const auto j = phase_drift(theta);
        CHECK(j(-1) == j(7));
        CHECK(j(-8) == j(0));
    }
    SUBCASE("length check") { CHECK_THROWS_AS(phase_drift_checked(VectorXd::Zero(7), 8), std::invalid_argument); }
}

TEST_CASE("kernel without phase noise") {
    const auto p = kp(16, 0.0, 16);
    CHECK(std::abs(correlation_b_oracle(0, 0, 0, p) - 1.0) < 1e-12);
    CHECK(std::abs(correlation_b_oracle(0, 0, 3, p) - 1.0) < 1e-12);
    CHECK(std::abs(correlation_b_oracle(2, 5, 0, p)) < 1e-12);
    CHECK(std::abs(correlation_b_oracle(1, 1, 1, p)) < 1e-12);
    CHECK(std::abs(correlation_b_fast(0, 0, 2, p) - 1.0) < 1e-12);
    CHECK(std::abs(correlation_b_fast(3, 1, -1, p)) < 1e-12);
}

TEST_CASE("CPE power closed form at full size") {
    const int n = 1200;
    const double s2 = 7e-4;
    double sum = n;
    for (int d = 1; d < n; ++d) sum += 2.0 * (n - d) * std::exp(-s2 * d / 2.0);
    const double expected = sum / (static_cast<double>(n) * n);
    const auto p = kp(n, s2, n);
    CHECK(std::abs(correlation_b_oracle(0, 0, 0, p) - expected) < 1e-12);
    CHECK(std::abs(correlation_b_fast(0, 0, 0, p) - expected) < 1e-12);
}

TEST_CASE("fast kernel against the literal double sum") {
    const int n = 32;
    for (int stride : {n, n + 3})
        for (int dtau = -3; dtau <= 3; ++dtau)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2) {
                    const auto p = kp(n, 0.02, stride);
                    const double diff = std::abs(correlation_b_fast(i1, i2, dtau, p) - correlation_b_oracle(i1, i2, dtau, p));
                    if (diff > 1e-12) FAIL_CHECK("i1=" << i1 << " i2=" << i2 << " dtau=" << dtau << " diff=" << diff);
                }
}

TEST_CASE("diagonal entries from lag multiplicities") {
    const int n = 24;
    const double s2 = 0.05;
    const auto p = kp(n, s2, n);
    for (int i = 0; i < n; ++i) {
        cd expected{0.0, 0.0};
        for (int d = -(n - 1); d <= n - 1; ++d)
            expected += static_cast<double>(n - std::abs(d)) * std::exp(-s2 * std::abs(d) / 2.0) *
                        std::polar(1.0, -2.0 * kPi * d * i / n);
        expected /= static_cast<double>(n) * n;
        CHECK(std::abs(correlation_b_fast(i, i, 0, p) - expected) < 1e-13);
    }
}

TEST_CASE("diagonal sums to one and strong noise flattens the CPE") {
    const int n = 48;
    const auto p = kp(n, 0.1, n);
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += correlation_b_fast(i, i, 0, p).real();
    CHECK(trace == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(correlation_b_fast(0, 0, 0, kp(n, 1e4, n)).real() == doctest::Approx(1.0 / n).epsilon(1e-12));
}

TEST_CASE("correlation table") {
    SimulationLayout y;
    SUBCASE("full-size key set covers every CPE lag") {
        const auto keys = cpe_and_diagonal_keys(y.num_subcarriers, y.block_symbols);
        const CorrelationTable t(kp(1200, 7e-4, 1200), keys);
        for (int d = -14; d <= 14; ++d) CHECK(t.contains(0, 0, d));
        CHECK_FALSE(t.contains(0, 0, 15));
        CHECK_THROWS_AS(t.at(1, 2, 0), std::logic_error);
        CHECK(t.contains(-1, -1, 0));
        CHECK(t.at(-1, -1, 0) == t.at(1199, 1199, 0));
    }
    SUBCASE("no phase noise means unit CPE at every lag") {
        const CorrelationTable t(kp(64, 0.0, 64), cpe_and_diagonal_keys(64, 6));
        for (int d = -5; d <= 5; ++d) CHECK(t.cpe(d) == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("cached entries equal fresh oracle calls") {
        std::mt19937 eng(4);
        std::uniform_int_distribution<int> idx(-32, 31), lag(-4, 4);
        std::vector<KernelKey> keys;
        for (int r = 0; r < 100; ++r) keys.push_back({idx(eng), idx(eng), lag(eng)});
        const auto p = kp(64, 0.01, 70);
        const CorrelationTable t(p, keys);
        for (const auto& k : keys) CHECK(std::abs(t.at(k.i1, k.i2, k.dtau) - correlation_b_oracle(k.i1, k.i2, k.dtau, p)) < 1e-12);
    }
}

TEST_CASE("symbol stride by mode") {
    SimulationLayout y;
    PnParams pn;
    CHECK(kernel_params(y, pn, StrideMode::fft_length).stride == 1200);
    CHECK(kernel_params(y, pn, StrideMode::cp_consistent).stride == 1284);
}

TEST_CASE("single-carrier surrogate versus the OFDM kernel") {
    const int n = 1200;
    const double s2 = 2 * 3.509e-4;
    const auto p = kp(n, s2, n);
    CHECK(single_carrier_cpe_correlation(s2, n, 0) == 1.0);
    CHECK(correlation_b_fast(0, 0, 0, p).real() < 1.0);
    // Beyond zero lag the averaged OFDM kernel decays more slowly than the sampled one.
    for (int d = 1; d <= 14; ++d)
        CHECK(correlation_b_fast(0, 0, d, p).real() >= single_carrier_cpe_correlation(s2, n, d));
    // At unit lag the ratio is the squared window average of exp(-s2 |x| / 2) over a symbol.
    double s = 0.0;
    for (int m = 0; m < n; ++m) s += std::exp(s2 * m / 2.0);
    const double ratio = correlation_b_fast(0, 0, 1, p).real() / single_carrier_cpe_correlation(s2, n, 1);
    double t = 0.0;
    for (int m = 0; m < n; ++m) t += std::exp(-s2 * m / 2.0);
    CHECK(ratio == doctest::Approx(s * t / (static_cast<double>(n) * n)).epsilon(1e-10));
}
