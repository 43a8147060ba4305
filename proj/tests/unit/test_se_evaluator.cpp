#include <doctest.h>

#include <cmath>

#include "pnsim/se_evaluator.hpp"

using namespace pnsim;

namespace {

NetworkRealization two_by_three() {
    NetworkRealization net;
    net.beta.resize(2, 3);
    net.beta << 1.0, 2.0, 3.0, 0.5, 0.25, 4.0;
    net.power = VectorXd(2);
    net.power << 0.1, 0.2;
    return net;
}

SinrAccumulator accumulate(const TrialTerms& t, int n) {
    SinrAccumulator acc;
    for (int i = 0; i < n; ++i) acc.add(t);
    return acc;
}

}  // namespace

TEST_CASE("ICI power per link") {
    const auto net = two_by_three();
    CHECK(lambda_ici(net, 1.0).isZero(0.0));
    const MatrixXd lam = lambda_ici(net, 0.75);
    CHECK(lam(1, 2) == doctest::Approx(0.2 * 4.0 * 0.25));
    auto doubled = net;
    doubled.power(0) *= 2.0;
    const MatrixXd lam2 = lambda_ici(doubled, 0.75);
    CHECK((lam2.row(0) - 2.0 * lam.row(0)).norm() < 1e-15);
    CHECK(lam2.row(1) == lam.row(1));

    const KernelParams kp{1200, 7e-4, 1200};
    double off_diagonal = 0.0;
    for (int i = 1; i < 1200; ++i) off_diagonal += correlation_b_fast(i, i, 0, kp).real();
    const double cpe = correlation_b_fast(0, 0, 0, kp).real();
    CHECK(lambda_ici(net, cpe)(0, 0) / (0.1 * 1.0) == doctest::Approx(off_diagonal).epsilon(1e-10));
}

TEST_CASE("per-trial terms by hand") {
    MatrixXcd v(2, 2), h(2, 2);
    v << cd(1, 0), cd(0, 1), cd(2, 0), cd(0, 0);
    h << cd(1, 1), cd(0, 2), cd(3, 0), cd(1, -1);  // rows are UEs
    VectorXd lam_sum(2), p(2);
    lam_sum << 0.5, 0.25;
    p << 1.0, 2.0;
    const auto t = trial_terms(v, h, lam_sum, p);
    // v_0 = (1, 2), h_0 = (1+j, 2j), h_1 = (3, 1-j).
    CHECK(std::abs(t[0].gain - cd(1, 5)) < 1e-15);
    CHECK(t[0].interference == doctest::Approx(26.0 + 2.0 * 29.0));
    CHECK(t[0].ici == doctest::Approx(0.5 + 4.0 * 0.25));
    CHECK(t[0].norm == doctest::Approx(5.0));
    // v_1 = (j, 0): v^H h_1 = -j * 3.
    CHECK(std::abs(t[1].gain - cd(0, -3)) < 1e-15);
    CHECK_THROWS_AS(trial_terms(v, h.leftCols(1), lam_sum, p), std::logic_error);
}

TEST_CASE("zero channel contributes nothing to the channel terms") {
    MatrixXcd v = MatrixXcd::Ones(3, 2);
    const auto t = trial_terms(v, MatrixXcd::Zero(2, 3), VectorXd::Zero(3), VectorXd::Ones(2));
    CHECK(t[0].gain == cd(0, 0));
    CHECK(t[0].interference == 0.0);
    CHECK(t[0].norm == 3.0);
}

TEST_CASE("accumulator means") {
    const TrialTerms t{cd(0.3, -0.1), 2.0, 0.1, 4.0};
    const auto one = finalize_sinr(accumulate(t, 1), 0.5, 0.2);
    const auto many = finalize_sinr(accumulate(t, 37), 0.5, 0.2);
    CHECK(many.sinr == doctest::Approx(one.sinr).epsilon(1e-14));
    SinrAccumulator a = accumulate(t, 3), b = accumulate(t, 4);
    a += b;
    CHECK(a.count == 7);
    a.remove(t);
    CHECK(finalize_sinr(a, 0.5, 0.2).sinr == doctest::Approx(one.sinr).epsilon(1e-14));
    CHECK_THROWS_AS(finalize_sinr(SinrAccumulator{}, 1.0, 1.0), std::logic_error);
}

TEST_CASE("SINR edge cases") {
    CHECK(finalize_sinr(accumulate(TrialTerms{cd(0, 0), 0.0, 0.0, 0.0}, 2), 1.0, 1.0).sinr == 0.0);
    // A Monte Carlo mean of |g|^2 below |mean g|^2 leaves a negative denominator.
    const auto bad = finalize_sinr(accumulate(TrialTerms{cd(2, 0), 1.0, 0.0, 0.0}, 1), 1.0, 0.0);
    CHECK_FALSE(bad.valid);
}

TEST_CASE("SINR ignores the combiner scale") {
    Rng rng(1);
    MatrixXcd v(4, 3), h(3, 4);
    for (int i = 0; i < 12; ++i) {
        v(i % 4, i / 4) = rng.complex_normal();
        h(i / 4, i % 4) = rng.complex_normal();
    }
    VectorXd lam = VectorXd::Constant(4, 0.1), p = VectorXd::Constant(3, 0.7);
    const MatrixXcd scaled = cd(-3.0, 4.0) * v;
    const auto a = trial_terms(v, h, lam, p);
    const auto b = trial_terms(scaled, h, lam, p);
    for (int k = 0; k < 3; ++k) {
        const double s1 = finalize_sinr(accumulate(a[k], 1), 0.7, 0.05).sinr;
        const double s2 = finalize_sinr(accumulate(b[k], 1), 0.7, 0.05).sinr;
        CHECK(s1 == doctest::Approx(s2).epsilon(1e-12));
    }
}

TEST_CASE("single-antenna matched filter bound") {
    // v = h_hat ~ CN(0, eps), h = h_hat + e, e ~ CN(0, c): E v^H h = eps, E|v^H h|^2 = 2 eps^2 + eps c.
    const double p = 0.1, beta = 2.0, eps = 1.5, c = beta - eps, noise = 0.3;
    const double expected = p * eps / (p * beta + noise);
    SinrAccumulator exact;
    exact.add(TrialTerms{cd(eps, 0.0), p * (2 * eps * eps + eps * c), 0.0, eps});
    CHECK(finalize_sinr(exact, p, noise).sinr == doctest::Approx(expected).epsilon(1e-14));

    Rng rng(99);
    SinrAccumulator mc;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        MatrixXcd v(1, 1), h(1, 1);
        v(0, 0) = rng.complex_normal(eps);
        h(0, 0) = v(0, 0) + rng.complex_normal(c);
        mc.add(trial_terms(v, h, VectorXd::Zero(1), VectorXd::Constant(1, p))[0]);
    }
    CHECK(finalize_sinr(mc, p, noise).sinr == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("block spectral efficiency") {
    CHECK(se_per_block({3.0, 3.0, 3.0}) == doctest::Approx(2.0));
    CHECK(se_per_block({0.0, 0.0}) == 0.0);
    CHECK(se_per_block({1.0, 3.0}) == doctest::Approx(1.5));
    CHECK(se_per_block({}) == 0.0);
}
