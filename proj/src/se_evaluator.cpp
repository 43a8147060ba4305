#include "pnsim/se_evaluator.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pnsim {

MatrixXd lambda_ici(const NetworkRealization& net, double cpe_power) {
    return (net.power.asDiagonal() * net.beta) * (1.0 - cpe_power);
}

std::vector<TrialTerms> trial_terms(const MatrixXcd& v, const MatrixXcd& h_eff, const VectorXd& lambda_sum,
                                    const VectorXd& power) {
    if (v.rows() != h_eff.cols() || v.cols() != h_eff.rows() || lambda_sum.size() != v.rows())
        throw std::logic_error("trial_terms: dimension mismatch");
    const MatrixXcd g = v.adjoint() * h_eff.transpose();  // (k, i) = v_k^H h_i
    const int K = static_cast<int>(v.cols());
    std::vector<TrialTerms> out(K);
    for (int k = 0; k < K; ++k) {
        out[k].gain = g(k, k);
        out[k].interference = (g.row(k).cwiseAbs2().transpose().array() * power.array()).sum();
        out[k].ici = (v.col(k).cwiseAbs2().array() * lambda_sum.array()).sum();
        out[k].norm = v.col(k).squaredNorm();
    }
    return out;
}

void SinrAccumulator::add(const TrialTerms& t) {
    gain += t.gain;
    interference += t.interference;
    ici += t.ici;
    norm += t.norm;
    ++count;
}

void SinrAccumulator::remove(const TrialTerms& t) {
    gain -= t.gain;
    interference -= t.interference;
    ici -= t.ici;
    norm -= t.norm;
    --count;
}

SinrAccumulator& SinrAccumulator::operator+=(const SinrAccumulator& o) {
    gain += o.gain;
    interference += o.interference;
    ici += o.ici;
    norm += o.norm;
    count += o.count;
    return *this;
}

SinrValue finalize_sinr(const SinrAccumulator& acc, double power, double noise_power) {
    if (acc.count <= 0) throw std::logic_error("finalize_sinr: no trials accumulated");
    const double n = static_cast<double>(acc.count);
    const double signal = power * std::norm(acc.gain / n);
    const double denom = acc.interference / n - signal + acc.ici / n + noise_power * acc.norm / n;
    if (signal == 0.0) return {0.0, true};
    if (!(denom > 0.0)) return {0.0, false};
    return {signal / denom, true};
}

double se_per_block(const std::vector<double>& sinr) {
    if (sinr.empty()) return 0.0;
    double acc = 0.0;
    for (double s : sinr) acc += se_of(s);
    return acc / static_cast<double>(sinr.size());
}

}  // namespace pnsim
