#include "pnsim/channel_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>

#include <unsupported/Eigen/FFT>

namespace pnsim {
namespace {

int wrap(long long i, int n) {
    const long long r = i % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

// Zero-padded spectrum of alpha(x) = exp(-j 2 pi x n / N) sum_j a_j exp(j 2 pi x j / N).
VectorXcd padded_spectrum(const VectorXcd& a, int n_anchor, Eigen::FFT<double>& fft) {
    const int n = static_cast<int>(a.size());
    VectorXcd alpha(n);
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    fft.inv(alpha, a);
    fft.ClearFlag(Eigen::FFT<double>::Unscaled);
    VectorXcd padded = VectorXcd::Zero(2 * n);
    for (int x = 0; x < n; ++x)
        padded(x) = alpha(x) * std::polar(1.0, -2.0 * kPi * wrap(static_cast<long long>(x) * n_anchor, n) / n);
    VectorXcd spec(2 * n);
    fft.fwd(spec, padded);
    return spec;
}

// sum_{j1, j2} a_{j1} conj(b_{j2}) B_{n1 - j1, n2 - j2}^{(dtau)} from the two padded spectra.
cd bilinear_kernel_sum(const VectorXcd& spec_a, const VectorXcd& spec_b, int dtau, const KernelParams& kp,
                       Eigen::FFT<double>& fft) {
    const int n = kp.num_subcarriers;
    const int m = 2 * n;
    const VectorXcd prod = spec_a.cwiseProduct(spec_b.conjugate());
    VectorXcd corr(m);
    fft.inv(corr, prod);
    cd acc{0.0, 0.0};
    for (int d = -(n - 1); d <= n - 1; ++d) {
        const double w = std::exp(-0.5 * kp.sigma2_total * std::abs(static_cast<double>(dtau) * kp.stride + d));
        acc += w * corr((d + m) % m);
    }
    return acc / (static_cast<double>(n) * n);
}

IciCovariance ici_as_printed(const SimulationLayout& layout, const PilotBook& book, const KernelParams& kp) {
    const int n = kp.num_subcarriers;
    const int tau_p = layout.pilot_length;
    const int num_pilots = static_cast<int>(book.sequences.cols());
    const auto positions = layout.pilot_positions();
    const auto pilot_sc = layout.pilot_subcarriers_all_blocks();
    const std::set<int> pilot_set(pilot_sc.begin(), pilot_sc.end());

    Eigen::FFT<double> fft;
    std::vector<VectorXcd> data_spec(tau_p);
    std::vector<std::vector<VectorXcd>> pilot_spec(num_pilots, std::vector<VectorXcd>(tau_p));
    for (int m = 0; m < tau_p; ++m) {
        const int anchor = positions[m].subcarrier;
        VectorXcd d = VectorXcd::Zero(n);
        for (int j = 0; j < n; ++j)
            if (!pilot_set.count(j)) d(j) = 1.0;
        data_spec[m] = padded_spectrum(d, anchor, fft);
        for (int t = 0; t < num_pilots; ++t) {
            VectorXcd a = VectorXcd::Zero(n);
            for (int j : pilot_sc) {
                if (j == anchor) continue;
                const int idx = pilot_sample_index(layout, j % layout.block_subcarriers, positions[m].symbol);
                a(j) = book.sequences(idx, t);
            }
            pilot_spec[t][m] = padded_spectrum(a, anchor, fft);
        }
    }

    MatrixXcd data_part(tau_p, tau_p);
    for (int m1 = 0; m1 < tau_p; ++m1)
        for (int m2 = m1; m2 < tau_p; ++m2) {
            const int dtau = positions[m1].symbol - positions[m2].symbol;
            data_part(m1, m2) = bilinear_kernel_sum(data_spec[m1], data_spec[m2], dtau, kp, fft);
            data_part(m2, m1) = std::conj(data_part(m1, m2));
        }

    IciCovariance cov;
    for (int t = 0; t < num_pilots; ++t) {
        MatrixXcd xi(tau_p, tau_p);
        for (int m1 = 0; m1 < tau_p; ++m1)
            for (int m2 = m1; m2 < tau_p; ++m2) {
                const int dtau = positions[m1].symbol - positions[m2].symbol;
                xi(m1, m2) = bilinear_kernel_sum(pilot_spec[t][m1], pilot_spec[t][m2], dtau, kp, fft);
                xi(m2, m1) = std::conj(xi(m1, m2));
            }
        cov.per_pilot.push_back(xi + data_part);
    }
    return cov;
}

IciCovariance ici_independent_data(const SimulationLayout& layout, const PilotBook& book, const KernelParams& kp) {
    const int n = kp.num_subcarriers;
    const int n_c = layout.block_subcarriers;
    const int tau_p = layout.pilot_length;
    const int num_pilots = static_cast<int>(book.sequences.cols());
    const auto positions = layout.pilot_positions();
    const auto pilot_sc = layout.pilot_subcarriers_all_blocks();
    const std::set<int> pilot_set(pilot_sc.begin(), pilot_sc.end());

    const KernelEvaluator eval(kp);
    std::map<std::tuple<int, int, int>, cd> cache;
    auto kernel = [&](long long i1, long long i2, int dtau) {
        const auto key = std::make_tuple(wrap(i1, n), wrap(i2, n), dtau);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        return cache.emplace(key, eval(std::get<0>(key), std::get<1>(key), dtau)).first->second;
    };

    std::map<std::pair<int, int>, cd> data_cache;
    auto data_term = [&](int n1, int n2) {
        const auto key = std::make_pair(n1, n2);
        auto it = data_cache.find(key);
        if (it != data_cache.end()) return it->second;
        cd acc{0.0, 0.0};
        for (int j = 0; j < n; ++j)
            if (!pilot_set.count(j)) acc += eval(wrap(n1 - j, n), wrap(n2 - j, n), 0);
        return data_cache.emplace(key, acc).first->second;
    };

    IciCovariance cov;
    for (int t = 0; t < num_pilots; ++t) {
        MatrixXcd xi = MatrixXcd::Zero(tau_p, tau_p);
        for (int m1 = 0; m1 < tau_p; ++m1)
            for (int m2 = m1; m2 < tau_p; ++m2) {
                const int n1 = positions[m1].subcarrier;
                const int n2 = positions[m2].subcarrier;
                const int dtau = positions[m1].symbol - positions[m2].symbol;
                cd acc{0.0, 0.0};
                for (int r = 0; r < layout.num_blocks(); ++r)
                    for (int a : layout.pilot_subcarriers)
                        for (int b : layout.pilot_subcarriers) {
                            const int j1 = r * n_c + a;
                            const int j2 = r * n_c + b;
                            if (j1 >= n || j2 >= n || j1 == n1 || j2 == n2) continue;
                            const cd s1 = book.sequences(pilot_sample_index(layout, a, positions[m1].symbol), t);
                            const cd s2 = book.sequences(pilot_sample_index(layout, b, positions[m2].symbol), t);
                            acc += s1 * std::conj(s2) * kernel(n1 - j1, n2 - j2, dtau);
                        }
                if (dtau == 0) acc += data_term(n1, n2);
                xi(m1, m2) = acc;
                xi(m2, m1) = std::conj(acc);
            }
        cov.per_pilot.push_back(std::move(xi));
    }
    return cov;
}

}  // namespace

IciCovariance build_ici_covariance(const SimulationLayout& layout, const PilotBook& book,
                                   const KernelParams& kernel, IciModel model) {
    return model == IciModel::as_printed ? ici_as_printed(layout, book, kernel)
                                         : ici_independent_data(layout, book, kernel);
}

std::vector<MatrixXcd> build_z_ici(const NetworkRealization& net, const IciCovariance& cov) {
    const int tau_p = cov.per_pilot.empty() ? 0 : static_cast<int>(cov.per_pilot.front().rows());
    std::vector<MatrixXcd> z(net.num_aps(), MatrixXcd::Zero(tau_p, tau_p));
    for (int l = 0; l < net.num_aps(); ++l)
        for (int k = 0; k < net.num_ues(); ++k) z[l] += net.power(k) * net.beta(k, l) * cov.per_pilot[net.pilot[k]];
    return z;
}

EstimatorContext::EstimatorContext(const NetworkRealization& net, const SimulationLayout& layout,
                                   const PilotBook& book, Estimator kind, const CorrelationTable& table,
                                   double sigma2_total, const std::vector<MatrixXcd>* z_ici)
    : kind_(kind),
      tau_p_(layout.pilot_length),
      tau_c_(layout.block_symbols),
      num_pilots_(static_cast<int>(book.sequences.cols())),
      pilot_(net.pilot),
      power_(net.power),
      beta_(net.beta) {
    const int K = net.num_ues();
    const int L = net.num_aps();
    for (int d = -(tau_c_ - 1); d <= tau_c_ - 1; ++d) {
        switch (kind_) {
            case Estimator::pna_ofdm: weight_.push_back(table.cpe(d)); break;
            case Estimator::pna_sc:
                weight_.push_back(single_carrier_cpe_correlation(sigma2_total, layout.num_subcarriers, d));
                break;
            case Estimator::unaware: weight_.push_back(1.0); break;
        }
    }

    const auto positions = layout.pilot_positions();
    std::vector<MatrixXcd> phi(num_pilots_, MatrixXcd(tau_p_, tau_p_));
    for (int t = 0; t < num_pilots_; ++t)
        for (int m1 = 0; m1 < tau_p_; ++m1)
            for (int m2 = 0; m2 < tau_p_; ++m2)
                phi[t](m1, m2) = book.sequences(m1, t) * std::conj(book.sequences(m2, t)) *
                                 cpe_weight(positions[m1].symbol - positions[m2].symbol);

    MatrixXcd cross(tau_p_, num_pilots_ * tau_c_);
    for (int t = 0; t < num_pilots_; ++t)
        for (int tau = 0; tau < tau_c_; ++tau)
            for (int m = 0; m < tau_p_; ++m)
                cross(m, t * tau_c_ + tau) = cpe_weight(tau - positions[m].symbol) * book.sequences(m, t);

    const bool with_ici = kind_ == Estimator::pna_ofdm && z_ici != nullptr;
    psi_.reserve(L);
    filter_.reserve(L);
    for (int l = 0; l < L; ++l) {
        MatrixXcd psi = net.noise_power * MatrixXcd::Identity(tau_p_, tau_p_);
        for (int k = 0; k < K; ++k) psi += net.power(k) * net.beta(k, l) * phi[pilot_[k]];
        if (with_ici) psi += (*z_ici)[l];
        Eigen::LLT<MatrixXcd> llt(psi);
        if (llt.info() != Eigen::Success) throw NumericalError("estimator: Psi is not positive definite at AP " +
                                                               std::to_string(l));
        filter_.push_back(llt.solve(cross));
        psi_.push_back(std::move(psi));
    }

    eps_.assign(tau_c_, MatrixXd(K, L));
    err_.assign(tau_c_, MatrixXd(K, L));
    for (int tau = 0; tau < tau_c_; ++tau)
        for (int l = 0; l < L; ++l)
            for (int k = 0; k < K; ++k) {
                const int col = pilot_[k] * tau_c_ + tau;
                const double quad = cross.col(col).dot(filter_[l].col(col)).real();
                const double b = beta_(k, l);
                eps_[tau](k, l) = power_(k) * b * b * quad;
                err_[tau](k, l) = b - eps_[tau](k, l);
            }
}

cd EstimatorContext::estimate(const VectorXcd& y, int k, int l, int tau) const {
    return std::sqrt(power_(k)) * beta_(k, l) * filter_[l].col(pilot_[k] * tau_c_ + tau).dot(y);
}

EstimateSet EstimatorContext::estimate_all(const std::vector<PilotObservation>& obs) const {
    const int K = static_cast<int>(beta_.rows());
    const int L = static_cast<int>(beta_.cols());
    EstimateSet out;
    out.h_hat.assign(tau_c_, MatrixXcd(K, L));
    for (int l = 0; l < L; ++l) {
        // Row (t, tau) of filter^H y_l is shared by every UE on pilot t.
        const VectorXcd proj = filter_[l].adjoint() * obs[l].y;
        for (int tau = 0; tau < tau_c_; ++tau)
            for (int k = 0; k < K; ++k)
                out.h_hat[tau](k, l) = std::sqrt(power_(k)) * beta_(k, l) * proj(pilot_[k] * tau_c_ + tau);
    }
    return out;
}

}  // namespace pnsim
