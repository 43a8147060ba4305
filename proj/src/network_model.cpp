#include "pnsim/network_model.hpp"

#include "pnsim/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace pnsim {

double Propagation::noise_power(double bandwidth_hz) const {
    const double dbm = -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

NodePositions place_nodes(const SimulationLayout& layout, std::uint64_t seed) {
    Rng rng(seed);
    NodePositions pos;
    pos.ap.resize(2, layout.num_aps);
    pos.ue.resize(2, layout.num_ues);
    for (int l = 0; l < layout.num_aps; ++l)
        for (int d = 0; d < 2; ++d) pos.ap(d, l) = rng.uniform(0.0, layout.area_side);
    for (int k = 0; k < layout.num_ues; ++k)
        for (int d = 0; d < 2; ++d) pos.ue(d, k) = rng.uniform(0.0, layout.area_side);
    return pos;
}

double link_distance(const Eigen::Vector2d& ue, const Eigen::Vector2d& ap, double side, bool wraparound) {
    Eigen::Vector2d diff = ue - ap;
    if (wraparound)
        for (int d = 0; d < 2; ++d) diff(d) -= side * std::round(diff(d) / side);
    return diff.norm();
}

MatrixXd large_scale_fading(const NodePositions& pos, double side, const Propagation& prop,
                            std::uint64_t seed) {
    Rng rng(seed);
    const auto K = pos.ue.cols();
    const auto L = pos.ap.cols();
    MatrixXd beta(K, L);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index l = 0; l < L; ++l) {
            const double d = std::max(prop.min_distance,
                                      link_distance(pos.ue.col(k), pos.ap.col(l), side, prop.wraparound));
            const double shadow = prop.shadow_sigma_db > 0 ? rng.normal(prop.shadow_sigma_db) : 0.0;
            const double gain_db = prop.pathloss_intercept_db - prop.pathloss_slope_db * std::log10(d) + shadow;
            beta(k, l) = std::pow(10.0, gain_db / 10.0);
        }
    return beta;
}

std::vector<int> assign_pilots(const MatrixXd& beta, int tau_p, PilotPolicy policy) {
    const int K = static_cast<int>(beta.rows());
    std::vector<int> pilot(K, 0);
    if (policy == PilotPolicy::round_robin) {
        for (int k = 0; k < K; ++k) pilot[k] = k % tau_p;
        return pilot;
    }

    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return beta.row(a).maxCoeff() > beta.row(b).maxCoeff();
    });
    std::vector<bool> assigned(K, false);
    for (int k : order) {
        Eigen::Index master = 0;
        beta.row(k).maxCoeff(&master);
        std::vector<double> contamination(tau_p, 0.0);
        for (int i = 0; i < K; ++i)
            if (assigned[i]) contamination[pilot[i]] += beta(i, master);
        pilot[k] = static_cast<int>(std::min_element(contamination.begin(), contamination.end()) -
                                    contamination.begin());
        assigned[k] = true;
    }
    return pilot;
}

DccMatrix form_dcc(const MatrixXd& beta, const std::vector<int>& pilot) {
    const int K = static_cast<int>(beta.rows());
    const int L = static_cast<int>(beta.cols());
    const int tau_p = pilot.empty() ? 0 : *std::max_element(pilot.begin(), pilot.end()) + 1;
    DccMatrix serve = DccMatrix::Constant(K, L, false);

    for (int l = 0; l < L; ++l)
        for (int t = 0; t < tau_p; ++t) {
            int best = -1;
            for (int k = 0; k < K; ++k)
                if (pilot[k] == t && (best < 0 || beta(k, l) > beta(best, l))) best = k;
            if (best >= 0) serve(best, l) = true;
        }
    for (int k = 0; k < K; ++k) {
        Eigen::Index master = 0;
        beta.row(k).maxCoeff(&master);
        serve(k, master) = true;
    }
    return serve;
}

ChannelRealization gen_channel(const MatrixXd& beta, int num_blocks, Rng& rng) {
    ChannelRealization ch;
    ch.blocks.resize(num_blocks);
    for (auto& h : ch.blocks) {
        h.resize(beta.rows(), beta.cols());
        for (Eigen::Index l = 0; l < beta.cols(); ++l)
            for (Eigen::Index k = 0; k < beta.rows(); ++k) h(k, l) = rng.complex_normal(beta(k, l));
    }
    return ch;
}

FirChannel gen_fir_channel(const MatrixXd& beta, int num_taps, Rng& rng) {
    VectorXd pdp(num_taps);
    for (int q = 0; q < num_taps; ++q) pdp(q) = std::exp(-static_cast<double>(q) / 2.0);
    pdp /= pdp.sum();
    FirChannel fir;
    fir.taps.resize(num_taps);
    for (int q = 0; q < num_taps; ++q) {
        auto& h = fir.taps[q];
        h.resize(beta.rows(), beta.cols());
        for (Eigen::Index l = 0; l < beta.cols(); ++l)
            for (Eigen::Index k = 0; k < beta.rows(); ++k) h(k, l) = rng.complex_normal(pdp(q) * beta(k, l));
    }
    return fir;
}

NetworkRealization make_network(const SimulationLayout& layout, const Propagation& prop, PilotPolicy policy,
                                std::uint64_t seed) {
    NetworkRealization net;
    net.positions = place_nodes(layout, derive_seed(seed, 0, 0, "positions"));
    net.beta = large_scale_fading(net.positions, layout.area_side, prop, derive_seed(seed, 0, 0, "shadowing"));
    net.pilot = assign_pilots(net.beta, layout.pilot_length, policy);
    net.serve = form_dcc(net.beta, net.pilot);
    net.power = VectorXd::Constant(layout.num_ues, prop.ue_power);
    net.noise_power = prop.noise_power(layout.bandwidth());
    return net;
}

void write_geometry_csv(std::ostream& os, const NodePositions& pos) {
    os << "node_type,index,x_m,y_m\n";
    auto emit = [&](const char* type, const Eigen::Matrix2Xd& m) {
        for (Eigen::Index i = 0; i < m.cols(); ++i)
            os << type << ',' << i << ',' << csv_number(m(0, i)) << ',' << csv_number(m(1, i)) << '\n';
    };
    emit("ap", pos.ap);
    emit("ue", pos.ue);
}

}  // namespace pnsim
