#include "pnsim/combining.hpp"

#include <map>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace pnsim {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::mr: return "mr";
        case Scheme::lp_mmse: return "lp_mmse";
        case Scheme::p_mmse: return "p_mmse";
        case Scheme::mmse: return "mmse";
    }
    return "?";
}

std::vector<int> cluster_of(const DccMatrix& serve, int k) {
    std::vector<int> s;
    for (Eigen::Index l = 0; l < serve.cols(); ++l)
        if (serve(k, l)) s.push_back(static_cast<int>(l));
    return s;
}

std::vector<int> partial_set(const DccMatrix& serve, int k) {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < serve.rows(); ++i)
        if ((serve.row(i) && serve.row(k)).any()) out.push_back(static_cast<int>(i));
    return out;
}

VectorXcd combine_mr(const CombinerInputs& in, int k) {
    VectorXcd v = VectorXcd::Zero(in.net.num_aps());
    for (int l : cluster_of(in.net.serve, k)) v(l) = in.h_hat(k, l);
    return v;
}

cd lp_mmse_entry(const CombinerInputs& in, int k, int l) {
    double denom = in.net.noise_power;
    for (int i = 0; i < in.net.num_ues(); ++i)
        if (in.net.serve(i, l)) denom += in.net.power(i) * (std::norm(in.h_hat(i, l)) + in.err(i, l));
    return in.net.power(k) * in.h_hat(k, l) / denom;
}

VectorXcd combine_lp_mmse(const CombinerInputs& in, int k) {
    VectorXcd v = VectorXcd::Zero(in.net.num_aps());
    for (int l : cluster_of(in.net.serve, k)) v(l) = lp_mmse_entry(in, k, l);
    return v;
}

namespace {

// Solves (sum_{i in users} p_i h_i h_i^H + diag(sum_{i in users} p_i c_i) + sigma^2 I) x = p_k h_k
// on the AP subset `aps` for every k in `targets`; columns of the result follow `targets`.
MatrixXcd centralized_solve(const CombinerInputs& in, const std::vector<int>& aps, const std::vector<int>& users,
                            const std::vector<int>& targets, int& fallbacks) {
    const int s = static_cast<int>(aps.size());
    const int u = static_cast<int>(users.size());
    MatrixXcd hs(s, u);
    VectorXd dg = VectorXd::Constant(s, in.net.noise_power);
    VectorXd p(u);
    for (int b = 0; b < u; ++b) {
        const int i = users[b];
        p(b) = in.net.power(i);
        for (int a = 0; a < s; ++a) {
            hs(a, b) = in.h_hat(i, aps[a]);
            dg(a) += p(b) * in.err(i, aps[a]);
        }
    }
    MatrixXcd rhs(s, targets.size());
    for (std::size_t c = 0; c < targets.size(); ++c)
        for (int a = 0; a < s; ++a) rhs(a, c) = in.net.power(targets[c]) * in.h_hat(targets[c], aps[a]);

    if (s > u && (p.array() > 0).all()) {
        // Woodbury: the u x u capacitance matrix is the only factorization needed.
        const VectorXd dinv = dg.cwiseInverse();
        const MatrixXcd scaled = dinv.asDiagonal() * hs;
        MatrixXcd cap = hs.adjoint() * scaled;
        cap.diagonal() += p.cwiseInverse().cast<cd>();
        Eigen::LLT<MatrixXcd> llt(cap);
        if (llt.info() == Eigen::Success) {
            const MatrixXcd x0 = dinv.asDiagonal() * rhs;
            return x0 - scaled * llt.solve(hs.adjoint() * x0);
        }
    } else {
        MatrixXcd a = hs * p.cast<cd>().asDiagonal() * hs.adjoint();
        a.diagonal() += dg.cast<cd>();
        Eigen::LLT<MatrixXcd> llt(a);
        if (llt.info() == Eigen::Success) return llt.solve(rhs);
    }
    ++fallbacks;
    MatrixXcd a = hs * p.cast<cd>().asDiagonal() * hs.adjoint();
    a.diagonal() += dg.cast<cd>();
    return Eigen::CompleteOrthogonalDecomposition<MatrixXcd>(a).pseudoInverse() * rhs;
}

std::vector<int> all_users(int K) {
    std::vector<int> out(K);
    for (int k = 0; k < K; ++k) out[k] = k;
    return out;
}

VectorXcd embed(const MatrixXcd& col, const std::vector<int>& aps, int L) {
    VectorXcd v = VectorXcd::Zero(L);
    for (std::size_t a = 0; a < aps.size(); ++a) v(aps[a]) = col(a);
    return v;
}

}  // namespace

VectorXcd combine_p_mmse(const CombinerInputs& in, int k) {
    int fallbacks = 0;
    const auto aps = cluster_of(in.net.serve, k);
    const MatrixXcd x = centralized_solve(in, aps, partial_set(in.net.serve, k), {k}, fallbacks);
    return embed(x, aps, in.net.num_aps());
}

VectorXcd combine_mmse(const CombinerInputs& in, int k) {
    int fallbacks = 0;
    const auto aps = cluster_of(in.net.serve, k);
    const MatrixXcd x = centralized_solve(in, aps, all_users(in.net.num_ues()), {k}, fallbacks);
    return embed(x, aps, in.net.num_aps());
}

CombinerSet combine_all(Scheme scheme, const CombinerInputs& in) {
    const int K = in.net.num_ues();
    const int L = in.net.num_aps();
    CombinerSet out;
    out.v = MatrixXcd::Zero(L, K);
    if (scheme == Scheme::mr || scheme == Scheme::lp_mmse) {
        for (int k = 0; k < K; ++k) out.v.col(k) = scheme == Scheme::mr ? combine_mr(in, k) : combine_lp_mmse(in, k);
        return out;
    }

    std::map<std::vector<int>, std::vector<int>> groups;
    for (int k = 0; k < K; ++k) groups[cluster_of(in.net.serve, k)].push_back(k);
    const auto everyone = all_users(K);
    for (const auto& [aps, members] : groups) {
        const auto users = scheme == Scheme::mmse ? everyone : partial_set(in.net.serve, members.front());
        const MatrixXcd x = centralized_solve(in, aps, users, members, out.pseudo_inverse_fallbacks);
        for (std::size_t c = 0; c < members.size(); ++c) out.v.col(members[c]) = embed(x.col(c), aps, L);
    }
    return out;
}

}  // namespace pnsim
