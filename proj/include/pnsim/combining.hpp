#pragma once

#include <string>
#include <vector>

#include "pnsim/network_model.hpp"
#include "pnsim/types.hpp"

namespace pnsim {

enum class Scheme { mr, lp_mmse, p_mmse, mmse };

std::string to_string(Scheme s);

/// Serving APs of UE k, ascending.
std::vector<int> cluster_of(const DccMatrix& serve, int k);

/// P_k = {i : D_k D_i != 0}, ascending.
std::vector<int> partial_set(const DccMatrix& serve, int k);

/// One symbol's inputs: h_hat and the error variances c, both K x L.
struct CombinerInputs {
    const MatrixXcd& h_hat;
    const MatrixXd& err;
    const NetworkRealization& net;
};

VectorXcd combine_mr(const CombinerInputs& in, int k);

/// v_{k,l} = p_k h_hat_{k,l} / (sum_{i in D_l} p_i (|h_hat_{i,l}|^2 + c_{i,l}) + sigma^2).
cd lp_mmse_entry(const CombinerInputs& in, int k, int l);
VectorXcd combine_lp_mmse(const CombinerInputs& in, int k);

VectorXcd combine_p_mmse(const CombinerInputs& in, int k);
VectorXcd combine_mmse(const CombinerInputs& in, int k);

/// Combiners of all UEs as the columns of an L x K matrix. Centralized schemes factor one
/// matrix per distinct cluster and reuse it for every UE sharing that cluster.
struct CombinerSet {
    MatrixXcd v;
    int pseudo_inverse_fallbacks = 0;
};

CombinerSet combine_all(Scheme scheme, const CombinerInputs& in);

}  // namespace pnsim
