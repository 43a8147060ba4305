#pragma once

#include <vector>

#include "pnsim/network_model.hpp"
#include "pnsim/phase_noise.hpp"
#include "pnsim/types.hpp"

namespace pnsim {

/// lambda_{i,l} = p_i beta_{i,l} (1 - B_{0,0}^{(0)}), K x L.
MatrixXd lambda_ici(const NetworkRealization& net, double cpe_power);
inline MatrixXd lambda_ici(const NetworkRealization& net, const CorrelationTable& table) {
    return lambda_ici(net, table.cpe(0));
}

/// One trial's contribution to the SINR expectations of one (UE, symbol).
struct TrialTerms {
    cd gain;              // v^H h_k
    double interference;  // sum_i p_i |v^H h_i|^2
    double ici;           // sum_l |v_l|^2 sum_i lambda_{i,l}
    double norm;          // ||v||^2
};

/// Terms for every UE at one symbol. `v` is L x K (one combiner per column), `h_eff` the
/// K x L effective channels, `lambda_sum` the column sums of lambda.
std::vector<TrialTerms> trial_terms(const MatrixXcd& v, const MatrixXcd& h_eff, const VectorXd& lambda_sum,
                                    const VectorXd& power);

/// Running sums of TrialTerms; merging is plain addition.
struct SinrAccumulator {
    cd gain{0.0, 0.0};
    double interference = 0.0;
    double ici = 0.0;
    double norm = 0.0;
    long long count = 0;

    void add(const TrialTerms& t);
    void remove(const TrialTerms& t);
    SinrAccumulator& operator+=(const SinrAccumulator& o);
};

struct SinrValue {
    double sinr = 0.0;
    bool valid = true;  // false when the Monte Carlo denominator came out <= 0
};

/// p_k |E g|^2 / (E I - p_k |E g|^2 + E ici + sigma^2 E ||v||^2).
SinrValue finalize_sinr(const SinrAccumulator& acc, double power, double noise_power);

/// Mean over symbols of log2(1 + SINR).
double se_per_block(const std::vector<double>& sinr);

inline double se_of(double sinr) { return std::log2(1.0 + sinr); }

}  // namespace pnsim
