#pragma once

#include <vector>

#include <Eigen/Cholesky>

#include "pnsim/layout.hpp"
#include "pnsim/network_model.hpp"
#include "pnsim/ofdm_signal.hpp"
#include "pnsim/phase_noise.hpp"
#include "pnsim/types.hpp"

namespace pnsim {

enum class Estimator {
    pna_ofdm,  ///< OFDM kernel B for the CPE weights plus the ICI covariance
    pna_sc,    ///< single-carrier drift correlation, no ICI term
    unaware    ///< unit weights, no ICI term
};

enum class IciModel {
    as_printed,       ///< every (j1, j2) pair, channel gain shared by all blocks
    independent_data  ///< data pairs only at j1 = j2 in the same symbol, pilot pairs only inside one block
};

/// ICI covariance per pilot sequence, before the per-link p_k beta_{k,l} weighting.
///
/// Entry (m1, m2) of `per_pilot[t]` is the covariance between the ICI hitting pilot samples
/// m1 and m2 when a unit-gain UE transmits pilot t. Independent of the geometry.
struct IciCovariance {
    std::vector<MatrixXcd> per_pilot;
};

IciCovariance build_ici_covariance(const SimulationLayout& layout, const PilotBook& book,
                                   const KernelParams& kernel, IciModel model);

/// Z_l = sum_k p_k beta_{k,l} per_pilot[t_k], one tau_p x tau_p matrix per AP.
std::vector<MatrixXcd> build_z_ici(const NetworkRealization& net, const IciCovariance& cov);

/// Per-symbol estimates of every link's effective channel and their statistics.
struct EstimateSet {
    std::vector<MatrixXcd> h_hat;  // per symbol: K x L
};

/// Statistics-only part of the estimator: Psi_l, its factorization and the precomputed
/// filters Psi_l^{-1} b_{t,tau}. Immutable once built; shared across trials.
class EstimatorContext {
public:
    EstimatorContext(const NetworkRealization& net, const SimulationLayout& layout, const PilotBook& book,
                     Estimator kind, const CorrelationTable& table, double sigma2_total,
                     const std::vector<MatrixXcd>* z_ici = nullptr);

    Estimator kind() const { return kind_; }
    int pilot_length() const { return tau_p_; }
    int num_symbols() const { return tau_c_; }

    /// Weight the estimator assigns to a CPE lag (B_{0,0}, its single-carrier surrogate, or 1).
    double cpe_weight(int dtau) const { return weight_[dtau + tau_c_ - 1]; }

    const MatrixXcd& psi(int l) const { return psi_[l]; }

    /// sqrt(p_k) beta_{k,l} b_{t_k,tau}^H Psi_l^{-1} y_l.
    cd estimate(const VectorXcd& y, int k, int l, int tau) const;

    /// Estimate variance epsilon and error variance c = beta - epsilon.
    double eps(int k, int l, int tau) const { return eps_[tau](k, l); }
    double err(int k, int l, int tau) const { return err_[tau](k, l); }
    const MatrixXd& err(int tau) const { return err_[tau]; }

    EstimateSet estimate_all(const std::vector<PilotObservation>& obs) const;

private:
    Estimator kind_;
    int tau_p_;
    int tau_c_;
    int num_pilots_;
    std::vector<int> pilot_;
    VectorXd power_;
    MatrixXd beta_;
    std::vector<double> weight_;
    std::vector<MatrixXcd> psi_;
    std::vector<MatrixXcd> filter_;  // per AP: tau_p x (num_pilots * tau_c), column t * tau_c + tau
    std::vector<MatrixXd> eps_;      // per symbol: K x L
    std::vector<MatrixXd> err_;
};

}  // namespace pnsim
