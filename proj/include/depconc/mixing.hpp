#ifndef DEPCONC_MIXING_HPP
#define DEPCONC_MIXING_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

namespace depconc {

enum class RateKind { Exponential, Polynomial, Tabulated };

/// Parametric decay model for a dependence coefficient Phi(k), k >= 1.
///
/// Exponential:  Phi(k) = chi * exp(-(theta*k)^gamma)
/// Polynomial:   Phi(k) = rho * k^(-gamma)
/// Tabulated:    explicit values for lags 1..m, no extrapolation.
class MixingRate {
public:
    static MixingRate exponential(double chi, double theta, double gamma);
    static MixingRate polynomial(double rho, double gamma);
    static MixingRate tabulated(std::vector<double> phi_by_lag);
    /// Two-column CSV "k,phi"; lags must be 1..m in order.
    static MixingRate from_csv(const std::filesystem::path& file);
    /// Independent data: Phi == 0.
    static MixingRate zero();

    /// Phi(k) for integer lag k >= 1.
    double operator()(long k) const;
    /// Continuous extension Phi(t), t >= 1 (parametric kinds only).
    double at_real(double t) const;

    RateKind kind() const { return kind_; }
    double chi() const { return chi_; }
    double theta() const { return theta_; }
    double gamma() const { return gamma_; }
    double rho() const { return rho_; }
    long table_size() const { return static_cast<long>(table_.size()); }

private:
    MixingRate() = default;
    RateKind kind_ = RateKind::Exponential;
    double chi_ = 0, theta_ = 1, gamma_ = 1, rho_ = 0;
    std::vector<double> table_;
};

enum class FunctionClass { Lipschitz, BoundedVariation };

/// Seminorm bounds (C1 for unit-dual linear forms, C2 for the squared norm)
/// on the ball of radius c.
struct SeminormConstants {
    FunctionClass class_id;
    double C1;
    double C2;
    double ball_radius_c;
};

SeminormConstants seminorm_constants(FunctionClass class_id, double ball_radius_c);

/// Geometric dependence bound for a linear contraction autoregression:
/// rho_norm^s * sup_norm, doubled when `conservative` is set.
double ar1_tau_bound(double rho_norm, double sup_norm, long s, bool conservative = false);

/// Stationary law of a row-stochastic matrix. Throws when the stationary
/// law is not unique (eigenvalue-1 multiplicity > 1 / disagreeing
/// power-iteration limits).
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P);

/// Exact lag-k coefficient for the Lipschitz test class on a finite real
/// chain: max over start states of the Wasserstein-1 distance between
/// P^k(s,.) and the stationary law, computed as the integral of |CDF
/// difference| between consecutive states.
double chain_tau_exact(const std::vector<double>& states, const Eigen::MatrixXd& P, long k);

/// Bounded-variation analogue: max over start states of the Kolmogorov
/// (sup-CDF) distance between P^k(s,.) and the stationary law.
double chain_phitilde_exact(const std::vector<double>& states, const Eigen::MatrixXd& P, long k);

}  // namespace depconc

#endif
