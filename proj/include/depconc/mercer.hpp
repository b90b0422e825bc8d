#ifndef DEPCONC_MERCER_HPP
#define DEPCONC_MERCER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <limits>

#include "depconc/filters.hpp"
#include "depconc/mixing.hpp"

namespace depconc {

/// Regularity description of a regression problem: smoothness exponent r
/// with source norm D, spectrum decay zeta_j <= beta * j^(-b), response
/// bound R and conditional-variance bound Sigma^2.
struct SourceCondition {
    double r = 0.5;
    double D = 1.0;
    double b = 2.0;
    double beta = 1.0;
    double R = 1.0;
    double Sigma = 0.1;
    void validate() const;
};

/// Trace of (T + lambda)^{-1} T for the power-law spectrum
/// zeta_j = beta * j^(-b). Series summed until the integral-comparison
/// tail bound drops below 1e-8 (capped), remainder added by quadrature.
double effective_dimension_powerlaw(double b, double beta, double lambda);

/// Same trace for an explicit spectrum.
double effective_dimension_empirical(const Eigen::VectorXd& eigenvalues, double lambda);

/// Envelope constant: effective dimension <= C * lambda^(-1/b) with
/// C = beta^(1/b) * (pi/b) / sin(pi/b) (integral comparison).
double effective_dimension_envelope(double b, double beta);

enum class DeviationQuantity { Residual, WeightedResidual, WeightedCovarianceGap, CovarianceGap };

/// Effective-sample-size floor for one deviation quantity. Exponential
/// rate: the residual quantities use C = 3 max(1, KR, KD) inside the log,
/// the covariance-gap ones the kernel constant K alone. Polynomial rate:
/// the two resolvent-weighted quantities additionally need lambda and the
/// effective dimension (the defaults signal "not required").
long deviation_sample_size(DeviationQuantity which, long n, const MixingRate& rate,
                           double K_kernel, double R, double D, double Sigma,
                           double lambda = std::numeric_limits<double>::quiet_NaN(),
                           double Nlambda = std::numeric_limits<double>::quiet_NaN());

/// Synthetic regression problem with a fully known covariance: truncated
/// cosine expansion on [0,1] with zeta_j = beta_norm * j^(-b) scaled so
/// sup_x k(x,x) = 1, uniform input marginal at stationarity, target
/// f = D * zeta_1^r * phi_1 (phi_1 the unit top basis direction).
class MercerSetup {
public:
    static MercerSetup standard(int J, SourceCondition source);

    int J() const { return static_cast<int>(zeta_.size()); }
    const Eigen::VectorXd& zeta() const { return zeta_; }
    double beta_norm() const { return beta_norm_; }
    /// Uniform bound on the mixed second derivative of the kernel
    /// (coefficient sum; enters sample-size tables logarithmically).
    double kernel_derivative_bound() const { return K_bound_; }
    const SourceCondition& source() const { return source_; }
    /// Nominal dependence rates for the input process (upper bounds).
    MixingRate exponential_rate() const { return MixingRate::exponential(1.0, 1.0, 1.0); }
    MixingRate polynomial_rate(double gamma) const { return MixingRate::polynomial(1.0, gamma); }

    /// Feature vector v(x): coordinates of k_x in the orthonormal basis.
    Eigen::VectorXd feature(double x) const;
    /// Coefficients of the regression target in the orthonormal basis.
    const Eigen::VectorXd& target_coeffs() const { return target_; }
    double target_value(double x) const;
    /// || T^s (a - target) || computed in basis coordinates.
    double error_norm(const Eigen::VectorXd& a, double s) const;
    double effective_dimension(double lambda) const;

    struct Sample {
        Eigen::VectorXd x;
        Eigen::VectorXd y;
        double clip_rate = 0.0;  // fraction of responses clipped to [-R, R]
    };
    /// Dependent inputs: order-1 autoregression X <- X/3 + xi with
    /// balanced-ternary innovations, mapped affinely onto [0,1]. The
    /// stationary marginal is exactly uniform and the dependence
    /// coefficients are bounded by exp(-k) (and by k^-gamma for any
    /// gamma <= 2 at unit front factor). Responses carry uniform noise of
    /// variance Sigma^2, clipped to [-R, R].
    Sample sample_dependent(long n, std::uint64_t seed) const;
    /// Independent uniform inputs, same response model.
    Sample sample_iid(long n, std::uint64_t seed) const;

    /// Spectral-regularized fit in basis coordinates,
    /// F_lambda(T_x) S_x^* y; equals the Gram-matrix route.
    Eigen::VectorXd fit_coeffs(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double lambda,
                               const FilterSpec& filter) const;

    /// Empirical covariance of the features, (1/n) sum v(x_i) v(x_i)^T.
    Eigen::MatrixXd empirical_covariance(const Eigen::VectorXd& x) const;

private:
    Eigen::VectorXd zeta_;
    Eigen::VectorXd target_;
    double beta_norm_ = 1.0;
    double K_bound_ = 0.0;
    SourceCondition source_;
};

/// Empirical deviation norms against their high-probability levels.
/// The third quantity is reported under both operator scalings
/// (T+lambda)^(-1/2) and (T+lambda)^(-1), which differ in the literature;
/// `bound` entries use the square-root scaling levels.
struct OperatorDeviationReport {
    double emp[4] = {0, 0, 0, 0};    // half-power scaling for entry 2
    double bound[4] = {0, 0, 0, 0};  // 21 log(2/eta) levels, entry 3: 42 log(2/eta)/sqrt(l4)
    long ell[4] = {0, 0, 0, 0};
    double emp_full_inverse = 0;    // ||(T+lambda)^(-1)(T - T_x)||
    double bound_full_inverse = 0;  // matching level with the extra lambda^(-1/2)
    bool holds[4] = {false, false, false, false};
    double eta = 0, lambda = 0, Nlambda = 0;
};

OperatorDeviationReport operator_deviations(const MercerSetup& setup, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y, double lambda, double eta,
                                 const MixingRate& rate);

/// Empirical check that ||(T_x + lambda)^(-1) (T + lambda)|| <= 2, with the
/// sample-size hypothesis sqrt(l' * lambda) >= 50 log(2/eta) sqrt(max(N,1))
/// evaluated and reported (not enforced).
struct OperatorRatioCheck {
    double ratio = 0;
    bool hypothesis_ok = false;
    bool within_two = false;
    double required = 0;  // right-hand side of the hypothesis
    double actual = 0;    // sqrt(l' * lambda)
};

OperatorRatioCheck ratio_operator_check(const MercerSetup& setup, const Eigen::VectorXd& x,
                                        double lambda, double eta, const MixingRate& rate);

enum class MixingRegime { ExponentialMixing, PolynomialMixing };

struct Schedule {
    double lambda_n = 0;
    long ell_prime = 0;
};

/// Regularization schedule:
///   exponential — l'_g = floor(n*theta / (2 (1 v log(3 n K D chi theta / R))^(1/gamma))),
///                 lambda_n = min((Sigma^2/(D^2 l'_g))^(b/(2br+b+1)), 1);
///   polynomial  — lambda_n = n^(-b/(2br+b+1+b(r+1)/gamma)),
///                 l'_p = floor((lambda_n N(lambda_n))^(2/(2gamma+1)) (n/2)^(2gamma/(2gamma+1))).
/// Requires D >= R >= 1 and b > 1.
Schedule lambda_schedule(MixingRegime regime, long n, const SourceCondition& source,
                         const MixingRate& rate, double K_kernel);

/// Oracle error level for the regularized estimator at smoothness s:
/// C log(8/eta) lambda^s ( D(lambda^r + 1/sqrt(l')) + R/(l' lambda)
///                         + sqrt(Sigma^2 N(lambda)/(lambda l')) ),
/// with the sample-size floor l0 = 2500 max(N,1) log^2(8/eta) / lambda
/// reported as a feasibility flag. Requires qualification q >= r + s.
struct RegressionErrorBound {
    double value = 0;
    double ell0 = 0;
    bool feasible = false;
};

RegressionErrorBound regression_error_bound(double lambda, long ell_prime, const SourceCondition& source,
                                 double s, const FilterSpec& filter, double eta,
                                 double front_factor = 1.0);

}  // namespace depconc

#endif
