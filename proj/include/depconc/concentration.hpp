#ifndef DEPCONC_CONCENTRATION_HPP
#define DEPCONC_CONCENTRATION_HPP

#include <vector>

#include "depconc/mixing.hpp"
#include "depconc/process_sim.hpp"

namespace depconc {

/// Constant bundle feeding every deviation bound: norm bound c, second
/// moment sigma2, norm-smoothness constants A1 >= 1 and A2 > 0, and the
/// function-class constants C1, C2.
struct ConcentrationParams {
    double c = 1.0;
    double sigma2 = 1.0;
    double A1 = 1.0;
    double A2 = 1.0;
    double C1 = 1.0;
    double C2 = 2.0;

    double B() const { return A1 * A1 + A2; }
    double sigma() const;
    void validate() const;

    /// Hilbert norm with the Lipschitz test class: A1 = A2 = 1 (so B = 2),
    /// C1 = 1, C2 = 2c.
    static ConcentrationParams hilbert_lipschitz(double c, double sigma2);
};

/// Interleaved index blocks: k blocks of size ell or ell+1 with
/// within-block stride k, partitioning {1..n}.
struct BlockPartition {
    long n = 0, k = 0, ell = 0, r = 0;
    std::vector<std::vector<long>> blocks;
    void validate() const;
};

/// exp(x) - x - 1, stable for small x.
double pi_fn(double x);

/// Per-step moment growth factor:
/// lambda*C1*A1*Phi(k) + B*(C2*Phi(k) + sigma2) * pi(lambda*c)/c^2.
double p_fn(long k, double lambda, const ConcentrationParams& params, const MixingRate& rate);

BlockPartition block_partition(long n, long k);

/// Largest block size ell in [1,n] with C1*Phi(floor(n/ell)) <= c/ell or
/// sigma/sqrt(ell); descending scan, 1 when no ell qualifies.
long effective_sample_size_exact(long n, const ConcentrationParams& params, const MixingRate& rate);

/// Closed-form lower bound for the exponential / polynomial decay models,
/// clamped to [1, n]. Tabulated rates are rejected (use the exact scan).
long effective_sample_size_bound(long n, const ConcentrationParams& params, const MixingRate& rate);

/// Deviation level with exceedance probability <= 2 exp(-nu) for the mean
/// of n = ell*k + r samples:
/// 4*A1*C1*Phi(k) + 4*sqrt(B*(sigma2 + C2*Phi(k))*nu/ell) + 4*c*nu/(3*ell).
/// Requires ell >= 2.
double deviation_bound_blocks(double nu, long ell, long k, const ConcentrationParams& params,
                   const MixingRate& rate);

/// Effective-sample-size form, nu >= 1:
/// sigma*(4*A1 + 6*sqrt(B*nu))/sqrt(l*) + c*(4*A1 + M1*nu)/l*
/// with M1 = 2 + 2*sqrt(B)*(1 + 2*C2/(C1*c)).
double deviation_bound_effective(double nu, long ell_star, const ConcentrationParams& params,
                   const SeminormConstants& cls);

/// Hilbert specialization, valid with probability >= 1 - eta for
/// eta in (0, 1/2]: log(2/eta) * (13*sigma/sqrt(l*) + 21*c/l*).
double deviation_bound_hilbert(double eta, long ell_star, double sigma, double c);

namespace detail {
/// Moment-generating-function bound for the mean of n = ell*k + r samples
/// (diagnostic; consumed only by tests of the tail optimization):
/// 2 exp( (B/c^2) * ((ell+1)*sigma2 + C2*ell*Phi(k)) * pi(lambda*c/ell)
///        + lambda*C1*A1*Phi(k) ).
double laplace_moment_bound(double lambda, long ell, long k, const ConcentrationParams& params,
                            const MixingRate& rate);
}  // namespace detail

/// Monte Carlo validity check of deviation_bound_hilbert on the autoregressive /
/// moving-average presets (their c, sigma2 and decay rate are analytic).
struct DeviationReport {
    long n = 0;
    long trials = 0;
    double eta = 0;
    double empirical_quantile = 0;
    double bound = 0;
    bool holds = false;
    long ell_star = 0;
    double sigma = 0;
    double c = 0;
    std::vector<double> norms;  // one mean-norm per trial
};

DeviationReport mc_deviation_check(const ProcessSpec& spec, long n, long trials, double eta,
                                   int n_threads = 0);

}  // namespace depconc

#endif
