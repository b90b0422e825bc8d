#ifndef DEPCONC_FILTERS_HPP
#define DEPCONC_FILTERS_HPP

#include <functional>
#include <vector>

namespace depconc {

enum class FilterFamily { Tikhonov, SpectralCutoff, Landweber, Custom };

/// Regularization family F_lambda on (0,1] with its certified constants:
///   sup |t F(t)|        <= B_const
///   sup |F(t)|          <= E_const / lambda
///   sup |r(t)|          <= gamma0          (r(t) = 1 - t F(t))
///   sup |r(t) t^q|      <= gamma_q * lambda^q   (q = qualification)
struct FilterSpec {
    FilterFamily family = FilterFamily::Tikhonov;
    double B_const = 1.0;
    double E_const = 1.0;
    double gamma0 = 1.0;
    double qualification_q = 1.0;
    double gamma_q = 1.0;
    std::function<double(double lambda, double t)> custom;  // Custom only

    static FilterSpec tikhonov();
    static FilterSpec spectral_cutoff(double qualification = 8.0);
    static FilterSpec landweber();
    static FilterSpec custom_filter(std::function<double(double, double)> f, double B, double E,
                                    double gamma0, double q, double gamma_q);
};

/// F_lambda(t) for t in (0,1], lambda in (0,1]. Landweber runs
/// m = ceil(1/lambda) Richardson sweeps: F(t) = sum_{i<m} (1-t)^i.
double filter_eval(const FilterSpec& filter, double lambda, double t);

/// Residual r_lambda(t) = 1 - t*F_lambda(t).
double filter_residual(const FilterSpec& filter, double lambda, double t);

namespace detail {
/// Limit value at t = 0 (needed when an empirical eigenvalue is clamped
/// to zero); the public entry point rejects t outside (0,1].
double filter_eval_extended(const FilterSpec& filter, double lambda, double t);
}  // namespace detail

/// Grid-supremum estimates of the four filter constants with pass flags
/// against the declared values.
struct FilterCertificate {
    double B_hat = 0;
    double E_hat = 0;
    double gamma0_hat = 0;
    std::vector<double> qs;           // requested qualifications
    std::vector<double> gamma_q_hat;  // matching sup estimates
    bool pass = false;
};

FilterCertificate certify_filter(const FilterSpec& filter, const std::vector<double>& lambda_grid,
                                 const std::vector<double>& t_grid, const std::vector<double>& qs);

/// Log-spaced grid on [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace depconc

#endif
