#ifndef DEPCONC_KERNEL_MODEL_HPP
#define DEPCONC_KERNEL_MODEL_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include "depconc/filters.hpp"

namespace depconc {

/// Scalar kernels on [0,1] with k(x,x) <= 1.
///  - Gaussian: exp(-(x-y)^2 / (2 width^2))
///  - SobolevSpline: min(x,y), the first-order spline kernel pinned at 0
///  - MercerCosine: truncated cosine expansion sum_j zeta_j e_j(x) e_j(y)
///    with zeta_j proportional to j^(-decay_b), scaled so sup k(x,x) <= 1.
struct Kernel {
    enum class Kind { Gaussian, SobolevSpline, MercerCosine };
    Kind kind = Kind::Gaussian;
    double width = 0.25;   // Gaussian
    int terms = 64;        // MercerCosine
    double decay_b = 2.0;  // MercerCosine
    double scale = 1.0;    // MercerCosine: zeta_j = scale * j^(-decay_b)

    static Kernel gaussian(double width);
    static Kernel sobolev_spline();
    static Kernel mercer_cosine(int terms, double decay_b);

    double operator()(double x, double y) const;
    std::string kind_name() const;
};

/// Fitted spectral-regularization regressor. Prediction contract:
/// f(x) = (1/n) sum_j alpha_j k(x_j, x) with alpha = F_lambda(K/n) y.
struct KernelModel {
    Kernel kernel;
    Eigen::VectorXd support_x;
    Eigen::VectorXd alpha;
    double lambda = 0;
    FilterSpec filter;

    double predict(double x) const;
    Eigen::VectorXd predict(const Eigen::VectorXd& xs) const;

    void save_json(const std::filesystem::path& file) const;
    static KernelModel load_json(const std::filesystem::path& file);
};

/// Spectral-regularized fit through the Gram matrix: eigendecompose
/// K/n = U diag(w) U^T (eigenvalues clamped to [0, 1] within 1e-10
/// tolerance, anything further out is an error) and apply the filter.
KernelModel fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double lambda,
                const FilterSpec& filter, const Kernel& kernel);

}  // namespace depconc

#endif
