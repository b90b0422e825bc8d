#ifndef DEPCONC_PROCESS_SIM_HPP
#define DEPCONC_PROCESS_SIM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "depconc/mixing.hpp"

namespace depconc {

/// Realized sample path of a vector-valued process, row i = X_i.
struct Trajectory {
    Eigen::MatrixXd values;           // n x d
    double marginal_bound_c = 0.0;    // a.s. bound on ||X_i||
    double second_moment_sigma2 = 0;  // empirical mean of ||X_i||^2
    double tau_scale = 1.0;           // accumulated Lipschitz factor on the source coefficients

    long n() const { return values.rows(); }
    long dim() const { return values.cols(); }
    double max_row_norm() const;
    /// Enforces the a.s. bound: every row norm <= marginal_bound_c + 1e-12.
    void validate() const;

    /// CSV with header t,x1..xd, one row per time step.
    void write_csv(const std::filesystem::path& file) const;
    static Trajectory read_csv(const std::filesystem::path& file);

    /// Compact binary container, 8-byte magic "DEPC0001".
    void write_binary(const std::filesystem::path& file) const;
    static Trajectory read_binary(const std::filesystem::path& file);
};

enum class ProcessKind { HilbertAR1, HilbertMA, FiniteChain, LipschitzImage };

struct ProcessSpec {
    ProcessKind kind = ProcessKind::HilbertAR1;
    int dim = 16;                      // coordinate truncation for vector-valued paths
    double rho_norm = 0.0;             // contraction norm, autoregression
    int ma_order = 0;                  // q
    std::vector<double> ma_weights;    // theta_0..theta_q
    std::vector<double> chain_states;  // strictly increasing
    Eigen::MatrixXd chain_matrix;      // row-stochastic
    double noise_bound = 1.0;          // a.s. bound on the innovation norm
    std::uint64_t seed = 0;

    void validate() const;
};

/// Stationary centered order-1 autoregression in a d-dimensional coordinate
/// truncation. The contraction is diag(rho, rho*kappa, rho*kappa^2, ...)
/// with kappa = 0.9, so only the top entry attains the operator norm;
/// innovations are i.i.d. uniform on the d-ball of radius noise_bound.
/// Burn-in contracts the initial condition below double precision.
Trajectory simulate_ar1(const ProcessSpec& spec, long n);

/// Centered moving average of order q with scalar weights theta_0..theta_q
/// and ball-uniform innovations; ||W_i|| <= noise_bound * sum |theta_j|.
Trajectory simulate_ma(const ProcessSpec& spec, long n);

/// Stationary real-valued path of a finite chain started from the
/// stationary law, centered by the stationary mean. Requires a unique
/// stationary law.
Trajectory simulate_chain(const ProcessSpec& spec, long n);

enum class LipschitzMap { Identity, ConstantZero, ClipHalf, AffineToUnit };

/// Applies a map from a fixed catalog coordinate-wise and rescales the
/// recorded bound; tau_scale accumulates lip_const so downstream code can
/// bound the image's dependence coefficients by lip_const times the
/// source's.
Trajectory lipschitz_image(const Trajectory& traj, double lip_const, LipschitzMap map_id);

// Analytic constants for the presets (exact, not path-dependent).
double ar1_marginal_bound(const ProcessSpec& spec);
double ar1_second_moment(const ProcessSpec& spec);
MixingRate ar1_mixing_rate(const ProcessSpec& spec, bool conservative = false);
double ma_marginal_bound(const ProcessSpec& spec);
double ma_second_moment(const ProcessSpec& spec);
/// Coupling bound on the coefficients, tabulated for lags 1..max_lag
/// (zero beyond the order q).
MixingRate ma_mixing_rate(const ProcessSpec& spec, long max_lag, bool conservative = false);

namespace detail {
/// Uniform draw from the d-ball (radial method: Gaussian direction,
/// radius ~ R * U^(1/d)).
void sample_ball(std::mt19937_64& rng, double radius, Eigen::Ref<Eigen::VectorXd> out);
constexpr double kContractionDecay = 0.9;
long ar1_burn_in(double rho_norm);
}  // namespace detail

}  // namespace depconc

#endif
