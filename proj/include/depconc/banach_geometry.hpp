#ifndef DEPCONC_BANACH_GEOMETRY_HPP
#define DEPCONC_BANACH_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

namespace depconc {

enum class SpaceKind { Hilbert, Lp, SchattenP };

/// Normed space in which derivatives of the norm are evaluated.
///  - Hilbert: R^dim with the Euclidean norm.
///  - Lp: functions on a dim-point probability grid (positive weights
///    summing to one), p >= 2.
///  - SchattenP: real symmetric dim x dim matrices with the eigenvalue
///    p-norm, p >= 2; matrix elements are passed flattened row-major.
struct NormSpace {
    SpaceKind kind = SpaceKind::Hilbert;
    double p = 2.0;
    int dim = 1;
    Eigen::VectorXd weights;  // Lp only

    static NormSpace hilbert(int dim);
    static NormSpace lp(double p, int grid_size);  // uniform weights 1/grid_size
    static NormSpace lp(double p, Eigen::VectorXd weights);
    static NormSpace schatten(double p, int matrix_dim);

    /// Length of the flattened element vector (dim, or dim*dim for matrices).
    int element_size() const;
    void validate() const;
};

double space_norm(const NormSpace& space, const Eigen::VectorXd& x);

/// Directional derivative of the norm at x != 0 in direction h, in closed
/// form. Rank-deficient Schatten points are shifted by 1e-12*||X||*I before
/// evaluation (the closed form needs full rank); see schatten_full_rank.
double gateaux_first(const NormSpace& space, const Eigen::VectorXd& x, const Eigen::VectorXd& h);

/// Second directional derivative of the norm at x != 0 in direction h.
double gateaux_second(const NormSpace& space, const Eigen::VectorXd& x, const Eigen::VectorXd& h);

/// Central finite difference of t -> ||x + t*h|| at t = 0, order 1 or 2.
/// Independent of the closed forms; used to cross-check them.
double fd_oracle(const NormSpace& space, const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                 int order, double step);

/// Whether the closed-form route applies without the diagonal shift.
bool schatten_full_rank(const NormSpace& space, const Eigen::VectorXd& x);

/// Smoothness constants certified by these spaces: Hilbert (1,1),
/// Lp (1, p-1), Schatten (1, 3(p-1)).
std::pair<double, double> preset_constants(const NormSpace& space);

/// Sampled-maximum certificate for the derivative bounds
/// |d1| <= A1*||h|| and |d2| <= A2*||h||^2/||x||.
struct SmoothnessCert {
    double A1 = 0;
    double A2 = 0;
    double max_ratio_first = 0;
    double max_ratio_second = 0;
    long samples = 0;
    bool pass = false;
};

SmoothnessCert certify_constants(const NormSpace& space, long samples, std::uint64_t seed,
                                 double tol = 1e-9, int n_threads = 1);

}  // namespace depconc

#endif
