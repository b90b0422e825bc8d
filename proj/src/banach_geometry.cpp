#include "depconc/banach_geometry.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "depconc/io_util.hpp"

namespace depconc {

NormSpace NormSpace::hilbert(int dim) {
    NormSpace s;
    s.kind = SpaceKind::Hilbert;
    s.dim = dim;
    s.validate();
    return s;
}

NormSpace NormSpace::lp(double p, int grid_size) {
    return lp(p, Eigen::VectorXd::Constant(grid_size, 1.0 / grid_size));
}

NormSpace NormSpace::lp(double p, Eigen::VectorXd weights) {
    NormSpace s;
    s.kind = SpaceKind::Lp;
    s.p = p;
    s.dim = static_cast<int>(weights.size());
    s.weights = std::move(weights);
    s.validate();
    return s;
}

NormSpace NormSpace::schatten(double p, int matrix_dim) {
    NormSpace s;
    s.kind = SpaceKind::SchattenP;
    s.p = p;
    s.dim = matrix_dim;
    s.validate();
    return s;
}

int NormSpace::element_size() const {
    return kind == SpaceKind::SchattenP ? dim * dim : dim;
}

void NormSpace::validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (kind != SpaceKind::Hilbert && p < 2.0)
        throw std::invalid_argument("p must be >= 2 (constants below that are not covered)");
    if (kind == SpaceKind::Lp) {
        if (weights.size() != dim) throw std::invalid_argument("weights/dim mismatch");
        if (weights.minCoeff() <= 0) throw std::invalid_argument("weights must be positive");
        if (std::abs(weights.sum() - 1.0) > 1e-12)
            throw std::invalid_argument("weights must sum to 1 (probability grid)");
    }
}

namespace {

Eigen::MatrixXd as_matrix(const NormSpace& space, const Eigen::VectorXd& x) {
    if (x.size() != space.element_size()) throw std::invalid_argument("element size mismatch");
    Eigen::MatrixXd m =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            x.data(), space.dim, space.dim);
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("matrix element must be symmetric");
    return 0.5 * (m + m.transpose());
}

struct SchattenDecomp {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd U;
    double norm_p;
    double spec_norm;
};

SchattenDecomp schatten_decompose(const NormSpace& space, const Eigen::VectorXd& x,
                                  bool shift_if_singular) {
    Eigen::MatrixXd X = as_matrix(space, x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    SchattenDecomp d;
    d.lambda = es.eigenvalues();
    d.U = es.eigenvectors();
    d.spec_norm = d.lambda.cwiseAbs().maxCoeff();
    if (shift_if_singular && d.spec_norm > 0 &&
        d.lambda.cwiseAbs().minCoeff() <= 1e-12 * d.spec_norm) {
        // closed forms hold at full rank; nudge the spectrum off zero
        d.lambda.array() += 1e-12 * d.spec_norm;
        d.spec_norm = d.lambda.cwiseAbs().maxCoeff();
    }
    d.norm_p = std::pow(d.lambda.array().abs().pow(space.p).sum(), 1.0 / space.p);
    return d;
}

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

double w_fn(double lambda, double p) { return sign(lambda) * std::pow(std::abs(lambda), p - 1.0); }
double w_prime(double lambda, double p) { return (p - 1.0) * std::pow(std::abs(lambda), p - 2.0); }

void require_nonzero(double norm) {
    if (norm == 0.0) throw std::invalid_argument("norm not differentiable at the origin");
}

double lp_norm(const NormSpace& s, const Eigen::VectorXd& f) {
    return std::pow((s.weights.array() * f.array().abs().pow(s.p)).sum(), 1.0 / s.p);
}

}  // namespace

double space_norm(const NormSpace& space, const Eigen::VectorXd& x) {
    space.validate();
    switch (space.kind) {
        case SpaceKind::Hilbert:
            return x.norm();
        case SpaceKind::Lp:
            return lp_norm(space, x);
        case SpaceKind::SchattenP: {
            Eigen::MatrixXd X = as_matrix(space, x);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X, Eigen::EigenvaluesOnly);
            return std::pow(es.eigenvalues().array().abs().pow(space.p).sum(), 1.0 / space.p);
        }
    }
    return 0.0;
}

bool schatten_full_rank(const NormSpace& space, const Eigen::VectorXd& x) {
    if (space.kind != SpaceKind::SchattenP) return true;
    Eigen::MatrixXd X = as_matrix(space, x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X, Eigen::EigenvaluesOnly);
    double top = es.eigenvalues().cwiseAbs().maxCoeff();
    return top > 0 && es.eigenvalues().cwiseAbs().minCoeff() > 1e-12 * top;
}

double gateaux_first(const NormSpace& space, const Eigen::VectorXd& x, const Eigen::VectorXd& h) {
    space.validate();
    switch (space.kind) {
        case SpaceKind::Hilbert: {
            double nx = x.norm();
            require_nonzero(nx);
            return x.dot(h) / nx;
        }
        case SpaceKind::Lp: {
            double nf = lp_norm(space, x);
            require_nonzero(nf);
            double inner =
                (space.weights.array() * x.array().abs().pow(space.p - 2.0) * x.array() * h.array())
                    .sum();
            return std::pow(nf, 1.0 - space.p) * inner;
        }
        case SpaceKind::SchattenP: {
            auto d = schatten_decompose(space, x, true);
            require_nonzero(d.norm_p);
            Eigen::MatrixXd Ht = d.U.transpose() * as_matrix(space, h) * d.U;
            double inner = 0.0;
            for (Eigen::Index i = 0; i < d.lambda.size(); ++i)
                inner += w_fn(d.lambda[i], space.p) * Ht(i, i);
            return inner / std::pow(d.norm_p, space.p - 1.0);
        }
    }
    return 0.0;
}

double gateaux_second(const NormSpace& space, const Eigen::VectorXd& x, const Eigen::VectorXd& h) {
    space.validate();
    switch (space.kind) {
        case SpaceKind::Hilbert: {
            double nx = x.norm();
            require_nonzero(nx);
            double u = x.dot(h) / nx;
            return (h.squaredNorm() - u * u) / nx;
        }
        case SpaceKind::Lp: {
            double nf = lp_norm(space, x);
            require_nonzero(nf);
            auto wA = space.weights.array();
            auto fA = x.array();
            auto gA = h.array();
            double m_gg = (wA * fA.abs().pow(space.p - 2.0) * gA.square()).sum();
            double m_fg = (wA * fA.abs().pow(space.p - 2.0) * fA * gA).sum();
            return (space.p - 1.0) * std::pow(nf, 1.0 - 2.0 * space.p) *
                   (std::pow(nf, space.p) * m_gg - m_fg * m_fg);
        }
        case SpaceKind::SchattenP: {
            auto d = schatten_decompose(space, x, true);
            require_nonzero(d.norm_p);
            const double p = space.p;
            Eigen::MatrixXd Ht = d.U.transpose() * as_matrix(space, h) * d.U;
            const double tie = 1e-10 * d.spec_norm;
            double quad = 0.0;   // <w^[1](Lambda) o Ht, Ht>
            double inner = 0.0;  // <w(X), H>
            for (Eigen::Index i = 0; i < d.lambda.size(); ++i) {
                inner += w_fn(d.lambda[i], p) * Ht(i, i);
                for (Eigen::Index j = 0; j < d.lambda.size(); ++j) {
                    double dij = d.lambda[i] - d.lambda[j];
                    double w1 = (std::abs(dij) <= tie)
                                    ? w_prime(0.5 * (d.lambda[i] + d.lambda[j]), p)
                                    : (w_fn(d.lambda[i], p) - w_fn(d.lambda[j], p)) / dij;
                    quad += w1 * Ht(i, j) * Ht(i, j);
                }
            }
            return quad / std::pow(d.norm_p, p - 1.0) -
                   (p - 1.0) * inner * inner / std::pow(d.norm_p, 2.0 * p - 1.0);
        }
    }
    return 0.0;
}

double fd_oracle(const NormSpace& space, const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                 int order, double step) {
    if (order != 1 && order != 2) throw std::invalid_argument("order must be 1 or 2");
    if (!(step > 0) || !std::isfinite(step)) throw std::invalid_argument("degenerate step");
    require_nonzero(space_norm(space, x));
    double np = space_norm(space, x + step * h);
    double nm = space_norm(space, x - step * h);
    if (order == 1) return (np - nm) / (2.0 * step);
    double n0 = space_norm(space, x);
    return (np - 2.0 * n0 + nm) / (step * step);
}

std::pair<double, double> preset_constants(const NormSpace& space) {
    switch (space.kind) {
        case SpaceKind::Hilbert:
            return {1.0, 1.0};
        case SpaceKind::Lp:
            return {1.0, space.p - 1.0};
        case SpaceKind::SchattenP:
            return {1.0, 3.0 * (space.p - 1.0)};
    }
    return {1.0, 1.0};
}

namespace {

Eigen::VectorXd random_element(const NormSpace& space, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (space.kind != SpaceKind::SchattenP) {
        Eigen::VectorXd v(space.dim);
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
        return v;
    }
    Eigen::MatrixXd g(space.dim, space.dim);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = gauss(rng);
    Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
    // symmetric, so row- and column-major flattenings coincide
    return Eigen::Map<Eigen::VectorXd>(sym.data(), space.dim * space.dim);
}

}  // namespace

SmoothnessCert certify_constants(const NormSpace& space, long samples, std::uint64_t seed,
                                 double tol, int n_threads) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    space.validate();
    auto [A1, A2] = preset_constants(space);

    int workers = n_threads > 0 ? n_threads : 1;
    workers = static_cast<int>(std::min<long>(workers, samples));
    std::vector<double> max1(static_cast<size_t>(workers), 0.0);
    std::vector<double> max2(static_cast<size_t>(workers), 0.0);

    auto run_range = [&](int w, long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            auto rng = make_engine(seed, static_cast<std::uint64_t>(i));
            Eigen::VectorXd x = random_element(space, rng);
            Eigen::VectorXd h = random_element(space, rng);
            double nx = space_norm(space, x);
            double nh = space_norm(space, h);
            if (nx <= 0 || nh <= 0) continue;
            double r1 = std::abs(gateaux_first(space, x, h)) / nh;
            double r2 = std::abs(gateaux_second(space, x, h)) * nx / (nh * nh);
            max1[static_cast<size_t>(w)] = std::max(max1[static_cast<size_t>(w)], r1);
            max2[static_cast<size_t>(w)] = std::max(max2[static_cast<size_t>(w)], r2);
        }
    };

    if (workers <= 1) {
        run_range(0, 0, samples);
    } else {
        std::vector<std::thread> pool;
        long chunk = (samples + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long lo = w * chunk, hi = std::min(samples, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, w, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    SmoothnessCert cert;
    cert.A1 = A1;
    cert.A2 = A2;
    cert.samples = samples;
    cert.max_ratio_first = *std::max_element(max1.begin(), max1.end());
    cert.max_ratio_second = *std::max_element(max2.begin(), max2.end());
    cert.pass = cert.max_ratio_first <= A1 * (1.0 + tol) && cert.max_ratio_second <= A2 * (1.0 + tol);
    return cert;
}

}  // namespace depconc
