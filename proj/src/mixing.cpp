#include "depconc/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace depconc {

MixingRate MixingRate::exponential(double chi, double theta, double gamma) {
    if (chi < 0) throw std::invalid_argument("chi must be >= 0");
    if (theta <= 0 || gamma <= 0) throw std::invalid_argument("theta, gamma must be > 0");
    MixingRate r;
    r.kind_ = RateKind::Exponential;
    r.chi_ = chi;
    r.theta_ = theta;
    r.gamma_ = gamma;
    return r;
}

MixingRate MixingRate::polynomial(double rho, double gamma) {
    if (rho < 0) throw std::invalid_argument("rho must be >= 0");
    if (gamma <= 0) throw std::invalid_argument("gamma must be > 0");
    MixingRate r;
    r.kind_ = RateKind::Polynomial;
    r.rho_ = rho;
    r.gamma_ = gamma;
    return r;
}

MixingRate MixingRate::tabulated(std::vector<double> phi_by_lag) {
    if (phi_by_lag.empty()) throw std::invalid_argument("empty coefficient table");
    for (size_t i = 0; i < phi_by_lag.size(); ++i) {
        if (phi_by_lag[i] < 0) throw std::invalid_argument("coefficients must be >= 0");
        if (i > 0 && phi_by_lag[i] > phi_by_lag[i - 1] + 1e-15)
            throw std::invalid_argument("coefficient table must be nonincreasing");
    }
    MixingRate r;
    r.kind_ = RateKind::Tabulated;
    r.table_ = std::move(phi_by_lag);
    return r;
}

MixingRate MixingRate::from_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::vector<double> phi;
    std::string line;
    long expect = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("k,", 0) == 0) continue;
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw std::runtime_error("expected two columns in " + file.string());
        long k = std::stol(a);
        if (k != expect) throw std::runtime_error("lags must be consecutive from 1");
        ++expect;
        phi.push_back(std::stod(b));
    }
    return tabulated(std::move(phi));
}

MixingRate MixingRate::zero() { return exponential(0.0, 1.0, 1.0); }

double MixingRate::operator()(long k) const {
    if (k < 1) throw std::invalid_argument("lag must be >= 1");
    switch (kind_) {
        case RateKind::Exponential:
        case RateKind::Polynomial:
            return at_real(static_cast<double>(k));
        case RateKind::Tabulated:
            if (k > static_cast<long>(table_.size()))
                throw std::out_of_range("lag beyond coefficient table (no extrapolation)");
            return table_[static_cast<size_t>(k - 1)];
    }
    return 0.0;
}

double MixingRate::at_real(double t) const {
    if (t < 1.0) throw std::invalid_argument("continuous rate defined for t >= 1");
    switch (kind_) {
        case RateKind::Exponential:
            return chi_ * std::exp(-std::pow(theta_ * t, gamma_));
        case RateKind::Polynomial:
            return rho_ * std::pow(t, -gamma_);
        case RateKind::Tabulated:
            throw std::invalid_argument("tabulated rate has no continuous extension");
    }
    return 0.0;
}

SeminormConstants seminorm_constants(FunctionClass class_id, double ball_radius_c) {
    if (ball_radius_c <= 0) throw std::invalid_argument("ball radius must be > 0");
    SeminormConstants s;
    s.class_id = class_id;
    s.ball_radius_c = ball_radius_c;
    if (class_id == FunctionClass::Lipschitz) {
        s.C1 = 1.0;
        s.C2 = 2.0 * ball_radius_c;
    } else {
        s.C1 = 2.0 * ball_radius_c;
        s.C2 = 2.0 * ball_radius_c * ball_radius_c;
    }
    return s;
}

double ar1_tau_bound(double rho_norm, double sup_norm, long s, bool conservative) {
    if (rho_norm < 0 || rho_norm >= 1) throw std::invalid_argument("rho_norm in [0,1)");
    if (sup_norm <= 0) throw std::invalid_argument("sup_norm must be > 0");
    if (s < 1) throw std::invalid_argument("lag must be >= 1");
    double v = std::pow(rho_norm, static_cast<double>(s)) * sup_norm;
    return conservative ? 2.0 * v : v;
}

namespace {

void check_stochastic(const Eigen::MatrixXd& P) {
    if (P.rows() != P.cols() || P.rows() < 1) throw std::invalid_argument("P must be square");
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        if (P.row(i).minCoeff() < 0) throw std::invalid_argument("P entries must be >= 0");
        if (std::abs(P.row(i).sum() - 1.0) > 1e-12)
            throw std::invalid_argument("P rows must sum to 1");
    }
}

Eigen::VectorXd stationary_dense(const Eigen::MatrixXd& P) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(P.transpose());
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    int unit_count = 0;
    Eigen::Index unit_idx = -1;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        if (std::abs(es.eigenvalues()[i] - std::complex<double>(1.0, 0.0)) < 1e-9) {
            ++unit_count;
            unit_idx = i;
        }
    }
    if (unit_count != 1)
        throw std::invalid_argument("chain has no unique stationary law");
    Eigen::VectorXd pi = es.eigenvectors().col(unit_idx).real();
    double s = pi.sum();
    if (std::abs(s) < 1e-14) throw std::runtime_error("degenerate stationary eigenvector");
    pi /= s;
    if (pi.minCoeff() < -1e-9) throw std::runtime_error("stationary law has negative mass");
    return pi.cwiseMax(0.0) / pi.cwiseMax(0.0).sum();
}

Eigen::VectorXd stationary_power(const Eigen::MatrixXd& P) {
    // iterate the half-lazy kernel (same fixed points, always aperiodic)
    const Eigen::Index m = P.rows();
    auto iterate = [&](Eigen::VectorXd v) {
        for (long it = 0; it < 1000000; ++it) {
            Eigen::VectorXd next = 0.5 * (P.transpose() * v) + 0.5 * v;
            double diff = (next - v).lpNorm<1>();
            v = next;
            if (diff < 1e-14) return v;
        }
        throw std::runtime_error("power iteration did not converge");
    };
    Eigen::VectorXd a = iterate(Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    b[0] = 1.0;
    b = iterate(b);
    if ((a - b).lpNorm<1>() > 1e-10)
        throw std::invalid_argument("chain has no unique stationary law");
    return a;
}

}  // namespace

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P) {
    check_stochastic(P);
    return P.rows() <= 64 ? stationary_dense(P) : stationary_power(P);
}

namespace {

Eigen::MatrixXd matrix_power(Eigen::MatrixXd base, long k) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(base.rows(), base.cols());
    while (k > 0) {
        if (k & 1) acc = acc * base;
        base = base * base;
        k >>= 1;
    }
    return acc;
}

void check_states(const std::vector<double>& states, const Eigen::MatrixXd& P) {
    if (static_cast<Eigen::Index>(states.size()) != P.rows())
        throw std::invalid_argument("states/P size mismatch");
    for (size_t i = 1; i < states.size(); ++i)
        if (!(states[i] > states[i - 1]))
            throw std::invalid_argument("states must be strictly increasing");
}

}  // namespace

double chain_tau_exact(const std::vector<double>& states, const Eigen::MatrixXd& P, long k) {
    if (k < 1) throw std::invalid_argument("lag must be >= 1");
    check_stochastic(P);
    check_states(states, P);
    Eigen::VectorXd pi = stationary_distribution(P);
    Eigen::MatrixXd Pk = matrix_power(P, k);
    const Eigen::Index m = P.rows();
    double worst = 0.0;
    for (Eigen::Index s = 0; s < m; ++s) {
        double w1 = 0.0, f1 = 0.0, f2 = 0.0;
        for (Eigen::Index j = 0; j + 1 < m; ++j) {
            f1 += Pk(s, j);
            f2 += pi[j];
            w1 += std::abs(f1 - f2) * (states[j + 1] - states[j]);
        }
        worst = std::max(worst, w1);
    }
    return worst;
}

double chain_phitilde_exact(const std::vector<double>& states, const Eigen::MatrixXd& P, long k) {
    if (k < 1) throw std::invalid_argument("lag must be >= 1");
    check_stochastic(P);
    check_states(states, P);
    Eigen::VectorXd pi = stationary_distribution(P);
    Eigen::MatrixXd Pk = matrix_power(P, k);
    const Eigen::Index m = P.rows();
    double worst = 0.0;
    for (Eigen::Index s = 0; s < m; ++s) {
        double ks = 0.0, f1 = 0.0, f2 = 0.0;
        for (Eigen::Index j = 0; j + 1 < m; ++j) {
            f1 += Pk(s, j);
            f2 += pi[j];
            ks = std::max(ks, std::abs(f1 - f2));
        }
        worst = std::max(worst, ks);
    }
    return worst;
}

}  // namespace depconc
