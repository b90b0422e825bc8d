#include "depconc/mercer.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "depconc/io_util.hpp"

namespace depconc {

void SourceCondition::validate() const {
    if (!(r > 0) || !(D > 0) || !(beta > 0) || !(R > 0) || !(Sigma > 0))
        throw std::invalid_argument("source parameters must be positive");
    if (!(b > 1)) throw std::invalid_argument("b must exceed 1 (summable spectrum)");
}

double effective_dimension_powerlaw(double b, double beta, double lambda) {
    if (!(b > 1)) throw std::invalid_argument("b must exceed 1 (trace not summable otherwise)");
    if (!(beta > 0) || !(lambda > 0)) throw std::invalid_argument("beta, lambda must be > 0");
    double sum = 0.0;
    const long cap = 200'000;
    long j = 1;
    for (; j <= cap; ++j) {
        double z = beta * std::pow(static_cast<double>(j), -b);
        sum += z / (z + lambda);
        // integral comparison: sum_{i>j} zeta_i / (zeta_i + lambda) <= beta j^(1-b) / (lambda (b-1))
        if (beta * std::pow(static_cast<double>(j), 1.0 - b) / (lambda * (b - 1.0)) < 1e-8) break;
    }
    if (j > cap) {
        // remaining mass on a log scale (integrand decays like exp(-(b-1)t)); Simpson
        const double L = static_cast<double>(cap) + 0.5;
        const double T = 60.0 / (b - 1.0);
        const int panels = 4000;
        auto g = [&](double t) {
            double xx = L * std::exp(t);
            double z = beta * std::pow(xx, -b);
            return z / (z + lambda) * xx;
        };
        const double h = T / panels;
        double acc = g(0.0) + g(T);
        for (int i = 1; i < panels; ++i) acc += g(i * h) * ((i % 2) ? 4.0 : 2.0);
        sum += acc * h / 3.0;
    }
    return sum;
}

double effective_dimension_empirical(const Eigen::VectorXd& eigenvalues, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be > 0");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        double z = std::max(eigenvalues[i], 0.0);
        sum += z / (z + lambda);
    }
    return sum;
}

double effective_dimension_envelope(double b, double beta) {
    if (!(b > 1)) throw std::invalid_argument("b must exceed 1");
    return std::pow(beta, 1.0 / b) * (std::numbers::pi / b) / std::sin(std::numbers::pi / b);
}

long deviation_sample_size(DeviationQuantity which, long n, const MixingRate& rate,
                           double K_kernel, double R,
                        double D, double Sigma, double lambda, double Nlambda) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(K_kernel > 0) || !(R > 0) || !(D > 0) || !(Sigma > 0))
        throw std::invalid_argument("K, R, D, Sigma must be > 0");
    const double C = 3.0 * std::max({1.0, K_kernel * R, K_kernel * D});
    double value = 0.0;
    switch (rate.kind()) {
        case RateKind::Exponential: {
            const double theta = rate.theta(), chi = rate.chi(), g = rate.gamma();
            double arg = (which == DeviationQuantity::Residual ||
                          which == DeviationQuantity::WeightedResidual)
                             ? static_cast<double>(n) * C * chi * theta / (2.0 * R)
                             : static_cast<double>(n) * K_kernel * theta * chi;
            double L = std::max(1.0, std::log(arg));
            value = std::floor(static_cast<double>(n) * theta / (2.0 * std::pow(L, 1.0 / g)));
            break;
        }
        case RateKind::Polynomial: {
            const double g = rate.gamma(), rho = rate.rho();
            const double half_n = 0.5 * static_cast<double>(n);
            const double expo = 2.0 / (2.0 * g + 1.0);
            double front = 0.0;
            switch (which) {
                case DeviationQuantity::Residual:
                    front = Sigma / (C * rho);
                    break;
                case DeviationQuantity::WeightedResidual:
                case DeviationQuantity::WeightedCovarianceGap: {
                    if (!std::isfinite(lambda) || !std::isfinite(Nlambda))
                        throw std::invalid_argument(
                            "the resolvent-weighted quantities need lambda and the effective dimension");
                    double root = std::sqrt(lambda * Nlambda);
                    front = (which == DeviationQuantity::WeightedResidual) ? Sigma * root / (C * rho)
                                                   : root / (2.0 * K_kernel * rho);
                    break;
                }
                case DeviationQuantity::CovarianceGap:
                    front = 1.0 / (K_kernel * rho);
                    break;
            }
            value = std::floor(std::pow(front, expo) * std::pow(half_n, 2.0 * g / (2.0 * g + 1.0)));
            break;
        }
        case RateKind::Tabulated:
            throw std::invalid_argument("sample-size table needs a parametric rate");
    }
    if (!std::isfinite(value)) value = static_cast<double>(n);
    return std::clamp(static_cast<long>(value), 1L, n);
}

MercerSetup MercerSetup::standard(int J, SourceCondition source) {
    if (J < 1) throw std::invalid_argument("J must be >= 1");
    source.validate();
    MercerSetup s;
    s.source_ = source;

    double peak = 1.0;
    for (int j = 2; j <= J; ++j) peak += 2.0 * std::pow(static_cast<double>(j), -source.b);
    s.beta_norm_ = source.beta / peak;

    s.zeta_.resize(J);
    for (int j = 1; j <= J; ++j)
        s.zeta_[j - 1] = s.beta_norm_ * std::pow(static_cast<double>(j), -source.b);

    s.K_bound_ = 0.0;
    for (int j = 2; j <= J; ++j) {
        double freq = static_cast<double>(j - 1) * std::numbers::pi;
        s.K_bound_ += s.zeta_[j - 1] * 2.0 * freq * freq;
    }
    if (J == 1) s.K_bound_ = 1.0;  // constant kernel has zero derivative; keep the tables defined

    s.target_ = Eigen::VectorXd::Zero(J);
    s.target_[0] = source.D * std::pow(s.zeta_[0], source.r);
    return s;
}

Eigen::VectorXd MercerSetup::feature(double x) const {
    const int J = this->J();
    Eigen::VectorXd v(J);
    v[0] = std::sqrt(zeta_[0]);
    for (int j = 2; j <= J; ++j) {
        double freq = static_cast<double>(j - 1) * std::numbers::pi;
        v[j - 1] = std::sqrt(zeta_[j - 1]) * std::numbers::sqrt2 * std::cos(freq * x);
    }
    return v;
}

double MercerSetup::target_value(double x) const { return feature(x).dot(target_); }

double MercerSetup::error_norm(const Eigen::VectorXd& a, double s) const {
    if (a.size() != zeta_.size()) throw std::invalid_argument("coefficient length mismatch");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < zeta_.size(); ++j) {
        double d = a[j] - target_[j];
        acc += std::pow(zeta_[j], 2.0 * s) * d * d;
    }
    return std::sqrt(acc);
}

double MercerSetup::effective_dimension(double lambda) const {
    return effective_dimension_empirical(zeta_, lambda);
}

namespace {

// order-1 autoregression with balanced-ternary innovations; the stationary
// law of state+1/2 is exactly uniform on [0,1] (base-3 digit expansion)
struct TernaryDriver {
    std::mt19937_64 rng;
    double state;

    explicit TernaryDriver(std::uint64_t seed) : rng(make_engine(seed, 0)) {
        std::uniform_real_distribution<double> unif(-0.5, 0.5);
        state = unif(rng);
    }

    double next() {
        std::uniform_int_distribution<int> trit(0, 2);
        state = state / 3.0 + static_cast<double>(trit(rng) - 1) / 3.0;
        return std::min(1.0, std::max(0.0, state + 0.5));
    }
};

}  // namespace

MercerSetup::Sample MercerSetup::sample_dependent(long n, std::uint64_t seed) const {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    Sample s;
    s.x.resize(n);
    s.y.resize(n);
    TernaryDriver driver(seed);
    auto rng = make_engine(seed, 1);
    std::uniform_real_distribution<double> noise(-std::sqrt(3.0) * source_.Sigma,
                                                 std::sqrt(3.0) * source_.Sigma);
    long clipped = 0;
    for (long i = 0; i < n; ++i) {
        s.x[i] = driver.next();
        double v = target_value(s.x[i]) + noise(rng);
        double c = std::min(source_.R, std::max(-source_.R, v));
        if (c != v) ++clipped;
        s.y[i] = c;
    }
    s.clip_rate = static_cast<double>(clipped) / static_cast<double>(n);
    return s;
}

MercerSetup::Sample MercerSetup::sample_iid(long n, std::uint64_t seed) const {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    Sample s;
    s.x.resize(n);
    s.y.resize(n);
    auto rng = make_engine(seed, 2);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_real_distribution<double> noise(-std::sqrt(3.0) * source_.Sigma,
                                                 std::sqrt(3.0) * source_.Sigma);
    long clipped = 0;
    for (long i = 0; i < n; ++i) {
        s.x[i] = unif(rng);
        double v = target_value(s.x[i]) + noise(rng);
        double c = std::min(source_.R, std::max(-source_.R, v));
        if (c != v) ++clipped;
        s.y[i] = c;
    }
    s.clip_rate = static_cast<double>(clipped) / static_cast<double>(n);
    return s;
}

Eigen::MatrixXd MercerSetup::empirical_covariance(const Eigen::VectorXd& x) const {
    const int J = this->J();
    Eigen::MatrixXd Tx = Eigen::MatrixXd::Zero(J, J);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd v = feature(x[i]);
        Tx.selfadjointView<Eigen::Lower>().rankUpdate(v, 1.0);
    }
    Tx = Tx.selfadjointView<Eigen::Lower>();
    return Tx / static_cast<double>(x.size());
}

Eigen::VectorXd MercerSetup::fit_coeffs(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                        double lambda, const FilterSpec& filter) const {
    if (x.size() != y.size()) throw std::invalid_argument("x/y length mismatch");
    if (x.size() < 1) throw std::invalid_argument("need at least one sample");
    const int J = this->J();
    Eigen::MatrixXd Tx = empirical_covariance(x);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(J);
    for (Eigen::Index i = 0; i < x.size(); ++i) g += y[i] * feature(x[i]);
    g /= static_cast<double>(x.size());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tx);
    if (es.info() != Eigen::Success) throw std::runtime_error("covariance eigensolver failed");
    Eigen::VectorXd w = es.eigenvalues();
    Eigen::VectorXd fw(J);
    for (int i = 0; i < J; ++i)
        fw[i] = detail::filter_eval_extended(filter, lambda, std::clamp(w[i], 0.0, 1.0));
    return es.eigenvectors() * fw.cwiseProduct(es.eigenvectors().transpose() * g).eval();
}

namespace {

double operator_norm(const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()[0];
}

}  // namespace

OperatorDeviationReport operator_deviations(const MercerSetup& setup, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y, double lambda, double eta,
                                 const MixingRate& rate) {
    if (x.size() < 2) throw std::invalid_argument("need at least two samples");
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be > 0");
    if (!(eta > 0) || eta > 0.5) throw std::invalid_argument("eta must lie in (0, 1/2]");

    const auto& src = setup.source();
    const int J = setup.J();
    const long n = x.size();
    const double Nl = setup.effective_dimension(lambda);
    const double K = setup.kernel_derivative_bound();

    OperatorDeviationReport rep;
    rep.eta = eta;
    rep.lambda = lambda;
    rep.Nlambda = Nl;

    Eigen::VectorXd resid = Eigen::VectorXd::Zero(J);  // T_x f - S_x^* y
    for (long i = 0; i < n; ++i) {
        Eigen::VectorXd v = setup.feature(x[i]);
        resid += (v.dot(setup.target_coeffs()) - y[i]) * v;
    }
    resid /= static_cast<double>(n);

    Eigen::MatrixXd Tx = setup.empirical_covariance(x);
    Eigen::MatrixXd T = setup.zeta().asDiagonal();
    Eigen::VectorXd half_weights = (setup.zeta().array() + lambda).rsqrt();
    Eigen::MatrixXd diff = T - Tx;

    rep.emp[0] = resid.norm();
    rep.emp[1] = half_weights.cwiseProduct(resid).norm();
    rep.emp[2] = operator_norm(half_weights.asDiagonal() * diff);
    rep.emp[3] = operator_norm(diff);
    rep.emp_full_inverse =
        operator_norm((setup.zeta().array() + lambda).inverse().matrix().asDiagonal() * diff);

    const DeviationQuantity quantities[4] = {
        DeviationQuantity::Residual, DeviationQuantity::WeightedResidual,
        DeviationQuantity::WeightedCovarianceGap, DeviationQuantity::CovarianceGap};
    for (int idx = 0; idx < 4; ++idx)
        rep.ell[idx] =
            deviation_sample_size(quantities[idx], n, rate, K, src.R, src.D, src.Sigma, lambda, Nl);

    const double logf = std::log(2.0 / eta);
    const double sl = std::sqrt(lambda);
    rep.bound[0] = 21.0 * logf * (src.Sigma / std::sqrt(static_cast<double>(rep.ell[0])) +
                                  2.0 * src.R / static_cast<double>(rep.ell[0]));
    rep.bound[1] =
        21.0 * logf * (src.Sigma * std::sqrt(Nl) / std::sqrt(static_cast<double>(rep.ell[1])) +
                       2.0 * src.R / (sl * static_cast<double>(rep.ell[1])));
    rep.bound[2] = 21.0 * logf * (std::sqrt(Nl) / std::sqrt(static_cast<double>(rep.ell[2])) +
                                  2.0 / (sl * static_cast<double>(rep.ell[2])));
    rep.bound[3] = 42.0 * logf / std::sqrt(static_cast<double>(rep.ell[3]));
    rep.bound_full_inverse =
        21.0 * logf * (std::sqrt(Nl / lambda) / std::sqrt(static_cast<double>(rep.ell[2])) +
                       2.0 / (lambda * static_cast<double>(rep.ell[2])));
    for (int idx = 0; idx < 4; ++idx) rep.holds[idx] = rep.emp[idx] <= rep.bound[idx];
    return rep;
}

OperatorRatioCheck ratio_operator_check(const MercerSetup& setup, const Eigen::VectorXd& x,
                                        double lambda, double eta, const MixingRate& rate) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be > 0");
    if (!(eta > 0) || eta > 0.5) throw std::invalid_argument("eta must lie in (0, 1/2]");
    const auto& src = setup.source();
    const double Nl = setup.effective_dimension(lambda);
    const double K = setup.kernel_derivative_bound();
    const long n = x.size();

    long ell_prime = std::min(
        {deviation_sample_size(DeviationQuantity::WeightedResidual, n, rate, K, src.R, src.D, src.Sigma, lambda, Nl),
         deviation_sample_size(DeviationQuantity::WeightedCovarianceGap, n, rate, K, src.R, src.D, src.Sigma, lambda, Nl),
         deviation_sample_size(DeviationQuantity::CovarianceGap, n, rate, K, src.R, src.D, src.Sigma, lambda, Nl)});

    Eigen::MatrixXd Tx = setup.empirical_covariance(x);
    const int J = setup.J();
    Eigen::MatrixXd A = Tx + lambda * Eigen::MatrixXd::Identity(J, J);
    Eigen::MatrixXd B = Eigen::MatrixXd(setup.zeta().asDiagonal()) +
                        lambda * Eigen::MatrixXd::Identity(J, J);

    OperatorRatioCheck chk;
    chk.ratio = operator_norm(A.ldlt().solve(B));
    chk.within_two = chk.ratio <= 2.0;
    chk.actual = std::sqrt(static_cast<double>(ell_prime) * lambda);
    chk.required = 50.0 * std::log(2.0 / eta) * std::sqrt(std::max(Nl, 1.0));
    chk.hypothesis_ok = chk.actual >= chk.required;
    return chk;
}

Schedule lambda_schedule(MixingRegime regime, long n, const SourceCondition& source,
                         const MixingRate& rate, double K_kernel) {
    source.validate();
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(source.D >= source.R) || !(source.R >= 1.0))
        throw std::invalid_argument("schedule normalization needs D >= R >= 1");
    const double b = source.b, r = source.r;
    Schedule sch;
    if (regime == MixingRegime::ExponentialMixing) {
        if (rate.kind() != RateKind::Exponential)
            throw std::invalid_argument("exponential regime needs an exponential rate");
        double arg = 3.0 * static_cast<double>(n) * K_kernel * source.D * rate.chi() *
                     rate.theta() / source.R;
        double L = std::max(1.0, std::log(arg));
        sch.ell_prime = std::clamp(
            static_cast<long>(std::floor(static_cast<double>(n) * rate.theta() /
                                         (2.0 * std::pow(L, 1.0 / rate.gamma())))),
            1L, n);
        double expo = b / (2.0 * b * r + b + 1.0);
        sch.lambda_n = std::min(
            std::pow(source.Sigma * source.Sigma /
                         (source.D * source.D * static_cast<double>(sch.ell_prime)),
                     expo),
            1.0);
    } else {
        if (rate.kind() != RateKind::Polynomial)
            throw std::invalid_argument("polynomial regime needs a polynomial rate");
        const double g = rate.gamma();
        double expo = b / (2.0 * b * r + b + 1.0 + b * (r + 1.0) / g);
        sch.lambda_n = std::pow(static_cast<double>(n), -expo);
        double Nl = effective_dimension_powerlaw(b, source.beta, sch.lambda_n);
        sch.ell_prime = std::clamp(
            static_cast<long>(std::floor(std::pow(sch.lambda_n * Nl, 2.0 / (2.0 * g + 1.0)) *
                                         std::pow(0.5 * static_cast<double>(n),
                                                  2.0 * g / (2.0 * g + 1.0)))),
            1L, n);
    }
    return sch;
}

RegressionErrorBound regression_error_bound(double lambda, long ell_prime, const SourceCondition& source,
                                 double s, const FilterSpec& filter, double eta,
                                 double front_factor) {
    source.validate();
    if (!(lambda > 0) || lambda > 1) throw std::invalid_argument("lambda must lie in (0,1]");
    if (ell_prime < 1) throw std::invalid_argument("ell_prime must be >= 1");
    if (!(eta > 0) || eta > 1) throw std::invalid_argument("eta must lie in (0,1]");
    if (s < 0) throw std::invalid_argument("s must be >= 0");
    if (filter.qualification_q < source.r + s)
        throw std::invalid_argument("filter qualification must satisfy q >= r + s");

    const double Nl = effective_dimension_powerlaw(source.b, source.beta, lambda);
    const double logf = std::log(8.0 / eta);
    const double lp = static_cast<double>(ell_prime);

    RegressionErrorBound out;
    out.ell0 = 2500.0 * std::max(Nl, 1.0) * logf * logf / lambda;
    out.feasible = lp >= out.ell0;
    out.value = front_factor * logf * std::pow(lambda, s) *
                (source.D * (std::pow(lambda, source.r) + 1.0 / std::sqrt(lp)) +
                 source.R / (lp * lambda) +
                 std::sqrt(source.Sigma * source.Sigma * Nl / (lambda * lp)));
    return out;
}

}  // namespace depconc
