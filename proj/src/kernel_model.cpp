#include "depconc/kernel_model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace depconc {

using json = nlohmann::ordered_json;

Kernel Kernel::gaussian(double width) {
    if (!(width > 0)) throw std::invalid_argument("width must be > 0");
    Kernel k;
    k.kind = Kind::Gaussian;
    k.width = width;
    return k;
}

Kernel Kernel::sobolev_spline() {
    Kernel k;
    k.kind = Kind::SobolevSpline;
    return k;
}

Kernel Kernel::mercer_cosine(int terms, double decay_b) {
    if (terms < 1) throw std::invalid_argument("terms must be >= 1");
    if (!(decay_b > 1)) throw std::invalid_argument("decay_b must be > 1");
    Kernel k;
    k.kind = Kind::MercerCosine;
    k.terms = terms;
    k.decay_b = decay_b;
    // sup_x k(x,x) is attained at x = 0 where every basis function peaks:
    // sup = scale * (1 + 2 sum_{j>=2} j^(-b)); choose scale so the sup is 1.
    double s = 1.0;
    for (int j = 2; j <= terms; ++j) s += 2.0 * std::pow(static_cast<double>(j), -decay_b);
    k.scale = 1.0 / s;
    return k;
}

double Kernel::operator()(double x, double y) const {
    switch (kind) {
        case Kind::Gaussian: {
            double d = x - y;
            return std::exp(-d * d / (2.0 * width * width));
        }
        case Kind::SobolevSpline:
            if (x < 0 || x > 1 || y < 0 || y > 1)
                throw std::invalid_argument("spline kernel defined on [0,1]");
            return std::min(x, y);
        case Kind::MercerCosine: {
            double acc = scale;
            for (int j = 2; j <= terms; ++j) {
                double w = static_cast<double>(j - 1) * std::numbers::pi;
                acc += scale * std::pow(static_cast<double>(j), -decay_b) * 2.0 * std::cos(w * x) *
                       std::cos(w * y);
            }
            return acc;
        }
    }
    return 0.0;
}

std::string Kernel::kind_name() const {
    switch (kind) {
        case Kind::Gaussian:
            return "gaussian";
        case Kind::SobolevSpline:
            return "sobolev_spline";
        case Kind::MercerCosine:
            return "mercer_cosine";
    }
    return "?";
}

double KernelModel::predict(double x) const {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < support_x.size(); ++j) acc += alpha[j] * kernel(support_x[j], x);
    return acc / static_cast<double>(support_x.size());
}

Eigen::VectorXd KernelModel::predict(const Eigen::VectorXd& xs) const {
    Eigen::VectorXd out(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i) out[i] = predict(xs[i]);
    return out;
}

namespace {

std::string family_name(FilterFamily f) {
    switch (f) {
        case FilterFamily::Tikhonov:
            return "tikhonov";
        case FilterFamily::SpectralCutoff:
            return "spectral_cutoff";
        case FilterFamily::Landweber:
            return "landweber";
        case FilterFamily::Custom:
            return "custom";
    }
    return "?";
}

FilterSpec filter_from_name(const std::string& name) {
    if (name == "tikhonov") return FilterSpec::tikhonov();
    if (name == "spectral_cutoff") return FilterSpec::spectral_cutoff();
    if (name == "landweber") return FilterSpec::landweber();
    throw std::invalid_argument("unknown filter family: " + name);
}

}  // namespace

void KernelModel::save_json(const std::filesystem::path& file) const {
    json j;
    j["kernel"] = {{"kind", kernel.kind_name()},
                   {"width", kernel.width},
                   {"terms", kernel.terms},
                   {"decay_b", kernel.decay_b}};
    j["lambda"] = lambda;
    j["filter"] = family_name(filter.family);
    j["support_x"] = std::vector<double>(support_x.data(), support_x.data() + support_x.size());
    j["alpha"] = std::vector<double>(alpha.data(), alpha.data() + alpha.size());
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << j.dump(2) << '\n';
}

KernelModel KernelModel::load_json(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    json j = json::parse(in);
    KernelModel m;
    std::string kind = j.at("kernel").at("kind");
    if (kind == "gaussian") {
        m.kernel = Kernel::gaussian(j.at("kernel").at("width"));
    } else if (kind == "sobolev_spline") {
        m.kernel = Kernel::sobolev_spline();
    } else if (kind == "mercer_cosine") {
        m.kernel = Kernel::mercer_cosine(j.at("kernel").at("terms"), j.at("kernel").at("decay_b"));
    } else {
        throw std::invalid_argument("unknown kernel kind: " + kind);
    }
    m.lambda = j.at("lambda");
    m.filter = filter_from_name(j.at("filter"));
    std::vector<double> sx = j.at("support_x"), al = j.at("alpha");
    m.support_x = Eigen::Map<Eigen::VectorXd>(sx.data(), static_cast<Eigen::Index>(sx.size()));
    m.alpha = Eigen::Map<Eigen::VectorXd>(al.data(), static_cast<Eigen::Index>(al.size()));
    return m;
}

KernelModel fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double lambda,
                const FilterSpec& filter, const Kernel& kernel) {
    if (x.size() < 1) throw std::invalid_argument("need at least one sample");
    if (x.size() != y.size()) throw std::invalid_argument("x/y length mismatch");
    if (!(lambda > 0) || lambda > 1) throw std::invalid_argument("lambda must lie in (0,1]");

    const auto n = x.size();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            double v = kernel(x[i], x[j]);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K / static_cast<double>(n));
    if (es.info() != Eigen::Success) throw std::runtime_error("Gram eigendecomposition failed");
    Eigen::VectorXd w = es.eigenvalues();
    if (w.minCoeff() < -1e-10) throw std::runtime_error("Gram matrix is not positive semidefinite");
    if (w.maxCoeff() > 1.0 + 1e-10)
        throw std::runtime_error("Gram spectrum exceeds the unit kernel bound");
    Eigen::VectorXd fw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double t = std::clamp(w[i], 0.0, 1.0);
        fw[i] = detail::filter_eval_extended(filter, lambda, t);
    }
    KernelModel m;
    m.kernel = kernel;
    m.support_x = x;
    m.lambda = lambda;
    m.filter = filter;
    m.alpha = es.eigenvectors() * fw.cwiseProduct(es.eigenvectors().transpose() * y).eval();
    return m;
}

}  // namespace depconc
