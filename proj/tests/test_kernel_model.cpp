#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <random>

#include "depconc/io_util.hpp"
#include "depconc/kernel_model.hpp"

using namespace depconc;

namespace {

Eigen::VectorXd uniform_vec(long n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> unif(lo, hi);
    Eigen::VectorXd v(n);
    for (long i = 0; i < n; ++i) v[i] = unif(rng);
    return v;
}

Eigen::MatrixXd gram(const Kernel& k, const Eigen::VectorXd& x) {
    Eigen::MatrixXd K(x.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        for (Eigen::Index j = 0; j < x.size(); ++j) K(i, j) = k(x[i], x[j]);
    return K;
}

}  // namespace

TEST_CASE("kernels respect the unit diagonal bound") {
    std::mt19937_64 rng(2);
    auto xs = uniform_vec(200, rng);
    for (const Kernel& k :
         {Kernel::gaussian(0.2), Kernel::sobolev_spline(), Kernel::mercer_cosine(64, 2.0)}) {
        for (Eigen::Index i = 0; i < xs.size(); ++i) CHECK(k(xs[i], xs[i]) <= 1.0 + 1e-12);
    }
    CHECK(Kernel::gaussian(0.2)(0.3, 0.3) == doctest::Approx(1.0));
}

TEST_CASE("ridge identity: filtered fit equals the direct linear solve") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        long n = 5 + static_cast<long>(uniform_vec(1, rng)[0] * 195);
        auto x = uniform_vec(n, rng);
        auto y = uniform_vec(n, rng, -1.0, 1.0);
        double lambda = 0.01 + 0.5 * uniform_vec(1, rng)[0];
        Kernel kern = (rep % 2) ? Kernel::gaussian(0.3) : Kernel::mercer_cosine(32, 2.0);

        KernelModel model = fit(x, y, lambda, FilterSpec::tikhonov(), kern);
        Eigen::MatrixXd K = gram(kern, x);
        // (1/n)(K/n + lambda I)^{-1} y = (K + n lambda I)^{-1} y
        Eigen::VectorXd beta =
            (K + static_cast<double>(n) * lambda * Eigen::MatrixXd::Identity(n, n)).ldlt().solve(y);
        Eigen::VectorXd pred_direct = K * beta;
        Eigen::VectorXd pred_model = model.predict(x);
        CHECK((pred_direct - pred_model).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("iterative route reproduces the Landweber filter") {
    std::mt19937_64 rng(37);
    for (int rep = 0; rep < 10; ++rep) {
        long n = 20 + 10 * rep;
        auto x = uniform_vec(n, rng);
        auto y = uniform_vec(n, rng, -1.0, 1.0);
        double lambda = 0.05 + 0.1 * uniform_vec(1, rng)[0];
        Kernel kern = Kernel::gaussian(0.25);

        KernelModel model = fit(x, y, lambda, FilterSpec::landweber(), kern);

        // alpha via m explicit residual sweeps on the normalized Gram system
        Eigen::MatrixXd Kn = gram(kern, x) / static_cast<double>(n);
        long m = static_cast<long>(std::ceil(1.0 / lambda));
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
        for (long i = 0; i < m; ++i) alpha += y - Kn * alpha;
        CHECK((alpha - model.alpha).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("single support point with a cutoff reproduces the label") {
    Eigen::VectorXd x(1), y(1);
    x << 0.4;
    y << 0.7;
    auto model = fit(x, y, 0.5, FilterSpec::spectral_cutoff(), Kernel::gaussian(0.3));
    CHECK(model.predict(0.4) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("very strong regularization shrinks predictions toward zero") {
    std::mt19937_64 rng(41);
    auto x = uniform_vec(50, rng);
    auto y = uniform_vec(50, rng, -1.0, 1.0);
    auto model = fit(x, y, 1.0, FilterSpec::tikhonov(), Kernel::gaussian(0.3));
    // fitted values are (K/n) F(K/n) y and t/(t+1) <= 1/2 on the unit spectrum
    CHECK(model.predict(x).norm() <= 0.5 * y.norm() + 1e-12);
}

TEST_CASE("model JSON round trip preserves predictions") {
    std::mt19937_64 rng(43);
    auto x = uniform_vec(30, rng);
    auto y = uniform_vec(30, rng, -1.0, 1.0);
    auto model = fit(x, y, 0.1, FilterSpec::tikhonov(), Kernel::mercer_cosine(16, 2.0));

    auto path = std::filesystem::temp_directory_path() / "depconc_model.json";
    model.save_json(path);
    auto back = KernelModel::load_json(path);
    std::filesystem::remove(path);

    auto probe = uniform_vec(20, rng);
    CHECK((model.predict(probe) - back.predict(probe)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("dataset CSV round trip") {
    std::mt19937_64 rng(47);
    auto x = uniform_vec(25, rng);
    auto y = uniform_vec(25, rng, -1.0, 1.0);
    auto path = std::filesystem::temp_directory_path() / "depconc_data.csv";
    write_dataset_csv(x, y, path);
    Eigen::VectorXd x2, y2;
    read_dataset_csv(path, x2, y2);
    std::filesystem::remove(path);
    CHECK((x - x2).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((y - y2).cwiseAbs().maxCoeff() <= 1e-15);
}
