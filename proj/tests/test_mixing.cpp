#include <doctest.h>

#include <stdexcept>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "depconc/mixing.hpp"

using namespace depconc;

namespace {

Eigen::MatrixXd two_state(double a) {
    Eigen::MatrixXd P(2, 2);
    P << 1 - a, a, a, 1 - a;
    return P;
}

Eigen::MatrixXd random_lazy_chain(int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Eigen::MatrixXd P(m, m);
    for (int i = 0; i < m; ++i) {
        double s = 0;
        for (int j = 0; j < m; ++j) {
            P(i, j) = unif(rng);
            s += P(i, j);
        }
        P.row(i) /= s;
    }
    return 0.5 * P + 0.5 * Eigen::MatrixXd::Identity(m, m);
}

}  // namespace

TEST_CASE("rate models evaluate their closed forms") {
    auto exp_rate = MixingRate::exponential(1.0, 1.0, 1.0);
    CHECK(exp_rate(1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    auto poly = MixingRate::polynomial(1.0, 2.0);
    CHECK(poly(10) == doctest::Approx(0.01).epsilon(1e-12));

    // monotone nonincreasing in the lag
    auto exp2 = MixingRate::exponential(2.0, 0.5, 1.5);
    auto poly2 = MixingRate::polynomial(3.0, 0.7);
    for (long k = 1; k < 50; ++k) {
        CHECK(exp2(k + 1) <= exp2(k));
        CHECK(poly2(k + 1) <= poly2(k));
    }
}

TEST_CASE("tabulated rates refuse extrapolation and load from CSV") {
    auto tab = MixingRate::tabulated({0.5, 0.25, 0.1});
    CHECK(tab(2) == doctest::Approx(0.25));
    CHECK_THROWS_AS(tab(4), std::out_of_range);
    CHECK_THROWS_AS(MixingRate::tabulated({0.1, 0.5}), std::invalid_argument);

    auto path = std::filesystem::temp_directory_path() / "depconc_rate.csv";
    {
        std::ofstream f(path);
        f << "k,phi\n1,0.5\n2,0.25\n3,0.125\n";
    }
    auto loaded = MixingRate::from_csv(path);
    CHECK(loaded(3) == doctest::Approx(0.125));
    std::filesystem::remove(path);
}

TEST_CASE("seminorm constants for the two function classes") {
    auto lip = seminorm_constants(FunctionClass::Lipschitz, 1.0);
    CHECK(lip.C1 == 1.0);
    CHECK(lip.C2 == 2.0);
    auto bv1 = seminorm_constants(FunctionClass::BoundedVariation, 1.0);
    CHECK(bv1.C1 == 2.0);
    CHECK(bv1.C2 == 2.0);
    auto bv3 = seminorm_constants(FunctionClass::BoundedVariation, 3.0);
    CHECK(bv3.C1 == 6.0);
    CHECK(bv3.C2 == 18.0);
}

TEST_CASE("geometric contraction bound") {
    CHECK(ar1_tau_bound(0.0, 1.0, 5) == 0.0);
    CHECK(ar1_tau_bound(0.5, 2.0, 3) == doctest::Approx(0.25).epsilon(1e-14));
    for (long s = 1; s <= 10; ++s)
        CHECK(ar1_tau_bound(0.3, 1.7, s, true) ==
              doctest::Approx(2.0 * ar1_tau_bound(0.3, 1.7, s)).epsilon(1e-14));
}

TEST_CASE("stationary law: identity matrix has no unique one") {
    CHECK_THROWS_AS(stationary_distribution(Eigen::MatrixXd::Identity(3, 3)),
                    std::invalid_argument);
    auto pi = stationary_distribution(two_state(0.3));
    CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("two-state chain matches the closed form |1-2a|^k / 2") {
    // closed form: P^k(0,.) = ((1+(1-2a)^k)/2, (1-(1-2a)^k)/2), so the CDF
    // gap at state 0 is |1-2a|^k/2 and the states are one apart
    std::vector<double> states = {0.0, 1.0};
    for (double a : {0.1, 0.25, 0.4}) {
        for (long k = 1; k <= 30; ++k) {
            double expect = std::pow(std::abs(1.0 - 2.0 * a), static_cast<double>(k)) / 2.0;
            CHECK(std::abs(chain_tau_exact(states, two_state(a), k) - expect) <= 1e-12);
        }
    }
    // a = 1/2 is an independent sequence
    for (long k = 1; k <= 5; ++k) {
        CHECK(chain_tau_exact(states, two_state(0.5), k) == doctest::Approx(0.0));
        CHECK(chain_phitilde_exact(states, two_state(0.5), k) == doctest::Approx(0.0));
    }
    // spot value a=0.1, k=2 -> 0.32
    CHECK(chain_tau_exact(states, two_state(0.1), 2) == doctest::Approx(0.32).epsilon(1e-12));
}

TEST_CASE("sup-CDF coefficient: two-state value and scale invariance") {
    std::vector<double> states = {0.0, 1.0};
    CHECK(chain_phitilde_exact(states, two_state(0.1), 1) == doctest::Approx(0.4).epsilon(1e-12));

    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXd P = random_lazy_chain(5, rng);
        std::vector<double> s5 = {-1.0, -0.25, 0.1, 0.8, 2.0};
        std::vector<double> s5x2(s5), s5x3(s5);
        for (auto& v : s5x2) v *= 2.0;  // power of two: exact in floating point
        for (auto& v : s5x3) v *= 3.0;
        for (long k : {1L, 3L, 7L}) {
            double tau = chain_tau_exact(s5, P, k);
            CHECK(chain_tau_exact(s5x2, P, k) == 2.0 * tau);
            CHECK(chain_tau_exact(s5x3, P, k) == doctest::Approx(3.0 * tau).epsilon(1e-13));
            CHECK(chain_phitilde_exact(s5x2, P, k) ==
                  doctest::Approx(chain_phitilde_exact(s5, P, k)).epsilon(1e-13));
        }
    }
}

TEST_CASE("transport coefficient is dominated by the diameter-scaled CDF one") {
    // on states inside [-c, c] a 1-Lipschitz test function moves at most
    // the diameter times the CDF gap, so tau <= 2c * phitilde
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 8; ++rep) {
        Eigen::MatrixXd P = random_lazy_chain(4, rng);
        std::vector<double> states = {-1.2, -0.3, 0.4, 1.2};
        double c = 1.2;
        for (long k : {1L, 2L, 5L, 10L}) {
            CHECK(chain_tau_exact(states, P, k) <=
                  2.0 * c * chain_phitilde_exact(states, P, k) + 1e-14);
        }
    }
}

TEST_CASE("ergodic decay: coefficients shrink along the lag") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXd P = random_lazy_chain(5, rng);
        std::vector<double> states = {-2.0, -1.0, 0.0, 1.0, 2.0};
        double prev = chain_tau_exact(states, P, 1);
        for (long k = 2; k <= 20; ++k) {
            double cur = chain_tau_exact(states, P, k);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
        CHECK(chain_tau_exact(states, P, 200) < 1e-6);
        CHECK(chain_phitilde_exact(states, P, 200) < 1e-6);
    }
}
