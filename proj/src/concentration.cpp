#include "depconc/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "depconc/io_util.hpp"

namespace depconc {

double ConcentrationParams::sigma() const { return std::sqrt(sigma2); }

void ConcentrationParams::validate() const {
    if (!(c > 0)) throw std::invalid_argument("c must be > 0");
    if (sigma2 < 0) throw std::invalid_argument("sigma2 must be >= 0");
    if (A1 < 1) throw std::invalid_argument("A1 must be >= 1");
    if (!(A2 > 0)) throw std::invalid_argument("A2 must be > 0");
    if (C1 < 0 || C2 < 0) throw std::invalid_argument("C1, C2 must be >= 0");
}

ConcentrationParams ConcentrationParams::hilbert_lipschitz(double c, double sigma2) {
    ConcentrationParams p;
    p.c = c;
    p.sigma2 = sigma2;
    p.A1 = p.A2 = 1.0;
    p.C1 = 1.0;
    p.C2 = 2.0 * c;
    p.validate();
    return p;
}

void BlockPartition::validate() const {
    if (n != ell * k + r || r < 0 || r >= k) throw std::runtime_error("partition arithmetic broken");
    if (static_cast<long>(blocks.size()) != k) throw std::runtime_error("block count mismatch");
    std::vector<char> seen(static_cast<size_t>(n) + 1, 0);
    long total = 0;
    for (long i = 0; i < k; ++i) {
        const auto& blk = blocks[static_cast<size_t>(i)];
        long expect = (i < r) ? ell + 1 : ell;
        if (static_cast<long>(blk.size()) != expect) throw std::runtime_error("block size mismatch");
        for (size_t j = 0; j < blk.size(); ++j) {
            if (blk[j] < 1 || blk[j] > n || seen[static_cast<size_t>(blk[j])])
                throw std::runtime_error("blocks do not partition 1..n");
            seen[static_cast<size_t>(blk[j])] = 1;
            if (j > 0 && blk[j] - blk[j - 1] != k) throw std::runtime_error("within-block gap != k");
        }
        total += static_cast<long>(blk.size());
    }
    if (total != n) throw std::runtime_error("blocks do not cover 1..n");
}

double pi_fn(double x) {
    if (x < 0) throw std::invalid_argument("pi_fn defined for x >= 0");
    return std::expm1(x) - x;
}

double p_fn(long k, double lambda, const ConcentrationParams& params, const MixingRate& rate) {
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    params.validate();
    const double phi = rate(k);
    const double a1_tilde = params.C1 * params.A1;
    return lambda * a1_tilde * phi +
           params.B() * (params.C2 * phi + params.sigma2) * pi_fn(lambda * params.c) /
               (params.c * params.c);
}

BlockPartition block_partition(long n, long k) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (k < 1 || k > n) throw std::invalid_argument("k must lie in [1, n]");
    BlockPartition p;
    p.n = n;
    p.k = k;
    p.ell = n / k;
    p.r = n % k;
    p.blocks.resize(static_cast<size_t>(k));
    for (long i = 1; i <= k; ++i) {
        auto& blk = p.blocks[static_cast<size_t>(i - 1)];
        long steps = (i <= p.r) ? p.ell : p.ell - 1;
        for (long s = 0; s <= steps; ++s) blk.push_back(i + s * k);
    }
    p.validate();
    return p;
}

long effective_sample_size_exact(long n, const ConcentrationParams& params,
                                 const MixingRate& rate) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    params.validate();
    const double sigma = params.sigma();
    for (long ell = n; ell >= 1; --ell) {
        double lhs = params.C1 * rate(n / ell);
        double rhs = std::max(params.c / static_cast<double>(ell),
                              sigma / std::sqrt(static_cast<double>(ell)));
        if (lhs <= rhs) return ell;
    }
    return 1;
}

long effective_sample_size_bound(long n, const ConcentrationParams& params,
                                 const MixingRate& rate) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    params.validate();
    double value = 0.0;
    switch (rate.kind()) {
        case RateKind::Exponential: {
            double arg = rate.chi() * rate.theta() * params.C1 * static_cast<double>(n) / params.c;
            double L = std::max(1.0, std::log(arg));
            value = std::floor(0.5 * static_cast<double>(n) * rate.theta() /
                               std::pow(L, 1.0 / rate.gamma()));
            break;
        }
        case RateKind::Polynomial: {
            const double g = rate.gamma();
            const double half_n = 0.5 * static_cast<double>(n);
            const double denom = params.C1 * rate.rho();
            double v1 = 0.0, v2 = 0.0;
            if (denom > 0) {
                v1 = std::floor(std::pow(params.sigma() / denom, 2.0 / (2.0 * g + 1.0)) *
                                std::pow(half_n, 2.0 * g / (2.0 * g + 1.0)));
                v2 = std::floor(std::pow(params.c / denom, 1.0 / (g + 1.0)) *
                                std::pow(half_n, g / (g + 1.0)));
            } else {
                v1 = static_cast<double>(n);
            }
            value = std::max(v1, v2);
            break;
        }
        case RateKind::Tabulated:
            throw std::invalid_argument(
                "closed-form bound needs a parametric rate; use effective_sample_size_exact");
    }
    if (!std::isfinite(value)) value = static_cast<double>(n);
    return std::clamp(static_cast<long>(value), 1L, n);
}

double deviation_bound_blocks(double nu, long ell, long k, const ConcentrationParams& params,
                   const MixingRate& rate) {
    if (ell < 2) throw std::invalid_argument("ell must be >= 2");
    if (!(nu > 0)) throw std::invalid_argument("nu must be > 0");
    params.validate();
    const double phi = rate(k);
    const double B = params.B();
    return 4.0 * params.A1 * params.C1 * phi +
           4.0 * std::sqrt(B * (params.sigma2 + params.C2 * phi) * nu / static_cast<double>(ell)) +
           4.0 * params.c * nu / (3.0 * static_cast<double>(ell));
}

double deviation_bound_effective(double nu, long ell_star, const ConcentrationParams& params,
                   const SeminormConstants& cls) {
    if (nu < 1.0) throw std::invalid_argument("nu must be >= 1");
    if (ell_star < 1) throw std::invalid_argument("ell_star must be >= 1");
    params.validate();
    if (!(cls.C1 > 0)) throw std::invalid_argument("class constant C1 must be > 0");
    const double B = params.B();
    const double M1 = 2.0 + 2.0 * std::sqrt(B) * (1.0 + 2.0 * cls.C2 / (cls.C1 * params.c));
    const double ls = static_cast<double>(ell_star);
    return params.sigma() * (4.0 * params.A1 + 6.0 * std::sqrt(B) * std::sqrt(nu)) / std::sqrt(ls) +
           params.c * (4.0 * params.A1 + M1 * nu) / ls;
}

double deviation_bound_hilbert(double eta, long ell_star, double sigma, double c) {
    if (!(eta > 0.0) || eta > 0.5) throw std::invalid_argument("eta must lie in (0, 1/2]");
    if (ell_star < 1) throw std::invalid_argument("ell_star must be >= 1");
    const double ls = static_cast<double>(ell_star);
    return std::log(2.0 / eta) * (13.0 * sigma / std::sqrt(ls) + 21.0 * c / ls);
}

namespace detail {

double laplace_moment_bound(double lambda, long ell, long k, const ConcentrationParams& params,
                            const MixingRate& rate) {
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    if (ell < 1) throw std::invalid_argument("ell must be >= 1");
    params.validate();
    const double phi = rate(k);
    const double B = params.B();
    const double c2 = params.c * params.c;
    double expo = (B / c2) *
                      ((static_cast<double>(ell) + 1.0) * params.sigma2 +
                       params.C2 * static_cast<double>(ell) * phi) *
                      pi_fn(lambda * params.c / static_cast<double>(ell)) +
                  lambda * params.C1 * params.A1 * phi;
    return 2.0 * std::exp(expo);
}

}  // namespace detail

namespace {

struct PresetConstants {
    double c;
    double sigma2;
    MixingRate rate;
};

PresetConstants preset_constants(const ProcessSpec& spec, long n) {
    switch (spec.kind) {
        case ProcessKind::HilbertAR1:
            return {ar1_marginal_bound(spec), ar1_second_moment(spec), ar1_mixing_rate(spec)};
        case ProcessKind::HilbertMA:
            return {ma_marginal_bound(spec), ma_second_moment(spec), ma_mixing_rate(spec, n)};
        default:
            throw std::invalid_argument(
                "deviation check needs a preset with analytic constants (AR1 or MA)");
    }
}

}  // namespace

DeviationReport mc_deviation_check(const ProcessSpec& spec, long n, long trials, double eta,
                                   int n_threads) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    PresetConstants pc = preset_constants(spec, n);

    ConcentrationParams params = ConcentrationParams::hilbert_lipschitz(pc.c, pc.sigma2);
    DeviationReport rep;
    rep.n = n;
    rep.trials = trials;
    rep.eta = eta;
    rep.c = pc.c;
    rep.sigma = std::sqrt(pc.sigma2);
    rep.ell_star = effective_sample_size_exact(n, params, pc.rate);
    rep.bound = deviation_bound_hilbert(eta, rep.ell_star, rep.sigma, rep.c);

    rep.norms.assign(static_cast<size_t>(trials), 0.0);
    auto run_range = [&](long lo, long hi) {
        ProcessSpec trial_spec = spec;
        for (long t = lo; t < hi; ++t) {
            trial_spec.seed = spec.seed + static_cast<std::uint64_t>(t) + 1;
            Trajectory traj = (spec.kind == ProcessKind::HilbertAR1)
                                  ? simulate_ar1(trial_spec, n)
                                  : simulate_ma(trial_spec, n);
            rep.norms[static_cast<size_t>(t)] = traj.values.colwise().mean().norm();
        }
    };

    int workers = n_threads > 0 ? n_threads
                                : static_cast<int>(std::min<unsigned>(
                                      std::max(1u, std::thread::hardware_concurrency()), 8u));
    workers = static_cast<int>(std::min<long>(workers, trials));
    if (workers <= 1) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        long chunk = (trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long lo = w * chunk, hi = std::min(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    rep.empirical_quantile = quantile_order_statistic(rep.norms, 1.0 - eta);
    rep.holds = rep.empirical_quantile <= rep.bound;
    return rep;
}

}  // namespace depconc
