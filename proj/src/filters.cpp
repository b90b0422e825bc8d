#include "depconc/filters.hpp"

#include <cmath>
#include <stdexcept>

namespace depconc {

FilterSpec FilterSpec::tikhonov() { return FilterSpec{}; }

FilterSpec FilterSpec::spectral_cutoff(double qualification) {
    FilterSpec f;
    f.family = FilterFamily::SpectralCutoff;
    f.qualification_q = qualification;
    return f;
}

FilterSpec FilterSpec::landweber() {
    FilterSpec f;
    f.family = FilterFamily::Landweber;
    f.E_const = 2.0;
    return f;
}

FilterSpec FilterSpec::custom_filter(std::function<double(double, double)> fn, double B, double E,
                                     double gamma0, double q, double gamma_q) {
    FilterSpec f;
    f.family = FilterFamily::Custom;
    f.custom = std::move(fn);
    f.B_const = B;
    f.E_const = E;
    f.gamma0 = gamma0;
    f.qualification_q = q;
    f.gamma_q = gamma_q;
    return f;
}

namespace detail {

double filter_eval_extended(const FilterSpec& filter, double lambda, double t) {
    if (!(lambda > 0) || lambda > 1.0) throw std::invalid_argument("lambda must lie in (0,1]");
    switch (filter.family) {
        case FilterFamily::Tikhonov:
            return 1.0 / (t + lambda);
        case FilterFamily::SpectralCutoff:
            return t >= lambda ? 1.0 / t : 0.0;
        case FilterFamily::Landweber: {
            const double m = std::ceil(1.0 / lambda);
            if (t == 0.0) return m;
            if (t == 1.0) return 1.0;
            // (1 - (1-t)^m) / t without cancellation
            return -std::expm1(m * std::log1p(-t)) / t;
        }
        case FilterFamily::Custom:
            if (!filter.custom) throw std::invalid_argument("custom filter lacks a function");
            return filter.custom(lambda, t);
    }
    return 0.0;
}

}  // namespace detail

double filter_eval(const FilterSpec& filter, double lambda, double t) {
    if (!(t > 0) || t > 1.0) throw std::invalid_argument("t must lie in (0,1]");
    return detail::filter_eval_extended(filter, lambda, t);
}

double filter_residual(const FilterSpec& filter, double lambda, double t) {
    if (!(t > 0) || t > 1.0) throw std::invalid_argument("t must lie in (0,1]");
    // closed forms per family: 1 - t*F(t) evaluated directly would leave
    // rounding remnants that t^q / lambda^q amplifies enormously
    switch (filter.family) {
        case FilterFamily::Tikhonov:
            if (!(lambda > 0) || lambda > 1.0)
                throw std::invalid_argument("lambda must lie in (0,1]");
            return lambda / (t + lambda);
        case FilterFamily::SpectralCutoff:
            if (!(lambda > 0) || lambda > 1.0)
                throw std::invalid_argument("lambda must lie in (0,1]");
            return t >= lambda ? 0.0 : 1.0;
        case FilterFamily::Landweber: {
            if (!(lambda > 0) || lambda > 1.0)
                throw std::invalid_argument("lambda must lie in (0,1]");
            const double m = std::ceil(1.0 / lambda);
            return std::exp(m * std::log1p(-t));  // (1-t)^m
        }
        case FilterFamily::Custom:
            return 1.0 - t * filter_eval(filter, lambda, t);
    }
    return 0.0;
}

FilterCertificate certify_filter(const FilterSpec& filter, const std::vector<double>& lambda_grid,
                                 const std::vector<double>& t_grid, const std::vector<double>& qs) {
    if (lambda_grid.empty() || t_grid.empty()) throw std::invalid_argument("empty grid");
    FilterCertificate cert;
    cert.qs = qs;
    cert.gamma_q_hat.assign(qs.size(), 0.0);
    for (double lambda : lambda_grid) {
        for (double t : t_grid) {
            double F = filter_eval(filter, lambda, t);
            double r = filter_residual(filter, lambda, t);
            cert.B_hat = std::max(cert.B_hat, std::abs(t * F));
            cert.E_hat = std::max(cert.E_hat, lambda * std::abs(F));
            cert.gamma0_hat = std::max(cert.gamma0_hat, std::abs(r));
            for (size_t i = 0; i < qs.size(); ++i) {
                double v = std::abs(r) * std::pow(t, qs[i]) / std::pow(lambda, qs[i]);
                cert.gamma_q_hat[i] = std::max(cert.gamma_q_hat[i], v);
            }
        }
    }
    const double slack = 1.0 + 1e-9;
    cert.pass = cert.B_hat <= filter.B_const * slack && cert.E_hat <= filter.E_const * slack &&
                cert.gamma0_hat <= filter.gamma0 * slack;
    for (size_t i = 0; i < qs.size(); ++i)
        if (qs[i] <= filter.qualification_q && cert.gamma_q_hat[i] > filter.gamma_q * slack)
            cert.pass = false;
    return cert;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0) || !(hi > lo) || points < 2) throw std::invalid_argument("bad grid request");
    std::vector<double> g(static_cast<size_t>(points));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < points; ++i)
        g[static_cast<size_t>(i)] =
            std::exp(llo + (lhi - llo) * static_cast<double>(i) / (points - 1));
    g.back() = hi;
    return g;
}

}  // namespace depconc
