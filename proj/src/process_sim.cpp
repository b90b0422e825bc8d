#include "depconc/process_sim.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "depconc/io_util.hpp"

namespace depconc {

double Trajectory::max_row_norm() const {
    double m = 0.0;
    for (Eigen::Index i = 0; i < values.rows(); ++i) m = std::max(m, values.row(i).norm());
    return m;
}

void Trajectory::validate() const {
    if (max_row_norm() > marginal_bound_c + 1e-12)
        throw std::runtime_error("path exceeds recorded marginal bound");
}

void Trajectory::write_csv(const std::filesystem::path& file) const {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out.precision(17);
    out << "t";
    for (long j = 1; j <= dim(); ++j) out << ",x" << j;
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << (i + 1);
        for (Eigen::Index j = 0; j < values.cols(); ++j) out << ',' << values(i, j);
        out << '\n';
    }
}

Trajectory Trajectory::read_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,", 0) != 0)
        throw std::runtime_error("missing t,x1.. header in " + file.string());
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty trajectory file");
    Trajectory t;
    const auto d = rows.front().size() - 1;
    t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d + 1) throw std::runtime_error("ragged trajectory row");
        for (size_t j = 0; j < d; ++j) t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j + 1];
    }
    t.marginal_bound_c = t.max_row_norm();
    t.second_moment_sigma2 = t.values.rowwise().squaredNorm().mean();
    return t;
}

namespace {
constexpr char kMagic[8] = {'D', 'E', 'P', 'C', '0', '0', '0', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}
}  // namespace

void Trajectory::write_binary(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out.write(kMagic, 8);
    put_u64(out, static_cast<std::uint64_t>(n()));
    put_u64(out, static_cast<std::uint64_t>(dim()));
    double meta[3] = {marginal_bound_c, second_moment_sigma2, tau_scale};
    out.write(reinterpret_cast<const char*>(meta), sizeof(meta));
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        out.write(reinterpret_cast<const char*>(values.row(i).eval().data()),
                  static_cast<std::streamsize>(sizeof(double)) * values.cols());
}

Trajectory Trajectory::read_binary(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("bad magic in " + file.string());
    Trajectory t;
    auto n = static_cast<Eigen::Index>(get_u64(in));
    auto d = static_cast<Eigen::Index>(get_u64(in));
    double meta[3];
    in.read(reinterpret_cast<char*>(meta), sizeof(meta));
    t.marginal_bound_c = meta[0];
    t.second_moment_sigma2 = meta[1];
    t.tau_scale = meta[2];
    t.values.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd row(d);
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(sizeof(double)) * d);
        t.values.row(i) = row;
    }
    if (!in) throw std::runtime_error("truncated trajectory file");
    return t;
}

void ProcessSpec::validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (noise_bound <= 0 || !std::isfinite(noise_bound))
        throw std::invalid_argument("noise_bound must be positive and finite");
    switch (kind) {
        case ProcessKind::HilbertAR1:
            if (rho_norm < 0 || rho_norm >= 1)
                throw std::invalid_argument("rho_norm must lie in [0,1) (contractive)");
            break;
        case ProcessKind::HilbertMA:
            if (ma_weights.empty()) throw std::invalid_argument("ma_weights must be nonempty");
            if (static_cast<int>(ma_weights.size()) != ma_order + 1)
                throw std::invalid_argument("ma_weights must have length ma_order+1");
            break;
        case ProcessKind::FiniteChain: {
            if (chain_states.size() < 1) throw std::invalid_argument("chain needs states");
            for (size_t i = 1; i < chain_states.size(); ++i)
                if (!(chain_states[i] > chain_states[i - 1]))
                    throw std::invalid_argument("chain_states must be strictly increasing");
            if (chain_matrix.rows() != static_cast<Eigen::Index>(chain_states.size()) ||
                chain_matrix.cols() != chain_matrix.rows())
                throw std::invalid_argument("chain_matrix shape mismatch");
            for (Eigen::Index i = 0; i < chain_matrix.rows(); ++i) {
                if (chain_matrix.row(i).minCoeff() < 0)
                    throw std::invalid_argument("chain_matrix entries must be >= 0");
                if (std::abs(chain_matrix.row(i).sum() - 1.0) > 1e-12)
                    throw std::invalid_argument("chain_matrix rows must sum to 1");
            }
            break;
        }
        case ProcessKind::LipschitzImage:
            break;
    }
}

namespace detail {

void sample_ball(std::mt19937_64& rng, double radius, Eigen::Ref<Eigen::VectorXd> out) {
    const auto d = out.size();
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double nrm2 = 0.0;
    do {
        for (Eigen::Index i = 0; i < d; ++i) {
            out[i] = gauss(rng);
        }
        nrm2 = out.squaredNorm();
    } while (nrm2 == 0.0);
    double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(d));
    out *= r / std::sqrt(nrm2);
}

long ar1_burn_in(double rho_norm) {
    if (rho_norm <= 0.0) return 0;
    double steps = std::ceil(std::log(1e-12) / std::log(rho_norm));
    return static_cast<long>(std::min(steps, 1e6));
}

}  // namespace detail

namespace {

Eigen::VectorXd contraction_diagonal(double rho_norm, int d) {
    Eigen::VectorXd diag(d);
    double v = rho_norm;
    for (int i = 0; i < d; ++i) {
        diag[i] = v;
        v *= detail::kContractionDecay;
    }
    return diag;
}

void finish_moments(Trajectory& t) {
    t.second_moment_sigma2 = t.values.rowwise().squaredNorm().mean();
}

}  // namespace

Trajectory simulate_ar1(const ProcessSpec& spec, long n) {
    spec.validate();
    if (spec.kind != ProcessKind::HilbertAR1) throw std::invalid_argument("spec.kind != HilbertAR1");
    if (n < 1) throw std::invalid_argument("n must be >= 1");

    const int d = spec.dim;
    Eigen::VectorXd rho = contraction_diagonal(spec.rho_norm, d);
    auto rng = make_engine(spec.seed, 0);
    Eigen::VectorXd state = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd xi(d);

    const long burn = detail::ar1_burn_in(spec.rho_norm);
    for (long i = 0; i < burn; ++i) {
        detail::sample_ball(rng, spec.noise_bound, xi);
        state = rho.cwiseProduct(state) + xi;
    }

    Trajectory t;
    t.values.resize(n, d);
    for (long i = 0; i < n; ++i) {
        detail::sample_ball(rng, spec.noise_bound, xi);
        state = rho.cwiseProduct(state) + xi;
        t.values.row(i) = state;
    }
    t.marginal_bound_c = ar1_marginal_bound(spec);
    finish_moments(t);
    t.validate();
    return t;
}

Trajectory simulate_ma(const ProcessSpec& spec, long n) {
    spec.validate();
    if (spec.kind != ProcessKind::HilbertMA) throw std::invalid_argument("spec.kind != HilbertMA");
    if (n < 1) throw std::invalid_argument("n must be >= 1");

    const int d = spec.dim;
    const int q = spec.ma_order;
    auto rng = make_engine(spec.seed, 0);

    // q pre-samples so W_1 already has the stationary law
    Eigen::MatrixXd noise(n + q, d);
    Eigen::VectorXd xi(d);
    for (long i = 0; i < n + q; ++i) {
        detail::sample_ball(rng, spec.noise_bound, xi);
        noise.row(i) = xi;
    }

    Trajectory t;
    t.values.setZero(n, d);
    for (long i = 0; i < n; ++i)
        for (int j = 0; j <= q; ++j)
            t.values.row(i) += spec.ma_weights[static_cast<size_t>(j)] * noise.row(i + q - j);

    t.marginal_bound_c = ma_marginal_bound(spec);
    finish_moments(t);
    t.validate();
    return t;
}

Trajectory simulate_chain(const ProcessSpec& spec, long n) {
    spec.validate();
    if (spec.kind != ProcessKind::FiniteChain) throw std::invalid_argument("spec.kind != FiniteChain");
    if (n < 1) throw std::invalid_argument("n must be >= 1");

    Eigen::VectorXd pi = stationary_distribution(spec.chain_matrix);
    const auto m = static_cast<size_t>(pi.size());
    double mean = 0.0;
    for (size_t i = 0; i < m; ++i) mean += pi[static_cast<Eigen::Index>(i)] * spec.chain_states[i];

    auto rng = make_engine(spec.seed, 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw = [&](const Eigen::VectorXd& probs) {
        double u = unif(rng), acc = 0.0;
        for (Eigen::Index j = 0; j < probs.size(); ++j) {
            acc += probs[j];
            if (u <= acc) return j;
        }
        return probs.size() - 1;
    };

    Eigen::Index s = draw(pi);
    Trajectory t;
    t.values.resize(n, 1);
    for (long i = 0; i < n; ++i) {
        t.values(i, 0) = spec.chain_states[static_cast<size_t>(s)] - mean;
        s = draw(spec.chain_matrix.row(s).transpose());
    }
    double bound = 0.0;
    for (size_t i = 0; i < m; ++i) bound = std::max(bound, std::abs(spec.chain_states[i] - mean));
    t.marginal_bound_c = bound;
    finish_moments(t);
    t.validate();
    return t;
}

Trajectory lipschitz_image(const Trajectory& traj, double lip_const, LipschitzMap map_id) {
    if (lip_const <= 0) throw std::invalid_argument("lip_const must be > 0");
    Trajectory out;
    out.values = traj.values;
    out.tau_scale = traj.tau_scale * lip_const;
    switch (map_id) {
        case LipschitzMap::Identity:
            out.marginal_bound_c = traj.marginal_bound_c;
            break;
        case LipschitzMap::ConstantZero:
            out.values.setZero();
            out.marginal_bound_c = 0.0;
            break;
        case LipschitzMap::ClipHalf:
            out.values = out.values.cwiseMax(-0.5).cwiseMin(0.5);
            out.marginal_bound_c = 0.5 * std::sqrt(static_cast<double>(traj.dim()));
            break;
        case LipschitzMap::AffineToUnit: {
            // (x/(2c) + 1/2) clipped to [0,1] per coordinate
            double c = traj.marginal_bound_c;
            if (c <= 0) throw std::invalid_argument("affine map needs a positive bound");
            out.values = ((out.values.array() / (2.0 * c)) + 0.5).cwiseMax(0.0).cwiseMin(1.0);
            out.marginal_bound_c = std::sqrt(static_cast<double>(traj.dim()));
            break;
        }
        default:
            throw std::invalid_argument("unknown map_id");
    }
    out.second_moment_sigma2 = out.values.rowwise().squaredNorm().mean();
    out.validate();
    return out;
}

double ar1_marginal_bound(const ProcessSpec& spec) {
    return spec.noise_bound / (1.0 - spec.rho_norm);
}

double ar1_second_moment(const ProcessSpec& spec) {
    // E||X||^2 = sum_s E||rho^s xi||^2 with per-coordinate innovation
    // variance R^2/(d+2) for the ball-uniform law
    const int d = spec.dim;
    const double per_coord = spec.noise_bound * spec.noise_bound / (d + 2.0);
    Eigen::VectorXd rho = contraction_diagonal(spec.rho_norm, d);
    double total = 0.0;
    for (int i = 0; i < d; ++i) total += per_coord / (1.0 - rho[i] * rho[i]);
    return total;
}

MixingRate ar1_mixing_rate(const ProcessSpec& spec, bool conservative) {
    if (spec.rho_norm == 0.0) return MixingRate::zero();
    double chi = ar1_marginal_bound(spec) * (conservative ? 2.0 : 1.0);
    return MixingRate::exponential(chi, std::log(1.0 / spec.rho_norm), 1.0);
}

double ma_marginal_bound(const ProcessSpec& spec) {
    double s = 0.0;
    for (double w : spec.ma_weights) s += std::abs(w);
    return spec.noise_bound * s;
}

double ma_second_moment(const ProcessSpec& spec) {
    double s2 = 0.0;
    for (double w : spec.ma_weights) s2 += w * w;
    const double d = spec.dim;
    return s2 * spec.noise_bound * spec.noise_bound * d / (d + 2.0);
}

MixingRate ma_mixing_rate(const ProcessSpec& spec, long max_lag, bool conservative) {
    if (max_lag < 1) throw std::invalid_argument("max_lag must be >= 1");
    std::vector<double> phi(static_cast<size_t>(max_lag), 0.0);
    for (long k = 1; k <= std::min<long>(max_lag, spec.ma_order); ++k) {
        double tail = 0.0;
        for (size_t j = static_cast<size_t>(k); j < spec.ma_weights.size(); ++j)
            tail += std::abs(spec.ma_weights[j]);
        phi[static_cast<size_t>(k - 1)] = (conservative ? 2.0 : 1.0) * spec.noise_bound * tail;
    }
    return MixingRate::tabulated(std::move(phi));
}

}  // namespace depconc
