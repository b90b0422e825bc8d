#include "depconc/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace depconc {

namespace {

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        size_t pos = 0;
        double v = std::stod(cell, &pos);
        out.push_back(v);
    }
    return out;
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(parse_row(line));
        if (rows.back().size() != rows.front().size())
            throw std::runtime_error("ragged CSV row in " + file.string());
    }
    if (rows.empty()) throw std::runtime_error("empty CSV " + file.string());
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

void read_dataset_csv(const std::filesystem::path& file, Eigen::VectorXd& x, Eigen::VectorXd& y) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::vector<double> xs, ys;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("x,", 0) == 0) continue;  // header
        auto row = parse_row(line);
        if (row.size() != 2) throw std::runtime_error("expected 2 columns in " + file.string());
        xs.push_back(row[0]);
        ys.push_back(row[1]);
    }
    x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
}

void write_dataset_csv(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const std::filesystem::path& file) {
    if (x.size() != y.size()) throw std::invalid_argument("x/y length mismatch");
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out.precision(17);
    out << "x,y\n";
    for (Eigen::Index i = 0; i < x.size(); ++i) out << x[i] << ',' << y[i] << '\n';
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream & 0xffffffffu),
                      static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
    return s;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    std::sort(v.begin(), v.end());
    size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double quantile_order_statistic(std::vector<double> v, double level) {
    if (v.empty()) throw std::invalid_argument("quantile of empty set");
    if (level <= 0.0 || level > 1.0) throw std::invalid_argument("quantile level in (0,1]");
    std::sort(v.begin(), v.end());
    // conservative order statistic, index ceil(level * n), 1-based
    size_t idx = static_cast<size_t>(std::ceil(level * static_cast<double>(v.size())));
    idx = std::min(std::max<size_t>(idx, 1), v.size());
    return v[idx - 1];
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("slope needs >= 2 points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("degenerate abscissa for slope");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace depconc
