#ifndef DEPCONC_IO_UTIL_HPP
#define DEPCONC_IO_UTIL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace depconc {

// Dense row-major CSV, no header. Throws on ragged rows or parse failure.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& file);
void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& file);

// Two-column CSV (x,y), optional header line "x,y".
void read_dataset_csv(const std::filesystem::path& file, Eigen::VectorXd& x, Eigen::VectorXd& y);
void write_dataset_csv(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const std::filesystem::path& file);

// Deterministic engine for a (seed, stream) pair. Streams keep parallel
// workers reproducible regardless of scheduling.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream);

// FNV-1a, used for content-derived run directories.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

double median(std::vector<double> v);
double quantile_order_statistic(std::vector<double> v, double level);

// Least-squares slope of y against x. Requires at least two points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace depconc

#endif
