#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace rbfh {

// Binary matrix format: 8-byte magic "RBFMAT01", uint64 rows, uint64 cols
// (little-endian), then rows*cols float64 values in row-major order.
inline constexpr char kMatrixMagic[8] = {'R', 'B', 'F', 'M', 'A', 'T', '0', '1'};

void write_matrix_binary(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_binary(std::istream& is);
void write_matrix_binary_file(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_binary_file(const std::string& path);

/// Number of bytes write_matrix_binary emits for a rows x cols matrix.
std::uint64_t matrix_binary_size(std::uint64_t rows, std::uint64_t cols);

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);

/// 64-bit FNV-1a; used for config and node-file fingerprints.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

} // namespace rbfh
