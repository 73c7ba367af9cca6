#include "rbfh/matrix_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rbfh {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary matrix I/O assumes a little-endian host");

void put_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::invalid_argument("matrix file: truncated header");
    return v;
}

} // namespace

void write_matrix_binary(std::ostream& os, const Eigen::MatrixXd& m) {
    os.write(kMatrixMagic, sizeof kMatrixMagic);
    put_u64(os, static_cast<std::uint64_t>(m.rows()));
    put_u64(os, static_cast<std::uint64_t>(m.cols()));
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    os.write(reinterpret_cast<const char*>(rm.data()),
             static_cast<std::streamsize>(rm.size() * sizeof(double)));
    if (!os) throw std::runtime_error("matrix file: write failed");
}

Eigen::MatrixXd read_matrix_binary(std::istream& is) {
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMatrixMagic, sizeof magic) != 0)
        throw std::invalid_argument("matrix file: bad magic (expected RBFMAT01)");
    const std::uint64_t rows = get_u64(is);
    const std::uint64_t cols = get_u64(is);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(
        static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (!is.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double))))
        throw std::invalid_argument("matrix file: truncated payload");
    return rm;
}

void write_matrix_binary_file(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_matrix_binary(os, m);
}

Eigen::MatrixXd read_matrix_binary_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot open " + path);
    return read_matrix_binary(is);
}

std::uint64_t matrix_binary_size(std::uint64_t rows, std::uint64_t cols) {
    return sizeof kMatrixMagic + 2 * sizeof(std::uint64_t) + rows * cols * sizeof(double);
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
        os << '\n';
    }
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

} // namespace rbfh
