#pragma once

#include "rbfh/assembly.hpp"
#include "rbfh/clustering.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace rbfh {

enum class Precision { Double, DoubleDouble };

std::string to_string(Precision p);
Precision parse_precision(const std::string& s);

/// Blocks of the inverse interpolation matrix [[A, B^T], [B, 0]]^{-1}.
struct InverseBlocks {
    Eigen::MatrixXd S11; // N x N
    Eigen::MatrixXd S12; // N x N_min
    Eigen::MatrixXd S21; // N_min x N
    Eigen::MatrixXd S22; // N_min x N_min
    Precision precision = Precision::Double;
    double residual = 0.0;            // || K S - I ||_max
    double condition_estimate = 0.0;  // ||K||_1 ||S||_1
    double tolerance = 1e-8;
    bool valid() const { return residual <= tolerance; }
};

/// Dense inverse via LU with partial pivoting on the full saddle matrix.
/// DoubleDouble runs the elimination and the residual check in double-double.
/// Throws std::runtime_error for an exactly singular matrix.
InverseBlocks dense_inverse(const SaddleSystem& sys, Precision precision = Precision::Double);

/// Dense inverse of an arbitrary square matrix in double-double (exposed for testing).
Eigen::MatrixXd dd_inverse(const Eigen::MatrixXd& k);

struct BlockSpectrum {
    BlockId block;
    Eigen::VectorXd sigma; // sigma_1 .. sigma_{r_max+1}, zero-padded
};

/// Singular values of S11 on every admissible block and the computable bound
/// bound(r) = depth * max_b sigma_{r+1}(S11|_b), r = 0..r_max.
struct SpectrumReport {
    std::vector<BlockSpectrum> blocks;
    int depth = 1;
    int sparsity_constant = 0;
    int r_max = 0;

    double max_sigma(int index) const; // max_b sigma_index, 1-based
    double bound(int r) const { return depth * max_sigma(r + 1); }
    std::vector<double> bound_curve() const; // bound(0..r_max)
};

/// `s11` in the original ordering.
SpectrumReport blockwise_spectra(const Eigen::MatrixXd& s11, const BlockPartition& p, int r_max);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;
};

/// Least-squares fit of log(values[r]) against r for r in [r_lo, r_hi];
/// nonpositive values are skipped, fewer than 3 usable points throw.
DecayFit decay_fit(std::span<const double> values_by_r, int r_lo, int r_hi);
DecayFit decay_fit(const SpectrumReport& report, int r_lo, int r_hi);

/// ||S11 - M_r||_2 for the blockwise best rank-r H-matrix M_r (dense SVD).
double best_approximation_error(const Eigen::MatrixXd& s11, std::shared_ptr<const BlockPartition> p, int r);

/// Largest singular value of a dense matrix.
double spectral_norm(const Eigen::MatrixXd& m);

} // namespace rbfh
