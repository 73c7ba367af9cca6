#pragma once

#include "rbfh/geometry.hpp"
#include "rbfh/kernels.hpp"
#include "rbfh/polybasis.hpp"

#include <Eigen/Dense>

namespace rbfh {

/// A = (phi(x_m - x_n))_{mn} and B = (pi_beta(x_n))_{beta n}.
struct SaddleSystem {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;

    Eigen::Index n() const { return A.rows(); }
    Eigen::Index n_min() const { return B.rows(); }
};

/// Lower triangle is evaluated, upper mirrored, so A is bitwise symmetric.
SaddleSystem assemble_system(const PointCloud& cloud, const KernelSpec& spec, const PolyBasis& basis);

/// [[A, B^T], [B, 0]].
Eigen::MatrixXd assemble_saddle_matrix(const SaddleSystem& sys);

/// A + gamma B^T B.
Eigen::MatrixXd augmented_lagrangian(const SaddleSystem& sys, double gamma);

} // namespace rbfh
