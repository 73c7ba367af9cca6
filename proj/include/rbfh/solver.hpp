#pragma once

#include "rbfh/assembly.hpp"
#include "rbfh/hmatrix.hpp"

#include <Eigen/Dense>

#include <string>

namespace rbfh {

/// Cloud, kernel, Lagrange basis and the assembled saddle system in one bundle.
struct InterpolationProblem {
    PointCloud cloud;
    KernelSpec spec;
    PolyBasis basis;
    SaddleSystem sys;
};

/// Selects the unisolvent nodes, builds the basis and assembles A, B.
InterpolationProblem make_problem(PointCloud cloud, KernelSpec spec);

/// u(x) = sum_n c_n phi(x - x_n) + sum_alpha d_alpha pi_alpha(x).
struct Interpolant {
    PointCloud cloud;
    KernelSpec spec;
    PolyBasis basis;
    Eigen::VectorXd c;
    Eigen::VectorXd d_coeffs;
};

enum class SolveMethod { Dense, HCholesky };

std::string to_string(SolveMethod m);
SolveMethod parse_solve_method(const std::string& s);

struct SolveOptions {
    SolveMethod method = SolveMethod::Dense;
    // H-Cholesky path only
    double gamma = 1.0;
    double eta = 2.0;
    std::size_t leaf_size = 32;
    double compress_eps = 1e-14;
    Truncation trunc = Truncation::tolerance(1e-12);
    int refinement_steps = 2;
};

struct SolveReport {
    double interpolation_residual = 0.0; // max_n |(Ac + B^T d - f)_n|
    double constraint_residual = 0.0;    // ||Bc||_2
    int refinement_steps = 0;
};

struct SolveResult {
    Interpolant u;
    SolveReport report;
};

/// Solves [[A, B^T], [B, 0]] (c; d) = (f; 0).
///
/// Dense: partial-pivoted LU of the saddle matrix. HCholesky: M = A + gamma B^T B
/// is compressed and factored; d comes from the small Schur system
/// (B M^{-1} B^T) d = B M^{-1} f and c = M^{-1}(f - B^T d), followed by a few
/// steps of iterative refinement against the dense residual.
SolveResult solve(const InterpolationProblem& prob, const Eigen::VectorXd& f, const SolveOptions& opts = {});

double evaluate(const Interpolant& u, std::span<const double> x);

/// |u|_a^2 = c^T A c. Throws std::domain_error if ||Bc|| > 1e-8 ||c||.
double energy(const Interpolant& u, const SaddleSystem& sys);

/// Scattered data: cloud plus one value per point.
struct DataSet {
    PointCloud cloud;
    Eigen::VectorXd f;
};

/// "d N" header then N lines "x_1 ... x_d f".
void write_data(std::ostream& os, const DataSet& data);
DataSet read_data(std::istream& is);
void write_data_file(const std::string& path, const DataSet& data);
DataSet read_data_file(const std::string& path);

} // namespace rbfh
