#pragma once

#include "rbfh/geometry.hpp"
#include "rbfh/kernels.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace rbfh {

struct MultiIndex {
    std::vector<int> exponents;

    int degree() const;
    bool operator==(const MultiIndex&) const = default;
};

/// All multi-indices with |alpha| <= max_degree in graded-lexicographic order,
/// e.g. d=2, max_degree=1 gives (0,0), (1,0), (0,1). Empty for max_degree = -1.
std::vector<MultiIndex> enumerate_multi_indices(int dim, int max_degree);

/// Lagrange basis pi_alpha of P_{k_min-1}(R^d) for a unisolvent node set.
///
/// Monomials are taken in the affinely scaled variable z = (x - center) / half_width,
/// where center/half_width come from the bounding box of the source cloud.
/// `coeffs` column beta holds pi_beta in that monomial basis.
struct PolyBasis {
    int dim = 0;
    std::vector<MultiIndex> indices;
    std::vector<std::size_t> node_indices;
    std::vector<double> nodes; // point-major coordinates of xi_alpha
    std::vector<double> center;
    std::vector<double> half_width;
    Eigen::MatrixXd coeffs;

    std::size_t size() const { return indices.size(); }
    std::span<const double> node(std::size_t a) const {
        return {nodes.data() + a * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }

    /// Scaled monomial values (m_gamma(z(x)))_gamma.
    Eigen::VectorXd monomials(std::span<const double> x) const;
};

/// Greedy row-pivoted elimination on the monomial Vandermonde of the cloud.
/// Returns N_min indices into the cloud, or throws if the cloud is not unisolvent.
std::vector<std::size_t> select_unisolvent_subset(const PointCloud& cloud, const KernelSpec& spec);

PolyBasis build_lagrange_basis(const PointCloud& cloud, std::span<const std::size_t> node_indices,
                               const KernelSpec& spec);

/// (pi_alpha(x))_alpha; empty when P = {0}.
Eigen::VectorXd eval_poly_basis(const PolyBasis& basis, std::span<const double> x);

} // namespace rbfh
