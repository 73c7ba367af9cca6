#pragma once

#include "rbfh/clustering.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <map>
#include <memory>

namespace rbfh {

/// Rank selection rule for truncated SVDs.
///
/// FixedRank keeps min(r, #nonzero singular values); Tolerance keeps the smallest
/// rank with sigma_{r+1} <= eps * sigma_1 (relative to the block being truncated).
struct Truncation {
    enum class Mode { FixedRank, Tolerance };
    Mode mode = Mode::Tolerance;
    int rank = 0;
    double eps = 1e-12;

    static Truncation fixed_rank(int r);
    static Truncation tolerance(double eps);

    int select_rank(const Eigen::VectorXd& singular_values) const;
};

/// M|_{IxJ} = X Y^T.
struct LowRankBlock {
    Eigen::MatrixXd X;
    Eigen::MatrixXd Y;

    Eigen::Index rank() const { return X.cols(); }
    Eigen::MatrixXd dense() const { return X * Y.transpose(); }
    /// Re-truncate via QR of both factors and an SVD of the small core.
    void recompress(const Truncation& trunc);
};

/// H-matrix over a BlockPartition, stored as a block tree in cluster-tree ordering.
///
/// Leaves of the block tree correspond one-to-one to partition blocks. For a
/// LowerTriangular matrix (an H-Cholesky factor) the leaves strictly above the
/// diagonal are Zero and carry no storage. Public vector/matrix arguments use
/// the original point ordering.
class HMatrix {
public:
    enum class Structure { General, LowerTriangular };

    struct Node {
        enum class Kind { Dense, LowRank, Hierarchical, Zero };
        int row = 0; // cluster ids
        int col = 0;
        Kind kind = Kind::Dense;
        Eigen::MatrixXd dense;
        LowRankBlock lr;
        std::array<int, 4> sons{-1, -1, -1, -1}; // (0,0) (0,1) (1,0) (1,1)
    };

    /// Empty block tree shaped after the partition (dense leaves zero, rank-0 low-rank leaves).
    explicit HMatrix(std::shared_ptr<const BlockPartition> partition);

    const BlockPartition& partition() const { return *partition_; }
    std::shared_ptr<const BlockPartition> partition_ptr() const { return partition_; }
    const ClusterTree& tree() const { return *partition_->tree; }
    Eigen::Index n() const { return static_cast<Eigen::Index>(tree().size()); }
    Structure structure() const { return structure_; }

    const std::vector<Node>& nodes() const { return nodes_; }
    std::vector<Node>& mutable_nodes() { return nodes_; }
    int root() const { return 0; }
    /// Node id of a partition block; throws if absent.
    int leaf(BlockId b) const;

    /// Largest rank over all low-rank leaves.
    Eigen::Index rank_bound() const;

    Eigen::MatrixXd to_dense_tree_order() const;
    /// Dense matrix in the original ordering.
    Eigen::MatrixXd reconstruct() const;

    void set_structure(Structure s) { structure_ = s; }

private:
    int build(int row, int col, const std::map<BlockId, bool>& kinds);

    std::shared_ptr<const BlockPartition> partition_;
    std::vector<Node> nodes_;
    std::map<BlockId, int> leaf_index_;
    Structure structure_ = Structure::General;
};

/// Blockwise truncated SVD of a dense matrix given in the original ordering.
/// Small blocks are copied verbatim.
HMatrix compress(const Eigen::MatrixXd& dense, std::shared_ptr<const BlockPartition> partition,
                 const Truncation& trunc);

Eigen::VectorXd matvec(const HMatrix& h, const Eigen::VectorXd& v);

/// sum_lowrank r_b (|I|+|J|) + sum_dense |I||J| (Zero leaves count nothing).
std::size_t storage_entries(const HMatrix& h);

/// H-Cholesky factor L (LowerTriangular) of a symmetric positive definite H-matrix.
/// Only the lower block triangle of `h` is read. Every formatted addition is
/// re-truncated with `trunc`. Throws std::runtime_error on a non-positive pivot.
HMatrix hcholesky(const HMatrix& h, const Truncation& trunc);

/// Re-truncate every low-rank leaf (e.g. project a high-accuracy factor to rank r).
HMatrix truncate(const HMatrix& h, const Truncation& trunc);

/// Solve L y = rhs (or L^T y = rhs) for an H-Cholesky factor. Vectors in original ordering.
Eigen::VectorXd solve_triangular(const HMatrix& factor, const Eigen::VectorXd& rhs, bool transposed);

/// (L L^T)^{-1} v.
Eigen::VectorXd apply_inverse(const HMatrix& factor, const Eigen::VectorXd& v);

struct NormEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Power iteration for a symmetric operator (estimates max |lambda| = ||op||_2).
NormEstimate est_spectral_norm(const LinearOperator& apply, Eigen::Index n, int max_iterations = 100,
                               double rel_tol = 1e-6, unsigned long long seed = 0);

/// Power iteration on op^T op for a general operator.
NormEstimate est_spectral_norm(const LinearOperator& apply, const LinearOperator& apply_transpose,
                               Eigen::Index n, int max_iterations = 100, double rel_tol = 1e-6,
                               unsigned long long seed = 0);

struct HMatrixDiagnostics {
    Eigen::Index rank_bound = 0;
    std::size_t n_adm = 0;
    std::size_t n_small = 0;
    std::size_t storage_entries = 0;
    double compression_ratio = 0.0; // storage / N^2
};

HMatrixDiagnostics diagnostics(const HMatrix& h);

} // namespace rbfh
