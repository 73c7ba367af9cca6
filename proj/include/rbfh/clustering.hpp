#pragma once

#include "rbfh/geometry.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <vector>

namespace rbfh {

/// A cluster is a contiguous range [begin, end) of the tree ordering.
struct Cluster {
    std::size_t begin = 0;
    std::size_t end = 0;
    AxisBox box;
    int sons[2] = {-1, -1};
    int parent = -1;
    int level = 0;

    std::size_t size() const { return end - begin; }
    bool is_leaf() const { return sons[0] < 0; }
};

/// Cluster tree from recursive geometric bisection.
///
/// Every node box is the tight bounding box of its points inflated by h_min, so
/// it contains all member bubbles B(x_n, h_min). `perm[pos]` is the original
/// index stored at tree position `pos`; `inverse_perm` is its inverse.
class ClusterTree {
public:
    const std::vector<Cluster>& nodes() const { return nodes_; }
    const Cluster& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    int root() const { return 0; }
    std::size_t size() const { return perm_.size(); }
    const std::vector<std::size_t>& perm() const { return perm_; }
    const std::vector<std::size_t>& inverse_perm() const { return inverse_perm_; }
    std::size_t leaf_size() const { return leaf_size_; }
    double h_min() const { return h_min_; }
    /// Number of levels; a single-node tree has depth 1.
    int depth() const { return depth_; }

    friend ClusterTree build_cluster_tree(const PointCloud& cloud, std::size_t leaf_size);
    /// Reassemble a tree from serialized parts (no geometric re-checking).
    static ClusterTree from_parts(std::vector<Cluster> nodes, std::vector<std::size_t> perm,
                                  std::size_t leaf_size, double h_min);

private:
    void finalize();

    std::vector<Cluster> nodes_;
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> inverse_perm_;
    std::size_t leaf_size_ = 1;
    double h_min_ = 0.0;
    int depth_ = 1;
};

/// Split each node at the midpoint of its longest box edge (points on the plane
/// go to the lower half); fall back to shorter edges if one side is empty.
/// Recursion stops at |I| <= leaf_size.
ClusterTree build_cluster_tree(const PointCloud& cloud, std::size_t leaf_size);

struct BlockId {
    int row = 0;
    int col = 0;
    auto operator<=>(const BlockId&) const = default;
};

/// Admissible and small blocks covering {1..N}^2, in block-tree traversal order.
struct BlockPartition {
    std::shared_ptr<const ClusterTree> tree;
    double eta = 2.0;
    std::vector<BlockId> admissible;
    std::vector<BlockId> small;

    /// diam(B_I) <= eta * dist(B_I, B_J), with dist > 0.
    bool is_admissible_pair(int row, int col) const;
};

/// Descend from (root, root): admissible pairs are emitted, otherwise a pair
/// with a leaf cluster is emitted as small, otherwise the four son pairs recurse.
BlockPartition build_block_partition(std::shared_ptr<const ClusterTree> tree, double eta);

struct PartitionDiagnostics {
    bool is_partition = false;
    bool conditions_hold = false; // admissibility / smallness of every block
    int sparsity_constant = 0;
    std::size_t n_adm = 0;
    std::size_t n_small = 0;
};

/// Exact coverage count for n <= 5000, random cell sampling above.
PartitionDiagnostics validate_partition(const BlockPartition& p, std::size_t n);

/// Maximum number of partition blocks a single cluster takes part in (as row or column).
int sparsity_constant(const BlockPartition& p);

/// C_sp * depth * max_b ||M|_b||_2; every block must have an entry.
double norm_upper_bound(const BlockPartition& p, const std::map<BlockId, double>& blockwise_norms);

} // namespace rbfh
