#include "rbfh/clustering.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>

namespace rbfh {

namespace {

void split_recursive(const PointCloud& cloud, std::vector<std::size_t>& perm, std::vector<Cluster>& nodes,
                     int id, std::size_t leaf_size, double h_min) {
    const Cluster c = nodes[static_cast<std::size_t>(id)];
    if (c.size() <= leaf_size) return;

    const std::size_t d = cloud.dim();
    std::vector<std::size_t> axes(d);
    std::iota(axes.begin(), axes.end(), 0);
    std::stable_sort(axes.begin(), axes.end(),
                     [&](std::size_t a, std::size_t b) { return c.box.extent(a) > c.box.extent(b); });

    auto first = perm.begin() + static_cast<std::ptrdiff_t>(c.begin);
    auto last = perm.begin() + static_cast<std::ptrdiff_t>(c.end);
    for (std::size_t axis : axes) {
        if (c.box.extent(axis) <= 0.0) break;
        const double mid = 0.5 * (c.box.lo()[axis] + c.box.hi()[axis]);
        auto cut = std::stable_partition(first, last, [&](std::size_t i) { return cloud.point(i)[axis] <= mid; });
        if (cut == first || cut == last) continue;

        const auto split = c.begin + static_cast<std::size_t>(cut - first);
        const std::size_t ranges[2][2] = {{c.begin, split}, {split, c.end}};
        for (int s = 0; s < 2; ++s) {
            Cluster son;
            son.begin = ranges[s][0];
            son.end = ranges[s][1];
            std::span<const std::size_t> members(perm.data() + son.begin, son.size());
            son.box = bounding_box(cloud, members, h_min);
            son.parent = id;
            son.level = c.level + 1;
            nodes.push_back(std::move(son));
            nodes[static_cast<std::size_t>(id)].sons[s] = static_cast<int>(nodes.size() - 1);
        }
        const int s0 = nodes[static_cast<std::size_t>(id)].sons[0];
        const int s1 = nodes[static_cast<std::size_t>(id)].sons[1];
        split_recursive(cloud, perm, nodes, s0, leaf_size, h_min);
        split_recursive(cloud, perm, nodes, s1, leaf_size, h_min);
        return;
    }
}

} // namespace

void ClusterTree::finalize() {
    inverse_perm_.assign(perm_.size(), 0);
    for (std::size_t pos = 0; pos < perm_.size(); ++pos) inverse_perm_[perm_[pos]] = pos;
    depth_ = 1;
    for (const auto& c : nodes_) depth_ = std::max(depth_, c.level + 1);
}

ClusterTree ClusterTree::from_parts(std::vector<Cluster> nodes, std::vector<std::size_t> perm,
                                    std::size_t leaf_size, double h_min) {
    if (nodes.empty() || nodes[0].begin != 0 || nodes[0].end != perm.size())
        throw std::invalid_argument("cluster tree: root must cover all indices");
    ClusterTree t;
    t.nodes_ = std::move(nodes);
    t.perm_ = std::move(perm);
    t.leaf_size_ = leaf_size;
    t.h_min_ = h_min;
    t.finalize();
    return t;
}

ClusterTree build_cluster_tree(const PointCloud& cloud, std::size_t leaf_size) {
    if (leaf_size < 1) throw std::invalid_argument("build_cluster_tree: leaf_size must be >= 1");
    ClusterTree t;
    t.leaf_size_ = leaf_size;
    t.h_min_ = cloud.sep_distance();
    t.perm_.resize(cloud.size());
    std::iota(t.perm_.begin(), t.perm_.end(), 0);

    Cluster root;
    root.begin = 0;
    root.end = cloud.size();
    root.box = bounding_box(cloud, t.perm_, t.h_min_);
    t.nodes_.push_back(std::move(root));
    split_recursive(cloud, t.perm_, t.nodes_, 0, leaf_size, t.h_min_);
    t.finalize();
    return t;
}

bool BlockPartition::is_admissible_pair(int row, int col) const {
    const AxisBox& bi = tree->node(row).box;
    const AxisBox& bj = tree->node(col).box;
    const double dist = box_dist(bi, bj);
    return dist > 0.0 && box_diam(bi) <= eta * dist;
}

BlockPartition build_block_partition(std::shared_ptr<const ClusterTree> tree, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("build_block_partition: eta must be positive");
    if (!tree) throw std::invalid_argument("build_block_partition: null tree");
    BlockPartition p;
    p.tree = std::move(tree);
    p.eta = eta;

    std::function<void(int, int)> descend = [&](int row, int col) {
        if (p.is_admissible_pair(row, col)) {
            p.admissible.push_back({row, col});
            return;
        }
        const Cluster& r = p.tree->node(row);
        const Cluster& c = p.tree->node(col);
        if (r.is_leaf() || c.is_leaf()) {
            p.small.push_back({row, col});
            return;
        }
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) descend(r.sons[i], c.sons[j]);
    };
    descend(p.tree->root(), p.tree->root());
    return p;
}

int sparsity_constant(const BlockPartition& p) {
    const std::size_t nc = p.tree->nodes().size();
    std::vector<int> as_row(nc, 0), as_col(nc, 0);
    for (const auto* list : {&p.admissible, &p.small}) {
        for (const BlockId& b : *list) {
            ++as_row[static_cast<std::size_t>(b.row)];
            ++as_col[static_cast<std::size_t>(b.col)];
        }
    }
    int c = 0;
    for (std::size_t i = 0; i < nc; ++i) c = std::max({c, as_row[i], as_col[i]});
    return c;
}

PartitionDiagnostics validate_partition(const BlockPartition& p, std::size_t n) {
    PartitionDiagnostics diag;
    diag.n_adm = p.admissible.size();
    diag.n_small = p.small.size();
    diag.sparsity_constant = sparsity_constant(p);

    const auto& nodes = p.tree->nodes();
    auto valid_id = [&](int id) { return id >= 0 && static_cast<std::size_t>(id) < nodes.size(); };

    std::vector<BlockId> all;
    all.reserve(p.admissible.size() + p.small.size());
    all.insert(all.end(), p.admissible.begin(), p.admissible.end());
    all.insert(all.end(), p.small.begin(), p.small.end());

    bool ids_ok = p.tree->size() == n;
    for (const BlockId& b : all) ids_ok = ids_ok && valid_id(b.row) && valid_id(b.col);
    if (!ids_ok) return diag;

    diag.conditions_hold = true;
    for (const BlockId& b : p.admissible) diag.conditions_hold = diag.conditions_hold && p.is_admissible_pair(b.row, b.col);
    for (const BlockId& b : p.small) {
        const std::size_t m = std::min(nodes[static_cast<std::size_t>(b.row)].size(), nodes[static_cast<std::size_t>(b.col)].size());
        diag.conditions_hold = diag.conditions_hold && m <= p.tree->leaf_size();
    }

    unsigned long long area = 0;
    for (const BlockId& b : all) {
        area += static_cast<unsigned long long>(nodes[static_cast<std::size_t>(b.row)].size()) *
                nodes[static_cast<std::size_t>(b.col)].size();
    }
    if (area != static_cast<unsigned long long>(n) * n) return diag;

    if (n <= 5000) {
        std::vector<unsigned char> count(n * n, 0);
        for (const BlockId& b : all) {
            const Cluster& r = nodes[static_cast<std::size_t>(b.row)];
            const Cluster& c = nodes[static_cast<std::size_t>(b.col)];
            for (std::size_t i = r.begin; i < r.end; ++i) {
                for (std::size_t j = c.begin; j < c.end; ++j) {
                    if (++count[i * n + j] > 1) return diag;
                }
            }
        }
        diag.is_partition = std::all_of(count.begin(), count.end(), [](unsigned char v) { return v == 1; });
        return diag;
    }

    // Equal total area plus no double coverage implies exact coverage; test the
    // latter on random cells.
    std::mt19937_64 rng(0);
    std::uniform_int_distribution<std::size_t> u(0, n - 1);
    for (int s = 0; s < 20000; ++s) {
        const std::size_t i = u(rng), j = u(rng);
        int hits = 0;
        for (const BlockId& b : all) {
            const Cluster& r = nodes[static_cast<std::size_t>(b.row)];
            const Cluster& c = nodes[static_cast<std::size_t>(b.col)];
            hits += (i >= r.begin && i < r.end && j >= c.begin && j < c.end) ? 1 : 0;
        }
        if (hits != 1) return diag;
    }
    diag.is_partition = true;
    return diag;
}

double norm_upper_bound(const BlockPartition& p, const std::map<BlockId, double>& blockwise_norms) {
    double max_norm = 0.0;
    for (const auto* list : {&p.admissible, &p.small}) {
        for (const BlockId& b : *list) {
            auto it = blockwise_norms.find(b);
            if (it == blockwise_norms.end())
                throw std::invalid_argument("norm_upper_bound: missing norm for block (" + std::to_string(b.row) +
                                            "," + std::to_string(b.col) + ")");
            max_norm = std::max(max_norm, it->second);
        }
    }
    return sparsity_constant(p) * static_cast<double>(p.tree->depth()) * max_norm;
}

} // namespace rbfh
