#include "rbfh/clustering.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace rbfh;

namespace {

std::shared_ptr<const ClusterTree> tree_of(const PointCloud& c, std::size_t leaf) {
    return std::make_shared<const ClusterTree>(build_cluster_tree(c, leaf));
}

// Independent coverage count over all N^2 cells.
bool covers_exactly_once(const BlockPartition& p) {
    const ClusterTree& t = *p.tree;
    const std::size_t n = t.size();
    std::vector<int> hits(n * n, 0);
    for (const auto* list : {&p.admissible, &p.small})
        for (const auto& b : *list) {
            const Cluster& r = t.node(b.row);
            const Cluster& c = t.node(b.col);
            for (std::size_t i = r.begin; i < r.end; ++i)
                for (std::size_t j = c.begin; j < c.end; ++j) ++hits[t.perm()[i] * n + t.perm()[j]];
        }
    for (int h : hits)
        if (h != 1) return false;
    return true;
}

void check_tree_invariants(const ClusterTree& t, const PointCloud& cloud) {
    const double h = cloud.sep_distance();
    CHECK(t.node(t.root()).begin == 0);
    CHECK(t.node(t.root()).end == cloud.size());
    std::vector<std::size_t> sorted = t.perm();
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) REQUIRE(sorted[i] == i);
    for (std::size_t pos = 0; pos < t.size(); ++pos) CHECK(t.inverse_perm()[t.perm()[pos]] == pos);

    for (const Cluster& c : t.nodes()) {
        if (!c.is_leaf()) {
            const Cluster& a = t.node(c.sons[0]);
            const Cluster& b = t.node(c.sons[1]);
            CHECK(a.size() > 0);
            CHECK(b.size() > 0);
            CHECK(a.begin == c.begin);
            CHECK(a.end == b.begin);
            CHECK(b.end == c.end);
        } else if (c.size() > t.leaf_size()) {
            // oversized leaves only when all points coincide in every axis within the box
            bool degenerate = true;
            for (std::size_t a = 0; a < cloud.dim(); ++a)
                if (c.box.extent(a) > 2.0 * h * (1.0 + 1e-12)) degenerate = false;
            CHECK(degenerate);
        }
        // box contains every member bubble
        for (std::size_t pos = c.begin; pos < c.end; ++pos) {
            const auto x = cloud.point(t.perm()[pos]);
            for (std::size_t a = 0; a < cloud.dim(); ++a) {
                CHECK(c.box.lo()[a] <= x[a] - h + 1e-15);
                CHECK(c.box.hi()[a] >= x[a] + h - 1e-15);
            }
        }
    }
}

void check_block_conditions(const BlockPartition& p) {
    const ClusterTree& t = *p.tree;
    for (const auto& b : p.admissible) {
        const double diam = box_diam(t.node(b.row).box);
        const double dist = box_dist(t.node(b.row).box, t.node(b.col).box);
        CHECK(diam <= p.eta * dist);
    }
    for (const auto& b : p.small)
        CHECK(std::min(t.node(b.row).size(), t.node(b.col).size()) <= t.leaf_size());
}

} // namespace

TEST_CASE("small clouds give a single-node tree") {
    const auto cloud = generate_random_cloud(2, 10, AxisBox::unit(2), 1);
    const auto t = tree_of(cloud, 32);
    CHECK(t->nodes().size() == 1);
    CHECK(t->depth() == 1);
    const auto p = build_block_partition(t, 2.0);
    CHECK(p.admissible.empty());
    REQUIRE(p.small.size() == 1);
    CHECK(p.small[0] == BlockId{0, 0});
    const auto diag = validate_partition(p, cloud.size());
    CHECK(diag.is_partition);
    CHECK(diag.sparsity_constant == 1);
}

TEST_CASE("eight points on a line give a balanced tree") {
    const auto line = generate_uniform_grid(1, 8, AxisBox::unit(1));
    const auto t = tree_of(line, 1);
    CHECK(t->depth() == 4);
    CHECK(t->nodes().size() == 15);
    for (const Cluster& c : t->nodes()) CHECK(c.size() == (8u >> c.level));
    // tree order of a sorted 1D grid is the identity
    for (std::size_t i = 0; i < 8; ++i) CHECK(t->perm()[i] == i);
}

TEST_CASE("points on the split plane go to the lower child") {
    const PointCloud three(1, {0.0, 0.5, 1.0});
    const auto t = tree_of(three, 1);
    const Cluster& lower = t->node(t->node(0).sons[0]);
    CHECK(lower.size() == 2);
    CHECK(t->perm()[0] == 0);
    CHECK(t->perm()[1] == 1);
}

TEST_CASE("depth grows logarithmically") {
    int prev = 0;
    for (std::size_t n : {8u, 16u, 32u}) {
        const auto t = tree_of(generate_uniform_grid(2, n, AxisBox::unit(2)), 32);
        if (prev > 0) {
            CHECK(t->depth() >= prev);
            CHECK(t->depth() - prev <= 3);
        }
        prev = t->depth();
    }
}

TEST_CASE("trees and partitions on randomized clouds") {
    std::mt19937_64 rng(123);
    std::uniform_int_distribution<int> dim(1, 3), npts(20, 400), leaf(1, 40);
    std::uniform_real_distribution<double> eta(0.5, 4.0), beta(1.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = static_cast<std::size_t>(dim(rng));
        PointCloud cloud = trial % 2 == 0
                               ? generate_random_cloud(d, static_cast<std::size_t>(npts(rng)), AxisBox::unit(d), rng())
                               : generate_graded_grid(d, d == 1 ? 50 : (d == 2 ? 12 : 6), beta(rng), AxisBox::unit(d));
        const auto t = tree_of(cloud, static_cast<std::size_t>(leaf(rng)));
        check_tree_invariants(*t, cloud);
        const auto p = build_block_partition(t, eta(rng));
        CHECK(covers_exactly_once(p));
        check_block_conditions(p);
        std::size_t area = 0;
        for (const auto* list : {&p.admissible, &p.small})
            for (const auto& b : *list) area += t->node(b.row).size() * t->node(b.col).size();
        CHECK(area == cloud.size() * cloud.size());
        const auto diag = validate_partition(p, cloud.size());
        CHECK(diag.is_partition);
        CHECK(diag.conditions_hold);
    }
}

TEST_CASE("diagonal blocks are never admissible") {
    const auto cloud = generate_uniform_grid(2, 16, AxisBox::unit(2));
    const auto p = build_block_partition(tree_of(cloud, 8), 100.0);
    for (const auto& b : p.admissible) CHECK(b.row != b.col);
    for (std::size_t id = 0; id < p.tree->nodes().size(); ++id)
        CHECK_FALSE(p.is_admissible_pair(static_cast<int>(id), static_cast<int>(id)));
}

TEST_CASE("30x30 grid partition validates") {
    const auto cloud = generate_uniform_grid(2, 30, AxisBox::unit(2));
    const auto p = build_block_partition(tree_of(cloud, 32), 2.0);
    const auto diag = validate_partition(p, cloud.size());
    CHECK(diag.is_partition);
    CHECK(diag.conditions_hold);
    CHECK(diag.n_adm == p.admissible.size());
    CHECK(diag.n_small == p.small.size());
    CHECK(diag.sparsity_constant == sparsity_constant(p));
    CHECK(diag.sparsity_constant >= 1);
    CHECK(diag.sparsity_constant <= 40);
    CHECK(covers_exactly_once(p));
    MESSAGE("30x30 grid: sparsity constant " << diag.sparsity_constant << ", depth " << p.tree->depth());
}

TEST_CASE("corrupted partitions are detected") {
    const auto cloud = generate_uniform_grid(2, 10, AxisBox::unit(2));
    const auto p = build_block_partition(tree_of(cloud, 8), 2.0);
    REQUIRE(validate_partition(p, cloud.size()).is_partition);
    BlockPartition missing = p;
    missing.small.pop_back();
    CHECK_FALSE(validate_partition(missing, cloud.size()).is_partition);
    BlockPartition doubled = p;
    doubled.small.push_back(doubled.small.front());
    doubled.admissible.pop_back();
    CHECK_FALSE(validate_partition(doubled, cloud.size()).is_partition);
    BlockPartition wrong = p;
    wrong.eta = 1e-6; // blocks no longer satisfy admissibility
    CHECK_FALSE(validate_partition(wrong, cloud.size()).conditions_hold);
}

TEST_CASE("partition construction is deterministic") {
    const auto cloud = generate_random_cloud(3, 300, AxisBox::unit(3), 77);
    const auto a = build_block_partition(tree_of(cloud, 16), 2.0);
    const auto b = build_block_partition(tree_of(cloud, 16), 2.0);
    CHECK(a.tree->perm() == b.tree->perm());
    CHECK(a.admissible == b.admissible);
    CHECK(a.small == b.small);
}

TEST_CASE("norm upper bound") {
    const auto one = build_block_partition(tree_of(generate_random_cloud(2, 5, AxisBox::unit(2), 0), 8), 2.0);
    CHECK(norm_upper_bound(one, {{BlockId{0, 0}, 3.5}}) == 3.5);
    CHECK_THROWS_AS(norm_upper_bound(one, {}), std::invalid_argument);

    const auto cloud = generate_random_cloud(2, 64, AxisBox::unit(2), 4);
    const auto p = build_block_partition(tree_of(cloud, 4), 2.0);
    std::map<BlockId, double> zeros;
    for (const auto* list : {&p.admissible, &p.small})
        for (const auto& b : *list) zeros[b] = 0.0;
    CHECK(norm_upper_bound(p, zeros) == 0.0);

    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::MatrixXd m = Eigen::MatrixXd::Random(64, 64);
        std::map<BlockId, double> norms;
        for (const auto* list : {&p.admissible, &p.small})
            for (const auto& b : *list) {
                const Cluster& r = p.tree->node(b.row);
                const Cluster& c = p.tree->node(b.col);
                Eigen::MatrixXd blk(r.size(), c.size());
                for (std::size_t i = 0; i < r.size(); ++i)
                    for (std::size_t j = 0; j < c.size(); ++j)
                        blk(i, j) = m(p.tree->perm()[r.begin + i], p.tree->perm()[c.begin + j]);
                norms[b] = Eigen::JacobiSVD<Eigen::MatrixXd>(blk).singularValues()[0];
            }
        const double truth = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()[0];
        CHECK(norm_upper_bound(p, norms) >= truth);
    }
}
