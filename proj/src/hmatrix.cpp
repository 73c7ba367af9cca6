#include "rbfh/hmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace rbfh {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Kind = HMatrix::Node::Kind;

// ---------------------------------------------------------------------------
// Truncation / low-rank blocks

Truncation Truncation::fixed_rank(int r) {
    if (r < 0) throw std::invalid_argument("truncation: rank must be nonnegative");
    Truncation t;
    t.mode = Mode::FixedRank;
    t.rank = r;
    return t;
}

Truncation Truncation::tolerance(double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("truncation: tolerance must be nonnegative");
    Truncation t;
    t.mode = Mode::Tolerance;
    t.eps = eps;
    return t;
}

int Truncation::select_rank(const VectorXd& s) const {
    int nonzero = 0;
    while (nonzero < s.size() && s[nonzero] > 0.0) ++nonzero;
    if (mode == Mode::FixedRank) return std::min(rank, nonzero);
    if (nonzero == 0) return 0;
    const double cut = eps * s[0];
    int r = 1;
    while (r < nonzero && s[r] > cut) ++r;
    return r;
}

void LowRankBlock::recompress(const Truncation& trunc) {
    const Index m = X.rows(), n = Y.rows(), k = X.cols();
    if (k == 0) return;
    if (m == 0 || n == 0) {
        X.resize(m, 0);
        Y.resize(n, 0);
        return;
    }
    Eigen::HouseholderQR<MatrixXd> qx(X), qy(Y);
    const Index kx = std::min(m, k), ky = std::min(n, k);
    const MatrixXd rx = qx.matrixQR().topRows(kx).triangularView<Eigen::Upper>();
    const MatrixXd ry = qy.matrixQR().topRows(ky).triangularView<Eigen::Upper>();
    const MatrixXd core = rx * ry.transpose();
    Eigen::JacobiSVD<MatrixXd> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int r = trunc.select_rank(svd.singularValues());
    const MatrixXd qxm = qx.householderQ() * MatrixXd::Identity(m, kx);
    const MatrixXd qym = qy.householderQ() * MatrixXd::Identity(n, ky);
    X = qxm * (svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal());
    Y = qym * svd.matrixV().leftCols(r);
}

// ---------------------------------------------------------------------------
// Block tree

HMatrix::HMatrix(std::shared_ptr<const BlockPartition> partition) : partition_(std::move(partition)) {
    if (!partition_ || !partition_->tree) throw std::invalid_argument("HMatrix: null partition");
    std::map<BlockId, bool> kinds;
    for (const BlockId& b : partition_->admissible) kinds[b] = true;
    for (const BlockId& b : partition_->small) {
        if (!kinds.emplace(b, false).second)
            throw std::invalid_argument("HMatrix: block listed as both admissible and small");
    }
    const ClusterTree& t = *partition_->tree;
    build(t.root(), t.root(), kinds);
    if (leaf_index_.size() != kinds.size())
        throw std::invalid_argument("HMatrix: partition contains blocks outside the block tree");
}

int HMatrix::build(int row, int col, const std::map<BlockId, bool>& kinds) {
    const ClusterTree& t = *partition_->tree;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[static_cast<std::size_t>(id)].row = row;
    nodes_[static_cast<std::size_t>(id)].col = col;
    const Index m = static_cast<Index>(t.node(row).size());
    const Index n = static_cast<Index>(t.node(col).size());

    auto it = kinds.find({row, col});
    if (it != kinds.end()) {
        Node& node = nodes_[static_cast<std::size_t>(id)];
        if (it->second) {
            node.kind = Kind::LowRank;
            node.lr.X.resize(m, 0);
            node.lr.Y.resize(n, 0);
        } else {
            node.kind = Kind::Dense;
            node.dense = MatrixXd::Zero(m, n);
        }
        leaf_index_[{row, col}] = id;
        return id;
    }
    const Cluster& r = t.node(row);
    const Cluster& c = t.node(col);
    if (r.is_leaf() || c.is_leaf())
        throw std::invalid_argument("HMatrix: partition does not cover block (" + std::to_string(row) + "," +
                                    std::to_string(col) + ")");
    nodes_[static_cast<std::size_t>(id)].kind = Kind::Hierarchical;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const int son = build(r.sons[i], c.sons[j], kinds);
            nodes_[static_cast<std::size_t>(id)].sons[static_cast<std::size_t>(2 * i + j)] = son;
        }
    }
    return id;
}

int HMatrix::leaf(BlockId b) const {
    auto it = leaf_index_.find(b);
    if (it == leaf_index_.end()) throw std::out_of_range("HMatrix: no such block");
    return it->second;
}

Index HMatrix::rank_bound() const {
    Index r = 0;
    for (const Node& node : nodes_) {
        if (node.kind == Kind::LowRank) r = std::max(r, node.lr.rank());
    }
    return r;
}

MatrixXd HMatrix::to_dense_tree_order() const {
    const ClusterTree& t = tree();
    MatrixXd out = MatrixXd::Zero(n(), n());
    for (const Node& node : nodes_) {
        const Cluster& r = t.node(node.row);
        const Cluster& c = t.node(node.col);
        auto blk = out.block(static_cast<Index>(r.begin), static_cast<Index>(c.begin), static_cast<Index>(r.size()),
                             static_cast<Index>(c.size()));
        if (node.kind == Kind::Dense) blk = node.dense;
        else if (node.kind == Kind::LowRank) blk = node.lr.dense();
    }
    return out;
}

MatrixXd HMatrix::reconstruct() const {
    const MatrixXd tp = to_dense_tree_order();
    const auto& perm = tree().perm();
    MatrixXd out(n(), n());
    for (Index i = 0; i < n(); ++i)
        for (Index j = 0; j < n(); ++j) out(static_cast<Index>(perm[static_cast<std::size_t>(i)]), static_cast<Index>(perm[static_cast<std::size_t>(j)])) = tp(i, j);
    return out;
}

namespace {

VectorXd to_tree_order(const ClusterTree& t, const VectorXd& v) {
    VectorXd out(v.size());
    for (Index i = 0; i < v.size(); ++i) out[i] = v[static_cast<Index>(t.perm()[static_cast<std::size_t>(i)])];
    return out;
}

VectorXd from_tree_order(const ClusterTree& t, const VectorXd& v) {
    VectorXd out(v.size());
    for (Index i = 0; i < v.size(); ++i) out[static_cast<Index>(t.perm()[static_cast<std::size_t>(i)])] = v[i];
    return out;
}

// Read-only traversal of a block tree (tree ordering).
class BlockOps {
public:
    BlockOps(const std::vector<HMatrix::Node>& nodes, const ClusterTree& tree) : nodes_(nodes), tree_(tree) {}

    const HMatrix::Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    Index rows(int id) const { return static_cast<Index>(tree_.node(node(id).row).size()); }
    Index cols(int id) const { return static_cast<Index>(tree_.node(node(id).col).size()); }
    int son(int id, int i, int j) const { return node(id).sons[static_cast<std::size_t>(2 * i + j)]; }
    Index row_offset(int parent, int s) const {
        return static_cast<Index>(tree_.node(node(s).row).begin - tree_.node(node(parent).row).begin);
    }
    Index col_offset(int parent, int s) const {
        return static_cast<Index>(tree_.node(node(s).col).begin - tree_.node(node(parent).col).begin);
    }
    bool is_diagonal(int id) const { return node(id).row == node(id).col; }

    // y += alpha op(M) x
    void gemm(int id, double alpha, const Eigen::Ref<const MatrixXd>& x, Eigen::Ref<MatrixXd> y, bool trans) const {
        const HMatrix::Node& nd = node(id);
        switch (nd.kind) {
        case Kind::Zero:
            return;
        case Kind::Dense:
            if (trans) y.noalias() += alpha * nd.dense.transpose() * x;
            else y.noalias() += alpha * nd.dense * x;
            return;
        case Kind::LowRank:
            if (nd.lr.rank() == 0) return;
            if (trans) y.noalias() += alpha * nd.lr.Y * (nd.lr.X.transpose() * x);
            else y.noalias() += alpha * nd.lr.X * (nd.lr.Y.transpose() * x);
            return;
        case Kind::Hierarchical:
            for (int s : nd.sons) {
                const Index ro = row_offset(id, s), co = col_offset(id, s);
                const Index m = rows(s), n = cols(s);
                if (trans) gemm(s, alpha, x.middleRows(ro, m), y.middleRows(co, n), true);
                else gemm(s, alpha, x.middleRows(co, n), y.middleRows(ro, m), false);
            }
            return;
        }
    }

    MatrixXd to_dense(int id) const {
        MatrixXd out = MatrixXd::Zero(rows(id), cols(id));
        const MatrixXd eye = MatrixXd::Identity(cols(id), cols(id));
        gemm(id, 1.0, eye, out, false);
        return out;
    }

    // Solve L Y = R in place for a diagonal factor node L.
    void solve_lower(int l, Eigen::Ref<MatrixXd> r) const {
        const HMatrix::Node& nd = node(l);
        if (nd.kind == Kind::Dense) {
            check_diagonal(nd.dense);
            nd.dense.triangularView<Eigen::Lower>().solveInPlace(r);
            return;
        }
        if (nd.kind != Kind::Hierarchical) throw std::logic_error("solve_lower: diagonal block must be dense or hierarchical");
        const int l11 = son(l, 0, 0), l21 = son(l, 1, 0), l22 = son(l, 1, 1);
        const Index n1 = rows(l11), n2 = rows(l22);
        solve_lower(l11, r.topRows(n1));
        gemm(l21, -1.0, r.topRows(n1), r.bottomRows(n2), false);
        solve_lower(l22, r.bottomRows(n2));
    }

    // Solve L^T Y = R in place.
    void solve_lower_transposed(int l, Eigen::Ref<MatrixXd> r) const {
        const HMatrix::Node& nd = node(l);
        if (nd.kind == Kind::Dense) {
            check_diagonal(nd.dense);
            nd.dense.triangularView<Eigen::Lower>().transpose().solveInPlace(r);
            return;
        }
        if (nd.kind != Kind::Hierarchical) throw std::logic_error("solve_lower_transposed: bad diagonal block");
        const int l11 = son(l, 0, 0), l21 = son(l, 1, 0), l22 = son(l, 1, 1);
        const Index n1 = rows(l11), n2 = rows(l22);
        solve_lower_transposed(l22, r.bottomRows(n2));
        gemm(l21, -1.0, r.bottomRows(n2), r.topRows(n1), true);
        solve_lower_transposed(l11, r.topRows(n1));
    }

private:
    static void check_diagonal(const MatrixXd& d) {
        for (Index i = 0; i < d.rows(); ++i) {
            if (d(i, i) == 0.0) throw std::runtime_error("solve_triangular: zero diagonal entry");
        }
    }

    const std::vector<HMatrix::Node>& nodes_;
    const ClusterTree& tree_;
};

// Formatted H-arithmetic: every low-rank result is re-truncated with `trunc`.
// Updates of a diagonal block touch only its lower block triangle.
class Arithmetic : public BlockOps {
public:
    Arithmetic(std::vector<HMatrix::Node>& nodes, const ClusterTree& tree, const Truncation& trunc)
        : BlockOps(nodes, tree), mnodes_(nodes), trunc_(trunc) {}

    HMatrix::Node& mnode(int id) { return mnodes_[static_cast<std::size_t>(id)]; }

    // A B^T as a low-rank block, A = (t, r), B = (s, r).
    LowRankBlock product(int a, int b) {
        const HMatrix::Node& na = node(a);
        const HMatrix::Node& nb = node(b);
        const Index mt = rows(a), ms = rows(b), mr = cols(a);
        LowRankBlock out;
        if (na.kind == Kind::Zero || nb.kind == Kind::Zero) {
            out.X.resize(mt, 0);
            out.Y.resize(ms, 0);
            return out;
        }
        if (na.kind == Kind::LowRank) {
            out.X = na.lr.X;
            out.Y = MatrixXd::Zero(ms, na.lr.rank());
            if (na.lr.rank() > 0) gemm(b, 1.0, na.lr.Y, out.Y, false);
            return out;
        }
        if (nb.kind == Kind::LowRank) {
            out.Y = nb.lr.X;
            out.X = MatrixXd::Zero(mt, nb.lr.rank());
            if (nb.lr.rank() > 0) gemm(a, 1.0, nb.lr.Y, out.X, false);
            return out;
        }
        if (na.kind == Kind::Dense) {
            if (mt <= mr) {
                out.X = MatrixXd::Identity(mt, mt);
                out.Y = MatrixXd::Zero(ms, mt);
                gemm(b, 1.0, na.dense.transpose(), out.Y, false);
            } else {
                out.X = na.dense;
                out.Y = to_dense(b);
            }
            return out;
        }
        if (nb.kind == Kind::Dense) {
            if (ms <= mr) {
                out.Y = MatrixXd::Identity(ms, ms);
                out.X = MatrixXd::Zero(mt, ms);
                gemm(a, 1.0, nb.dense.transpose(), out.X, false);
            } else {
                out.X = to_dense(a);
                out.Y = nb.dense;
            }
            return out;
        }

        // Both hierarchical: assemble the 2x2 son products into one factorization.
        std::vector<LowRankBlock> pieces;
        std::vector<std::pair<Index, Index>> offsets;
        Index total = 0;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const LowRankBlock p0 = product(son(a, i, 0), son(b, j, 0));
                const LowRankBlock p1 = product(son(a, i, 1), son(b, j, 1));
                LowRankBlock acc;
                acc.X.resize(p0.X.rows(), p0.rank() + p1.rank());
                acc.X << p0.X, p1.X;
                acc.Y.resize(p0.Y.rows(), p0.rank() + p1.rank());
                acc.Y << p0.Y, p1.Y;
                acc.recompress(trunc_);
                total += acc.rank();
                offsets.emplace_back(row_offset(a, son(a, i, 0)), row_offset(b, son(b, j, 0)));
                pieces.push_back(std::move(acc));
            }
        }
        out.X = MatrixXd::Zero(mt, total);
        out.Y = MatrixXd::Zero(ms, total);
        Index col = 0;
        for (std::size_t p = 0; p < pieces.size(); ++p) {
            const Index k = pieces[p].rank();
            out.X.block(offsets[p].first, col, pieces[p].X.rows(), k) = pieces[p].X;
            out.Y.block(offsets[p].second, col, pieces[p].Y.rows(), k) = pieces[p].Y;
            col += k;
        }
        out.recompress(trunc_);
        return out;
    }

    // C += alpha U V^T
    void add_lowrank(int c, double alpha, const Eigen::Ref<const MatrixXd>& u, const Eigen::Ref<const MatrixXd>& v) {
        if (u.cols() == 0) return;
        HMatrix::Node& nd = mnode(c);
        switch (nd.kind) {
        case Kind::Zero:
            throw std::logic_error("H-arithmetic: update of a structurally zero block");
        case Kind::Dense:
            nd.dense.noalias() += alpha * u * v.transpose();
            return;
        case Kind::LowRank: {
            const Index k0 = nd.lr.rank(), k1 = u.cols();
            MatrixXd x(u.rows(), k0 + k1), y(v.rows(), k0 + k1);
            x << nd.lr.X, alpha * u;
            y << nd.lr.Y, v;
            nd.lr.X = std::move(x);
            nd.lr.Y = std::move(y);
            nd.lr.recompress(trunc_);
            return;
        }
        case Kind::Hierarchical: {
            const bool diag = is_diagonal(c);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    if (diag && i < j) continue;
                    const int s = son(c, i, j);
                    add_lowrank(s, alpha, u.middleRows(row_offset(c, s), rows(s)),
                                v.middleRows(col_offset(c, s), cols(s)));
                }
            }
            return;
        }
        }
    }

    // C += alpha A B^T
    void addmul(int c, double alpha, int a, int b) {
        if (node(c).kind == Kind::Hierarchical && node(a).kind == Kind::Hierarchical &&
            node(b).kind == Kind::Hierarchical) {
            const bool diag = is_diagonal(c);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    if (diag && i < j) continue;
                    for (int k = 0; k < 2; ++k) addmul(son(c, i, j), alpha, son(a, i, k), son(b, j, k));
                }
            }
            return;
        }
        const LowRankBlock p = product(a, b);
        add_lowrank(c, alpha, p.X, p.Y);
    }

    // X <- X L^{-T}
    void solve_right_transposed(int l, int x) {
        HMatrix::Node& nx = mnode(x);
        switch (nx.kind) {
        case Kind::Zero:
            return;
        case Kind::Dense: {
            MatrixXd t = nx.dense.transpose();
            solve_lower(l, t);
            nx.dense = t.transpose();
            return;
        }
        case Kind::LowRank:
            if (nx.lr.rank() > 0) solve_lower(l, nx.lr.Y);
            return;
        case Kind::Hierarchical: {
            if (node(l).kind != Kind::Hierarchical)
                throw std::logic_error("solve_right_transposed: hierarchical block over a dense diagonal");
            const int l11 = son(l, 0, 0), l21 = son(l, 1, 0), l22 = son(l, 1, 1);
            for (int i = 0; i < 2; ++i) {
                const int x1 = son(x, i, 0), x2 = son(x, i, 1);
                solve_right_transposed(l11, x1);
                addmul(x2, -1.0, x1, l21);
                solve_right_transposed(l22, x2);
            }
            return;
        }
        }
    }

    void zero_subtree(int id) {
        HMatrix::Node& nd = mnode(id);
        if (nd.kind == Kind::Hierarchical) {
            for (int s : nd.sons) zero_subtree(s);
            return;
        }
        nd.kind = Kind::Zero;
        nd.dense.resize(0, 0);
        nd.lr.X.resize(0, 0);
        nd.lr.Y.resize(0, 0);
    }

    void cholesky(int m) {
        HMatrix::Node& nd = mnode(m);
        if (nd.kind == Kind::Dense) {
            Eigen::LLT<MatrixXd> llt(nd.dense);
            if (llt.info() != Eigen::Success)
                throw std::runtime_error("matrix not SPD (pivot <= 0 at cluster " + std::to_string(nd.row) + ")");
            MatrixXd l = llt.matrixL();
            nd.dense = std::move(l);
            return;
        }
        if (nd.kind != Kind::Hierarchical) throw std::logic_error("cholesky: diagonal block must be dense or hierarchical");
        const int m11 = son(m, 0, 0), m12 = son(m, 0, 1), m21 = son(m, 1, 0), m22 = son(m, 1, 1);
        cholesky(m11);
        solve_right_transposed(m11, m21);
        addmul(m22, -1.0, m21, m21);
        cholesky(m22);
        zero_subtree(m12);
    }

    void retruncate(int id) {
        HMatrix::Node& nd = mnode(id);
        if (nd.kind == Kind::LowRank) nd.lr.recompress(trunc_);
        else if (nd.kind == Kind::Hierarchical)
            for (int s : nd.sons) retruncate(s);
    }

private:
    std::vector<HMatrix::Node>& mnodes_;
    Truncation trunc_;
};

} // namespace

// ---------------------------------------------------------------------------
// Public operations

HMatrix compress(const MatrixXd& dense, std::shared_ptr<const BlockPartition> partition, const Truncation& trunc) {
    HMatrix h(std::move(partition));
    const ClusterTree& t = h.tree();
    if (dense.rows() != h.n() || dense.cols() != h.n())
        throw std::invalid_argument("compress: matrix dimension does not match the partition");

    const auto& perm = t.perm();
    MatrixXd permuted(h.n(), h.n());
    for (Index j = 0; j < h.n(); ++j)
        for (Index i = 0; i < h.n(); ++i)
            permuted(i, j) = dense(static_cast<Index>(perm[static_cast<std::size_t>(i)]), static_cast<Index>(perm[static_cast<std::size_t>(j)]));

    for (auto& node : h.mutable_nodes()) {
        if (node.kind == Kind::Hierarchical) continue;
        const Cluster& r = t.node(node.row);
        const Cluster& c = t.node(node.col);
        const auto blk = permuted.block(static_cast<Index>(r.begin), static_cast<Index>(c.begin),
                                        static_cast<Index>(r.size()), static_cast<Index>(c.size()));
        if (node.kind == Kind::Dense) {
            node.dense = blk;
            continue;
        }
        Eigen::BDCSVD<MatrixXd> svd(blk, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success || !svd.singularValues().allFinite())
            throw std::runtime_error("compress: SVD failed on block (" + std::to_string(node.row) + "," +
                                     std::to_string(node.col) + ")");
        const int k = trunc.select_rank(svd.singularValues());
        node.lr.X = svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal();
        node.lr.Y = svd.matrixV().leftCols(k);
    }
    return h;
}

VectorXd matvec(const HMatrix& h, const VectorXd& v) {
    if (v.size() != h.n()) throw std::invalid_argument("matvec: dimension mismatch");
    const VectorXd vp = to_tree_order(h.tree(), v);
    VectorXd yp = VectorXd::Zero(h.n());
    BlockOps(h.nodes(), h.tree()).gemm(h.root(), 1.0, vp, yp, false);
    return from_tree_order(h.tree(), yp);
}

std::size_t storage_entries(const HMatrix& h) {
    std::size_t total = 0;
    for (const auto& node : h.nodes()) {
        if (node.kind == Kind::Dense) total += static_cast<std::size_t>(node.dense.size());
        else if (node.kind == Kind::LowRank)
            total += static_cast<std::size_t>(node.lr.rank() * (node.lr.X.rows() + node.lr.Y.rows()));
    }
    return total;
}

HMatrix hcholesky(const HMatrix& h, const Truncation& trunc) {
    if (h.structure() != HMatrix::Structure::General)
        throw std::invalid_argument("hcholesky: input must be a general (symmetric) H-matrix");
    HMatrix factor = h;
    Arithmetic arith(factor.mutable_nodes(), factor.tree(), trunc);
    arith.cholesky(factor.root());
    factor.set_structure(HMatrix::Structure::LowerTriangular);
    return factor;
}

HMatrix truncate(const HMatrix& h, const Truncation& trunc) {
    HMatrix out = h;
    Arithmetic(out.mutable_nodes(), out.tree(), trunc).retruncate(out.root());
    return out;
}

VectorXd solve_triangular(const HMatrix& factor, const VectorXd& rhs, bool transposed) {
    if (factor.structure() != HMatrix::Structure::LowerTriangular)
        throw std::invalid_argument("solve_triangular: expected an H-Cholesky factor");
    if (rhs.size() != factor.n()) throw std::invalid_argument("solve_triangular: dimension mismatch");
    MatrixXd y = to_tree_order(factor.tree(), rhs);
    const BlockOps ops(factor.nodes(), factor.tree());
    if (transposed) ops.solve_lower_transposed(factor.root(), y);
    else ops.solve_lower(factor.root(), y);
    return from_tree_order(factor.tree(), y.col(0));
}

VectorXd apply_inverse(const HMatrix& factor, const VectorXd& v) {
    return solve_triangular(factor, solve_triangular(factor, v, false), true);
}

namespace {

NormEstimate power_iteration(const std::function<VectorXd(const VectorXd&)>& step, Index n, int max_iterations,
                             double rel_tol, unsigned long long seed, bool squared) {
    NormEstimate est;
    if (n == 0) return est;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = g(rng);
    v.normalize();
    // The estimates increase monotonically (up to roundoff) and converge geometrically, so the
    // remaining error is predicted from two consecutive changes and added on convergence.
    double prev = 0.0;
    double prev_delta = -1.0;
    for (int it = 1; it <= max_iterations; ++it) {
        VectorXd w = step(v);
        const double nw = w.norm();
        est.iterations = it;
        const double value = squared ? std::sqrt(nw) : nw;
        est.value = value;
        if (nw == 0.0) {
            est.converged = true;
            return est;
        }
        if (it > 1) {
            const double delta = value - prev;
            double tail = std::abs(delta);
            if (delta >= 0.0 && prev_delta > 0.0) {
                const double q = std::min(delta / prev_delta, 0.99);
                tail = delta * q / (1.0 - q);
            }
            if (std::abs(delta) <= rel_tol * value && tail <= rel_tol * value) {
                if (delta >= 0.0) est.value = value + tail;
                est.converged = true;
                return est;
            }
            prev_delta = delta;
        }
        prev = value;
        v = w / nw;
    }
    return est;
}

} // namespace

NormEstimate est_spectral_norm(const LinearOperator& apply, Index n, int max_iterations, double rel_tol,
                               unsigned long long seed) {
    return power_iteration(apply, n, max_iterations, rel_tol, seed, false);
}

NormEstimate est_spectral_norm(const LinearOperator& apply, const LinearOperator& apply_transpose, Index n,
                               int max_iterations, double rel_tol, unsigned long long seed) {
    return power_iteration([&](const VectorXd& v) { return apply_transpose(apply(v)); }, n, max_iterations,
                           rel_tol, seed, true);
}

HMatrixDiagnostics diagnostics(const HMatrix& h) {
    HMatrixDiagnostics d;
    d.rank_bound = h.rank_bound();
    d.n_adm = h.partition().admissible.size();
    d.n_small = h.partition().small.size();
    d.storage_entries = storage_entries(h);
    const double n = static_cast<double>(h.n());
    d.compression_ratio = n > 0 ? static_cast<double>(d.storage_entries) / (n * n) : 0.0;
    return d;
}

} // namespace rbfh
