#include "rbfh/polybasis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rbfh {

int MultiIndex::degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

namespace {

// Compositions of `total` into `parts` nonnegative parts, first component descending.
void compositions(int parts, int total, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
    if (parts == 1) {
        prefix.push_back(total);
        out.push_back({prefix});
        prefix.pop_back();
        return;
    }
    for (int first = total; first >= 0; --first) {
        prefix.push_back(first);
        compositions(parts - 1, total - first, prefix, out);
        prefix.pop_back();
    }
}

struct Scaling {
    std::vector<double> center;
    std::vector<double> half_width;
};

Scaling cloud_scaling(const PointCloud& cloud) {
    const AxisBox box = bounding_box(cloud, 0.0);
    Scaling s;
    for (std::size_t a = 0; a < cloud.dim(); ++a) {
        s.center.push_back(0.5 * (box.lo()[a] + box.hi()[a]));
        const double w = 0.5 * box.extent(a);
        s.half_width.push_back(w > 0.0 ? w : 1.0);
    }
    return s;
}

Eigen::VectorXd scaled_monomials(const std::vector<MultiIndex>& indices, const Scaling& s,
                                 std::span<const double> x) {
    Eigen::VectorXd m(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t g = 0; g < indices.size(); ++g) {
        double v = 1.0;
        for (std::size_t a = 0; a < x.size(); ++a) {
            const int e = indices[g].exponents[a];
            if (e > 0) v *= std::pow((x[a] - s.center[a]) / s.half_width[a], e);
        }
        m[static_cast<Eigen::Index>(g)] = v;
    }
    return m;
}

} // namespace

std::vector<MultiIndex> enumerate_multi_indices(int dim, int max_degree) {
    if (dim < 1) throw std::invalid_argument("enumerate_multi_indices: dim must be positive");
    if (max_degree < -1) throw std::invalid_argument("enumerate_multi_indices: max_degree >= -1");
    std::vector<MultiIndex> out;
    std::vector<int> prefix;
    for (int deg = 0; deg <= max_degree; ++deg) compositions(dim, deg, prefix, out);
    return out;
}

Eigen::VectorXd PolyBasis::monomials(std::span<const double> x) const {
    return scaled_monomials(indices, Scaling{center, half_width}, x);
}

std::vector<std::size_t> select_unisolvent_subset(const PointCloud& cloud, const KernelSpec& spec) {
    if (static_cast<int>(cloud.dim()) != spec.dim)
        throw std::invalid_argument("select_unisolvent_subset: dimension mismatch");
    const auto indices = enumerate_multi_indices(spec.dim, spec.k_min - 1);
    const std::size_t m = indices.size();
    const std::size_t n = cloud.size();
    if (m == 0) return {};
    if (n < m) throw std::invalid_argument("point set not unisolvent for P (too few points)");

    const Scaling s = cloud_scaling(cloud);
    Eigen::MatrixXd w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) w.row(static_cast<Eigen::Index>(i)) = scaled_monomials(indices, s, cloud.point(i)).transpose();

    std::vector<bool> used(n, false);
    std::vector<std::size_t> chosen;
    double largest_pivot = 0.0;
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(m); ++j) {
        Eigen::Index best = -1;
        double best_abs = 0.0;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            if (std::abs(w(i, j)) > best_abs) {
                best_abs = std::abs(w(i, j));
                best = i;
            }
        }
        largest_pivot = std::max(largest_pivot, best_abs);
        if (best < 0 || best_abs <= 1e-8 * largest_pivot || best_abs == 0.0)
            throw std::invalid_argument("point set not unisolvent for P");
        used[static_cast<std::size_t>(best)] = true;
        chosen.push_back(static_cast<std::size_t>(best));
        const double pivot = w(best, j);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
            if (used[static_cast<std::size_t>(i)] || w(i, j) == 0.0) continue;
            const double f = w(i, j) / pivot;
            w.row(i).tail(m - j) -= f * w.row(best).tail(m - j);
        }
    }
    return chosen;
}

PolyBasis build_lagrange_basis(const PointCloud& cloud, std::span<const std::size_t> node_indices,
                               const KernelSpec& spec) {
    if (static_cast<int>(cloud.dim()) != spec.dim)
        throw std::invalid_argument("build_lagrange_basis: dimension mismatch");
    PolyBasis basis;
    basis.dim = spec.dim;
    basis.indices = enumerate_multi_indices(spec.dim, spec.k_min - 1);
    if (node_indices.size() != basis.indices.size())
        throw std::invalid_argument("build_lagrange_basis: need exactly N_min nodes");
    const Scaling s = cloud_scaling(cloud);
    basis.center = s.center;
    basis.half_width = s.half_width;
    basis.node_indices.assign(node_indices.begin(), node_indices.end());
    for (std::size_t i : node_indices) {
        auto p = cloud.point(i);
        basis.nodes.insert(basis.nodes.end(), p.begin(), p.end());
    }

    const auto m = static_cast<Eigen::Index>(basis.size());
    if (m == 0) {
        basis.coeffs.resize(0, 0);
        return basis;
    }
    Eigen::MatrixXd vandermonde(m, m);
    for (Eigen::Index a = 0; a < m; ++a) vandermonde.row(a) = basis.monomials(basis.node(static_cast<std::size_t>(a))).transpose();

    Eigen::FullPivLU<Eigen::MatrixXd> lu(vandermonde);
    if (!lu.isInvertible())
        throw std::invalid_argument("build_lagrange_basis: singular Vandermonde (nodes not unisolvent)");
    basis.coeffs = lu.inverse();
    return basis;
}

Eigen::VectorXd eval_poly_basis(const PolyBasis& basis, std::span<const double> x) {
    if (basis.size() == 0) return {};
    return basis.coeffs.transpose() * basis.monomials(x);
}

} // namespace rbfh
