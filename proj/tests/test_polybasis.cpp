#include "rbfh/polybasis.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace rbfh;

namespace {

// Only dim and k_min matter for the polynomial space.
KernelSpec poly_spec(int dim, int k_min) {
    KernelSpec s;
    s.dim = dim;
    s.k = std::max(k_min, dim);
    s.k_min = k_min;
    return s;
}

double monomial(const MultiIndex& a, std::span<const double> x) {
    double v = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) v *= std::pow(x[i], a.exponents[i]);
    return v;
}

long binom(int n, int k) {
    long c = 1;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

} // namespace

TEST_CASE("multi-index enumeration") {
    auto e = enumerate_multi_indices(2, 1);
    REQUIRE(e.size() == 3);
    CHECK(e[0].exponents == std::vector<int>{0, 0});
    CHECK(e[1].exponents == std::vector<int>{1, 0});
    CHECK(e[2].exponents == std::vector<int>{0, 1});
    auto f = enumerate_multi_indices(1, 2);
    REQUIRE(f.size() == 3);
    CHECK(f[2].exponents == std::vector<int>{2});
    auto g = enumerate_multi_indices(3, 0);
    REQUIRE(g.size() == 1);
    CHECK(g[0].exponents == std::vector<int>{0, 0, 0});
    CHECK(enumerate_multi_indices(2, -1).empty());

    for (int d = 1; d <= 4; ++d)
        for (int m = 0; m <= 4; ++m) {
            const auto idx = enumerate_multi_indices(d, m);
            CHECK(static_cast<long>(idx.size()) == binom(d + m, d));
            for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i - 1].degree() <= idx[i].degree());
            for (std::size_t i = 0; i < idx.size(); ++i)
                for (std::size_t j = i + 1; j < idx.size(); ++j) CHECK_FALSE(idx[i] == idx[j]);
        }
}

TEST_CASE("unisolvent subsets") {
    const auto grid = generate_uniform_grid(2, 4, AxisBox::unit(2));
    CHECK(select_unisolvent_subset(grid, poly_spec(2, 0)).empty());

    const auto nodes = select_unisolvent_subset(grid, poly_spec(2, 2));
    REQUIRE(nodes.size() == 3);
    // raw affine Vandermonde must be nonsingular (points not collinear)
    Eigen::Matrix3d v;
    for (int i = 0; i < 3; ++i) {
        const auto p = grid.point(nodes[static_cast<std::size_t>(i)]);
        v.row(i) << 1.0, p[0], p[1];
    }
    CHECK(std::abs(v.determinant()) > 1e-3);

    const PointCloud line(1, {0.0, 0.5, 1.0});
    const auto two = select_unisolvent_subset(line, poly_spec(1, 2));
    REQUIRE(two.size() == 2);
    CHECK(two[0] != two[1]);

    // quadratics in 2D: 6 nodes with a nonsingular Vandermonde
    const auto six = select_unisolvent_subset(grid, poly_spec(2, 3));
    REQUIRE(six.size() == 6);
    const auto idx = enumerate_multi_indices(2, 2);
    Eigen::MatrixXd v6(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) v6(i, j) = monomial(idx[static_cast<std::size_t>(j)], grid.point(six[static_cast<std::size_t>(i)]));
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(v6).rank() == 6);
}

TEST_CASE("non-unisolvent clouds are rejected") {
    const PointCloud collinear(2, {0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 0.25, 0.25});
    CHECK_THROWS_WITH_AS(select_unisolvent_subset(collinear, poly_spec(2, 2)), "point set not unisolvent for P",
                         std::invalid_argument);
    // six points on a circle lie on a conic
    std::vector<double> circle;
    for (int i = 0; i < 6; ++i) {
        circle.push_back(std::cos(i * 1.0471975511965976));
        circle.push_back(std::sin(i * 1.0471975511965976));
    }
    CHECK_THROWS_AS(select_unisolvent_subset(PointCloud(2, circle), poly_spec(2, 3)), std::invalid_argument);
    CHECK_THROWS_AS(select_unisolvent_subset(PointCloud(2, {0.0, 0.0, 1.0, 0.0}), poly_spec(2, 2)),
                    std::invalid_argument);
}

TEST_CASE("lagrange bases of small examples") {
    const PointCloud line(1, {0.0, 1.0});
    const std::size_t both[] = {0, 1};
    const auto b1 = build_lagrange_basis(line, both, poly_spec(1, 2));
    for (double x : {-0.5, 0.0, 0.3, 1.0, 2.0}) {
        const double xv[] = {x};
        const auto v = eval_poly_basis(b1, xv);
        CHECK(v[0] == doctest::Approx(1.0 - x).epsilon(1e-13));
        CHECK(v[1] == doctest::Approx(x).epsilon(1e-13));
    }

    const PointCloud single(2, {0.3, 0.7});
    const std::size_t first[] = {0};
    const auto b0 = build_lagrange_basis(single, first, poly_spec(2, 1));
    const double anywhere[] = {5.0, -2.0};
    CHECK(eval_poly_basis(b0, anywhere)[0] == doctest::Approx(1.0).epsilon(1e-14));

    const PointCloud tri(2, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0});
    const std::size_t three[] = {0, 1, 2};
    const auto bt = build_lagrange_basis(tri, three, poly_spec(2, 2));
    for (auto [x, y] : {std::pair{0.2, 0.3}, {1.0, 1.0}, {-0.4, 0.9}}) {
        const double p[] = {x, y};
        const auto v = eval_poly_basis(bt, p);
        CHECK(v[0] == doctest::Approx(1.0 - x - y).epsilon(1e-13));
        CHECK(v[1] == doctest::Approx(x).epsilon(1e-13));
        CHECK(v[2] == doctest::Approx(y).epsilon(1e-13));
    }

    const std::size_t dup[] = {0, 0};
    CHECK_THROWS_AS(build_lagrange_basis(line, dup, poly_spec(1, 2)), std::invalid_argument);
    const std::size_t one[] = {0};
    CHECK_THROWS_AS(build_lagrange_basis(line, one, poly_spec(1, 2)), std::invalid_argument);
}

TEST_CASE("kronecker property and polynomial reproduction") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 2.0), coef(-3.0, 3.0);
    for (int d = 1; d <= 3; ++d)
        for (int k_min = 1; k_min <= 4; ++k_min) {
            const auto cloud = generate_random_cloud(static_cast<std::size_t>(d), 80, AxisBox::unit(static_cast<std::size_t>(d)), 17);
            const auto spec = poly_spec(d, k_min);
            const auto basis = build_lagrange_basis(cloud, select_unisolvent_subset(cloud, spec), spec);
            const auto m = basis.size();
            for (std::size_t a = 0; a < m; ++a) {
                const auto v = eval_poly_basis(basis, basis.node(a));
                for (std::size_t b = 0; b < m; ++b)
                    CHECK(std::abs(v[static_cast<Eigen::Index>(b)] - (a == b ? 1.0 : 0.0)) <= 1e-10);
            }
            // sum_alpha pi_alpha(x) p(xi_alpha) == p(x) for random p of degree < k_min
            const auto idx = enumerate_multi_indices(d, k_min - 1);
            std::vector<double> c(idx.size());
            for (double& ci : c) ci = coef(rng);
            auto p = [&](std::span<const double> x) {
                double s = 0.0;
                for (std::size_t i = 0; i < idx.size(); ++i) s += c[i] * monomial(idx[i], x);
                return s;
            };
            Eigen::VectorXd at_nodes(static_cast<Eigen::Index>(m));
            for (std::size_t a = 0; a < m; ++a) at_nodes[static_cast<Eigen::Index>(a)] = p(basis.node(a));
            for (int t = 0; t < 100; ++t) {
                std::vector<double> x(static_cast<std::size_t>(d));
                for (double& xi : x) xi = u(rng);
                // relative to the magnitude of the terms, so cancellation in p(x) does not count
                double scale = 0.0;
                for (std::size_t i = 0; i < idx.size(); ++i) scale += std::abs(c[i] * monomial(idx[i], x));
                const double got = eval_poly_basis(basis, x).dot(at_nodes);
                CHECK(std::abs(got - p(x)) <= 1e-9 * scale);
            }
        }
}
