#include "rbfh/assembly.hpp"
#include "rbfh/kernels.hpp"
#include "rbfh/polybasis.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace rbfh;
using std::numbers::pi;

namespace {

double phi_r(const KernelSpec& s, double r) {
    std::vector<double> x(static_cast<std::size_t>(s.dim), 0.0);
    x[0] = r;
    return eval_kernel(s, x);
}

// Bessel-potential reference: 2 (r/2b)^nu K_nu(b r) / ((4 pi)^{d/2} Gamma(k)), nu = k - d/2.
double matern_bessel(int d, int k, double b, double r) {
    const double nu = k - 0.5 * d;
    return 2.0 * std::pow(r / (2.0 * b), nu) * boost::math::cyl_bessel_k(nu, b * r) /
           (std::pow(4.0 * pi, 0.5 * d) * std::tgamma(double(k)));
}

Eigen::MatrixXd random_rotation(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

} // namespace

TEST_CASE("matern coefficient rows") {
    CHECK(matern_sigmas(2, 1.0) == std::vector<double>{1, 2, 1});
    CHECK(matern_sigmas(1, 2.0) == std::vector<double>{4, 1});
    CHECK(matern_sigmas(3, 1.0) == std::vector<double>{1, 3, 3, 1});
    CHECK_THROWS_AS(matern_sigmas(2, 0.0), std::invalid_argument);
}

TEST_CASE("kernel spec validation") {
    CHECK_THROWS_AS(KernelSpec::thin_plate(2, 1), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::matern(3, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::matern(2, 2, -1.0), std::invalid_argument);
    KernelSpec s = KernelSpec::thin_plate(2, 2);
    s.k_min = 1;
    s.sigmas = {1.0, 1.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    KernelSpec m = KernelSpec::matern(3, 2, 1.0);
    m.sigmas[1] = 3.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    CHECK(KernelSpec::matern(3, 2, 1.0).k_min == 0);
    CHECK(KernelSpec::thin_plate(3, 2).k_min == 2);
}

TEST_CASE("poly space dimension") {
    CHECK(poly_space_dim(KernelSpec::thin_plate(2, 2)) == 3);
    CHECK(poly_space_dim(KernelSpec::matern(3, 2, 1.0)) == 0);
    CHECK(poly_space_dim(KernelSpec::thin_plate(2, 3)) == 6);
    CHECK(poly_space_dim(KernelSpec::thin_plate(3, 2)) == 4);
    CHECK(poly_space_dim(KernelSpec::thin_plate(1, 3)) == 3);
}

TEST_CASE("thin-plate constants in exact scaling") {
    // d=2, k=2: C2 = (-1)^2 / (2^3 pi 1! 1!) = 1/(8 pi)
    CHECK(detail::thin_plate_constant(2, 2) == doctest::Approx(1.0 / (8.0 * pi)).epsilon(1e-15));
    const auto tps22 = KernelSpec::thin_plate(2, 2, KernelScaling::Exact);
    for (double r : {0.1, 0.5, 2.0, 3.7})
        CHECK(phi_r(tps22, r) == doctest::Approx(r * r * std::log(r) / (8.0 * pi)).epsilon(1e-14));
    CHECK(phi_r(tps22, 0.0) == 0.0);
    // d=3, k=2: C1 = Gamma(-1/2) / (16 pi^{3/2}) = -1/(8 pi), the biharmonic fundamental solution
    const auto tps32 = KernelSpec::thin_plate(3, 2, KernelScaling::Exact);
    CHECK(phi_r(tps32, 1.5) == doctest::Approx(-1.5 / (8.0 * pi)).epsilon(1e-14));
    // d=1, k=1: C1 = Gamma(-1/2) / (4 sqrt(pi)) = -1/2
    const auto tps11 = KernelSpec::thin_plate(1, 1, KernelScaling::Exact);
    CHECK(phi_r(tps11, 0.8) == doctest::Approx(-0.4).epsilon(1e-14));
    // d=2, k=3: C2 = (-1)^3 / (2^5 pi 2! 2!) ; r^4 ln r
    const auto tps23 = KernelSpec::thin_plate(2, 3, KernelScaling::Exact);
    CHECK(phi_r(tps23, 2.0) == doctest::Approx(-16.0 * std::log(2.0) / (128.0 * pi)).epsilon(1e-14));
    // d=4, k=3: C2 = (-1)^{3+1} / (2^5 pi^2 2! 1!)
    const auto tps43 = KernelSpec::thin_plate(4, 3, KernelScaling::Exact);
    CHECK(phi_r(tps43, 2.0) == doctest::Approx(4.0 * std::log(2.0) / (64.0 * pi * pi)).epsilon(1e-14));
}

TEST_CASE("unit scaling keeps the sign and drops the magnitude") {
    const auto u = KernelSpec::thin_plate(3, 2);
    CHECK(phi_r(u, 1.5) == doctest::Approx(-1.5).epsilon(1e-15));
    const auto v = KernelSpec::thin_plate(2, 2);
    CHECK(phi_r(v, 2.0) == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-15));
    CHECK(RadialKernel(v).scale_to_exact() == doctest::Approx(8.0 * pi));
}

TEST_CASE("matern closed form for odd d") {
    const auto exact = KernelSpec::matern(3, 2, 1.0, KernelScaling::Exact);
    const auto unit = KernelSpec::matern(3, 2, 1.0);
    for (double r : {0.0, 0.3, 1.0, 4.0}) {
        CHECK(phi_r(exact, r) == doctest::Approx(std::exp(-r) / (8.0 * pi)).epsilon(1e-14));
        CHECK(phi_r(unit, r) == doctest::Approx(std::exp(-r)).epsilon(1e-14));
    }
    // d=1, k=2, b=2: L=1 -> prefactor 1/(Gamma(2) (4)^3) * (2 + 4r) e^{-2r}
    const auto m12 = KernelSpec::matern(1, 2, 2.0, KernelScaling::Exact);
    for (double r : {0.0, 0.5, 2.0})
        CHECK(phi_r(m12, r) == doctest::Approx((2.0 + 4.0 * r) * std::exp(-2.0 * r) / 64.0).epsilon(1e-14));
}

TEST_CASE("matern values agree with the modified Bessel function") {
    for (int d : {1, 2, 3, 4})
        for (int k : {2, 3})
            for (double b : {0.5, 1.0, 2.0}) {
                if (2 * k <= d) continue;
                const auto s = KernelSpec::matern(d, k, b, KernelScaling::Exact);
                for (double r : {0.05, 0.4, 1.0, 3.0, 8.0}) {
                    const double ref = matern_bessel(d, k, b, r);
                    CHECK(phi_r(s, r) == doctest::Approx(ref).epsilon(1e-10));
                }
                CHECK(detail::matern_at_origin(d, k, b) ==
                      doctest::Approx(std::pow(4 * pi, -0.5 * d) * std::tgamma(k - 0.5 * d) *
                                      std::pow(b, d - 2.0 * k) / std::tgamma(double(k)))
                          .epsilon(1e-14));
            }
}

TEST_CASE("matern quadrature path agrees with the odd-d closed form") {
    for (int k : {2, 3, 4})
        for (double b : {0.5, 1.0, 3.0}) {
            const auto s = KernelSpec::matern(3, k, b, KernelScaling::Exact);
            for (double r : {0.0, 0.01, 0.2, 1.0, 2.5, 6.0}) {
                const double closed = phi_r(s, r);
                const double quad = detail::matern_integral(3, k, b, r);
                CHECK(std::abs(quad - closed) <= 1e-10 * std::abs(closed));
            }
        }
    const auto s1 = KernelSpec::matern(1, 1, 1.0, KernelScaling::Exact);
    for (double r : {0.0, 0.7, 3.0})
        CHECK(std::abs(detail::matern_integral(1, 1, 1.0, r) - phi_r(s1, r)) <= 1e-10 * phi_r(s1, r));
}

TEST_CASE("even-d matern in unit scaling is one at the origin") {
    for (int k : {2, 3}) {
        const auto s = KernelSpec::matern(2, k, 1.0);
        CHECK(phi_r(s, 0.0) == doctest::Approx(1.0).epsilon(1e-11));
        CHECK(phi_r(s, 1.0) < 1.0);
    }
}

TEST_CASE("kernels are radially symmetric") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> radius(0.1, 0.8), coin(0.0, 1.0), g(-1.0, 1.0);
    const KernelSpec specs[] = {KernelSpec::thin_plate(2, 2), KernelSpec::thin_plate(3, 2),
                                KernelSpec::matern(3, 2, 1.0), KernelSpec::matern(2, 2, 1.0),
                                KernelSpec::thin_plate(2, 3, KernelScaling::Exact)};
    for (const auto& s : specs) {
        for (int t = 0; t < 20; ++t) {
            Eigen::VectorXd x(s.dim);
            for (int i = 0; i < s.dim; ++i) x[i] = g(rng);
            // keep |x| away from 1 where ln r changes sign and relative accuracy is meaningless
            const double r = coin(rng) < 0.5 ? radius(rng) : 1.5 + 2.0 * coin(rng);
            x *= r / x.norm();
            const Eigen::VectorXd y = random_rotation(s.dim, rng) * x;
            const double a = eval_kernel(s, std::span<const double>(x.data(), x.size()));
            const double b = eval_kernel(s, std::span<const double>(y.data(), y.size()));
            CHECK(std::abs(a - b) <= 1e-13 * std::abs(a));
        }
    }
}

TEST_CASE("matern Gram matrices are positive definite") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int d : {1, 2, 3})
        for (int n : {5, 20, 40}) {
            const auto s = KernelSpec::matern(d, 2, 1.0);
            std::vector<double> pts(static_cast<std::size_t>(n * d));
            for (double& p : pts) p = u(rng);
            Eigen::MatrixXd a(n, n);
            std::vector<double> diff(static_cast<std::size_t>(d));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    for (int c = 0; c < d; ++c) diff[c] = pts[i * d + c] - pts[j * d + c];
                    a(i, j) = eval_kernel(s, diff);
                }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
        }
}

TEST_CASE("thin-plate splines are conditionally positive definite") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (int d : {1, 2, 3}) {
        const int k = d == 3 ? 2 : (d == 1 ? 1 : 2);
        const auto s = KernelSpec::thin_plate(d, k);
        const auto cloud = generate_random_cloud(static_cast<std::size_t>(d), 60, AxisBox::unit(static_cast<std::size_t>(d)), 4);
        const auto basis = build_lagrange_basis(cloud, select_unisolvent_subset(cloud, s), s);
        const auto sys = assemble_system(cloud, s, basis);
        // orthonormal basis of ker B from a full QR of B^T
        const Eigen::Index m = sys.n_min(), n = sys.n();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(sys.B.transpose());
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd z = q.rightCols(n - m);
        for (int t = 0; t < 50; ++t) {
            Eigen::VectorXd w(n - m);
            for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = g(rng);
            const Eigen::VectorXd c = z * w;
            CHECK((sys.B * c).norm() <= 1e-10 * c.norm());
            CHECK(c.dot(sys.A * c) > 0.0);
        }
    }
}
