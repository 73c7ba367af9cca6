#include "rbfh/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace rbfh {

SaddleSystem assemble_system(const PointCloud& cloud, const KernelSpec& spec, const PolyBasis& basis) {
    if (static_cast<int>(cloud.dim()) != spec.dim || basis.dim != spec.dim)
        throw std::invalid_argument("assemble_system: inconsistent dimensions");
    if (basis.size() != poly_space_dim(spec))
        throw std::invalid_argument("assemble_system: basis size does not match N_min");

    const RadialKernel phi(spec);
    const auto n = static_cast<Eigen::Index>(cloud.size());
    const std::size_t d = cloud.dim();
    SaddleSystem sys;
    sys.A.resize(n, n);
    for (Eigen::Index m = 0; m < n; ++m) {
        auto xm = cloud.point(static_cast<std::size_t>(m));
        for (Eigen::Index j = 0; j <= m; ++j) {
            auto xj = cloud.point(static_cast<std::size_t>(j));
            double s = 0.0;
            for (std::size_t a = 0; a < d; ++a) s += (xm[a] - xj[a]) * (xm[a] - xj[a]);
            const double v = phi(std::sqrt(s));
            sys.A(m, j) = v;
            sys.A(j, m) = v;
        }
    }

    const auto m_min = static_cast<Eigen::Index>(basis.size());
    sys.B.resize(m_min, n);
    if (m_min > 0) {
        for (Eigen::Index j = 0; j < n; ++j) sys.B.col(j) = eval_poly_basis(basis, cloud.point(static_cast<std::size_t>(j)));
    }
    return sys;
}

Eigen::MatrixXd assemble_saddle_matrix(const SaddleSystem& sys) {
    const Eigen::Index n = sys.n();
    const Eigen::Index m = sys.n_min();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + m, n + m);
    k.topLeftCorner(n, n) = sys.A;
    if (m > 0) {
        k.topRightCorner(n, m) = sys.B.transpose();
        k.bottomLeftCorner(m, n) = sys.B;
    }
    return k;
}

Eigen::MatrixXd augmented_lagrangian(const SaddleSystem& sys, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("augmented_lagrangian: gamma must be positive");
    if (sys.n_min() == 0) return sys.A;
    Eigen::MatrixXd k = sys.A;
    Eigen::MatrixXd btb = sys.B.transpose() * sys.B;
    // B^T B is symmetric in exact arithmetic; enforce it bitwise.
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = gamma * btb(i, j);
            k(i, j) += v;
            if (i != j) k(j, i) += v;
        }
    }
    return k;
}

} // namespace rbfh
