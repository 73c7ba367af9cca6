#include "rbfh/solver.hpp"

#include "rbfh/clustering.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace rbfh {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

InterpolationProblem make_problem(PointCloud cloud, KernelSpec spec) {
    spec.validate();
    if (static_cast<int>(cloud.dim()) != spec.dim)
        throw std::invalid_argument("point dimension does not match kernel dimension");
    const auto nodes = select_unisolvent_subset(cloud, spec);
    PolyBasis basis = build_lagrange_basis(cloud, nodes, spec);
    SaddleSystem sys = assemble_system(cloud, spec, basis);
    return {std::move(cloud), std::move(spec), std::move(basis), std::move(sys)};
}

std::string to_string(SolveMethod m) { return m == SolveMethod::Dense ? "dense" : "hchol"; }

SolveMethod parse_solve_method(const std::string& s) {
    if (s == "dense") return SolveMethod::Dense;
    if (s == "hchol") return SolveMethod::HCholesky;
    throw std::invalid_argument("unknown solve method '" + s + "' (expected dense or hchol)");
}

namespace {

// Solves A x + B^T y = g, B x = h through M = A + gamma B^T B:
// M x = g + gamma B^T h - B^T y and (B M^{-1} B^T) y = B M^{-1}(g + gamma B^T h) - h.
class AugmentedSolver {
public:
    AugmentedSolver(const InterpolationProblem& prob, const SolveOptions& opts) : sys_(prob.sys), gamma_(opts.gamma) {
        if (!(gamma_ > 0.0)) throw std::invalid_argument("gamma must be positive");
        auto tree = std::make_shared<const ClusterTree>(build_cluster_tree(prob.cloud, opts.leaf_size));
        auto part = std::make_shared<const BlockPartition>(build_block_partition(tree, opts.eta));
        const MatrixXd m = augmented_lagrangian(sys_, gamma_);
        factor_ = std::make_unique<HMatrix>(hcholesky(compress(m, part, Truncation::tolerance(opts.compress_eps)), opts.trunc));
        const Index nm = sys_.n_min();
        minv_bt_.resize(sys_.n(), nm);
        for (Index a = 0; a < nm; ++a) minv_bt_.col(a) = apply_inverse(*factor_, sys_.B.row(a).transpose());
        if (nm > 0) {
            schur_.compute(sys_.B * minv_bt_);
            if (schur_.rank() < nm) throw std::runtime_error("Schur complement B M^{-1} B^T is singular");
        }
    }

    void apply(const VectorXd& g, const VectorXd& h, VectorXd& x, VectorXd& y) const {
        VectorXd rhs = g;
        if (sys_.n_min() > 0) rhs += gamma_ * (sys_.B.transpose() * h);
        const VectorXd z = apply_inverse(*factor_, rhs);
        if (sys_.n_min() > 0) {
            y = schur_.solve(sys_.B * z - h);
            x = z - minv_bt_ * y;
        } else {
            y.resize(0);
            x = z;
        }
    }

private:
    const SaddleSystem& sys_;
    double gamma_;
    std::unique_ptr<HMatrix> factor_;
    MatrixXd minv_bt_;
    Eigen::FullPivLU<MatrixXd> schur_;
};

SolveReport residuals(const SaddleSystem& sys, const VectorXd& f, const VectorXd& c, const VectorXd& d) {
    SolveReport rep;
    VectorXd r = sys.A * c - f;
    if (sys.n_min() > 0) r += sys.B.transpose() * d;
    rep.interpolation_residual = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    rep.constraint_residual = sys.n_min() > 0 ? (sys.B * c).norm() : 0.0;
    return rep;
}

} // namespace

SolveResult solve(const InterpolationProblem& prob, const VectorXd& f, const SolveOptions& opts) {
    const SaddleSystem& sys = prob.sys;
    const Index n = sys.n(), nm = sys.n_min();
    if (f.size() != n) throw std::invalid_argument("data vector length does not match the number of points");
    if (!f.allFinite()) throw std::invalid_argument("data values must be finite");

    VectorXd c, d;
    int steps = 0;
    if (opts.method == SolveMethod::Dense) {
        Eigen::PartialPivLU<MatrixXd> lu(assemble_saddle_matrix(sys));
        const VectorXd diag = lu.matrixLU().diagonal();
        for (Index i = 0; i < diag.size(); ++i)
            if (diag[i] == 0.0) throw std::runtime_error("interpolation matrix is singular");
        VectorXd rhs = VectorXd::Zero(n + nm);
        rhs.head(n) = f;
        const VectorXd x = lu.solve(rhs);
        c = x.head(n);
        d = x.tail(nm);
    } else {
        AugmentedSolver as(prob, opts);
        as.apply(f, VectorXd::Zero(nm), c, d);
        for (; steps < opts.refinement_steps; ++steps) {
            VectorXd g = f - sys.A * c;
            VectorXd h = -(sys.B * c);
            if (nm > 0) g -= sys.B.transpose() * d;
            VectorXd dc, dd;
            as.apply(g, h, dc, dd);
            c += dc;
            d += dd;
        }
    }
    if (!c.allFinite() || !d.allFinite()) throw std::runtime_error("solve produced non-finite coefficients");

    SolveResult out{Interpolant{prob.cloud, prob.spec, prob.basis, std::move(c), std::move(d)}, {}};
    out.report = residuals(sys, f, out.u.c, out.u.d_coeffs);
    out.report.refinement_steps = steps;
    return out;
}

double evaluate(const Interpolant& u, std::span<const double> x) {
    if (x.size() != u.cloud.dim()) throw std::invalid_argument("evaluation point has the wrong dimension");
    const RadialKernel phi(u.spec);
    std::vector<double> diff(x.size());
    double s = 0.0;
    for (std::size_t n = 0; n < u.cloud.size(); ++n) {
        const auto p = u.cloud.point(n);
        for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - p[i];
        s += u.c[static_cast<Index>(n)] * phi.at(diff);
    }
    if (u.d_coeffs.size() > 0) s += eval_poly_basis(u.basis, x).dot(u.d_coeffs);
    return s;
}

double energy(const Interpolant& u, const SaddleSystem& sys) {
    if (u.c.size() != sys.n()) throw std::invalid_argument("coefficient vector does not match the system");
    if (sys.n_min() > 0 && (sys.B * u.c).norm() > 1e-8 * u.c.norm())
        throw std::domain_error("c not in C; energy identity invalid");
    // c^T A c >= 0 on ker B; tiny negative values are roundoff
    return std::max(0.0, u.c.dot(sys.A * u.c));
}

void write_data(std::ostream& os, const DataSet& data) {
    const std::size_t d = data.cloud.dim(), n = data.cloud.size();
    if (static_cast<std::size_t>(data.f.size()) != n) throw std::invalid_argument("data vector length mismatch");
    os << d << ' ' << n << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = data.cloud.point(i);
        for (std::size_t j = 0; j < d; ++j) os << p[j] << ' ';
        os << data.f[static_cast<Index>(i)] << '\n';
    }
}

DataSet read_data(std::istream& is) {
    std::size_t d = 0, n = 0;
    if (!(is >> d >> n) || d == 0 || n == 0) throw std::invalid_argument("data file: bad header (expected 'd N')");
    std::vector<double> coords(d * n);
    VectorXd f(static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j)
            if (!(is >> coords[i * d + j])) throw std::invalid_argument("data file: truncated coordinates");
        if (!(is >> f[static_cast<Index>(i)])) throw std::invalid_argument("data file: truncated values");
    }
    return {PointCloud(d, std::move(coords)), std::move(f)};
}

void write_data_file(const std::string& path, const DataSet& data) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_data(os, data);
}

DataSet read_data_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open '" + path + "'");
    return read_data(is);
}

} // namespace rbfh
