#include "rbfh/oracle.hpp"

#include "rbfh/ddouble.hpp"
#include "rbfh/hmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbfh {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(Precision p) { return p == Precision::Double ? "double" : "dd"; }

Precision parse_precision(const std::string& s) {
    if (s == "double") return Precision::Double;
    if (s == "dd") return Precision::DoubleDouble;
    throw std::invalid_argument("unknown precision mode '" + s + "' (expected double or dd)");
}

MatrixXd dd_inverse(const MatrixXd& k) {
    const Index n = k.rows();
    if (k.cols() != n) throw std::invalid_argument("dd_inverse: matrix must be square");
    std::vector<DDouble> a(static_cast<std::size_t>(n * n));
    auto at = [&](Index i, Index j) -> DDouble& { return a[static_cast<std::size_t>(i * n + j)]; };
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) at(i, j) = DDouble(k(i, j));

    std::vector<Index> piv(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
        Index p = j;
        for (Index i = j + 1; i < n; ++i) {
            if (abs(at(p, j)) < abs(at(i, j))) p = i;
        }
        if (at(p, j).hi() == 0.0) throw std::runtime_error("dense_inverse: matrix is singular");
        piv[static_cast<std::size_t>(j)] = p;
        if (p != j)
            for (Index c = 0; c < n; ++c) std::swap(at(j, c), at(p, c));
        const DDouble pivot = at(j, j);
        for (Index i = j + 1; i < n; ++i) {
            if (at(i, j).hi() == 0.0) continue;
            const DDouble l = at(i, j) / pivot;
            at(i, j) = l;
            DDouble* ri = &at(i, 0);
            const DDouble* rj = &at(j, 0);
            for (Index c = j + 1; c < n; ++c) ri[c] -= l * rj[c];
        }
    }

    MatrixXd inv(n, n);
    std::vector<DDouble> x(static_cast<std::size_t>(n));
    for (Index col = 0; col < n; ++col) {
        std::fill(x.begin(), x.end(), DDouble(0.0));
        x[static_cast<std::size_t>(col)] = DDouble(1.0);
        for (Index j = 0; j < n; ++j) std::swap(x[static_cast<std::size_t>(j)], x[static_cast<std::size_t>(piv[static_cast<std::size_t>(j)])]);
        for (Index i = 0; i < n; ++i) {
            DDouble s = x[static_cast<std::size_t>(i)];
            for (Index j = 0; j < i; ++j) s -= at(i, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] = s;
        }
        for (Index i = n; i-- > 0;) {
            DDouble s = x[static_cast<std::size_t>(i)];
            for (Index j = i + 1; j < n; ++j) s -= at(i, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] = s / at(i, i);
        }
        for (Index i = 0; i < n; ++i) inv(i, col) = static_cast<double>(x[static_cast<std::size_t>(i)]);
    }
    return inv;
}

namespace {

double residual_max_dd(const MatrixXd& k, const MatrixXd& s) {
    const Index n = k.rows();
    double worst = 0.0;
    const MatrixXd st = s.transpose();
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            DDouble acc(i == j ? -1.0 : 0.0);
            for (Index l = 0; l < n; ++l) acc += DDouble::two_prod(k(i, l), st(j, l));
            worst = std::max(worst, std::abs(static_cast<double>(acc)));
        }
    }
    return worst;
}

} // namespace

InverseBlocks dense_inverse(const SaddleSystem& sys, Precision precision) {
    const MatrixXd k = assemble_saddle_matrix(sys);
    const Index n = sys.n(), m = sys.n_min();
    InverseBlocks out;
    out.precision = precision;

    MatrixXd s;
    if (precision == Precision::Double) {
        Eigen::PartialPivLU<MatrixXd> lu(k);
        const VectorXd diag = lu.matrixLU().diagonal();
        for (Index i = 0; i < diag.size(); ++i) {
            if (diag[i] == 0.0) throw std::runtime_error("dense_inverse: matrix is singular");
        }
        s = lu.inverse();
        out.residual = (k * s - MatrixXd::Identity(n + m, n + m)).cwiseAbs().maxCoeff();
    } else {
        s = dd_inverse(k);
        out.residual = residual_max_dd(k, s);
    }
    if (!s.allFinite()) throw std::runtime_error("dense_inverse: non-finite entries in the inverse");
    out.condition_estimate = k.cwiseAbs().colwise().sum().maxCoeff() * s.cwiseAbs().colwise().sum().maxCoeff();

    out.S11 = s.topLeftCorner(n, n);
    out.S12 = s.topRightCorner(n, m);
    out.S21 = s.bottomLeftCorner(m, n);
    out.S22 = s.bottomRightCorner(m, m);
    return out;
}

double SpectrumReport::max_sigma(int index) const {
    double best = 0.0;
    for (const auto& b : blocks) {
        if (index >= 1 && index <= b.sigma.size()) best = std::max(best, b.sigma[index - 1]);
    }
    return best;
}

std::vector<double> SpectrumReport::bound_curve() const {
    std::vector<double> out;
    for (int r = 0; r <= r_max; ++r) out.push_back(bound(r));
    return out;
}

SpectrumReport blockwise_spectra(const MatrixXd& s11, const BlockPartition& p, int r_max) {
    const ClusterTree& t = *p.tree;
    const Index n = static_cast<Index>(t.size());
    if (s11.rows() != n || s11.cols() != n) throw std::invalid_argument("blockwise_spectra: dimension mismatch");
    if (r_max < 0) throw std::invalid_argument("blockwise_spectra: r_max must be nonnegative");

    SpectrumReport rep;
    rep.depth = t.depth();
    rep.sparsity_constant = sparsity_constant(p);
    rep.r_max = r_max;
    const auto& perm = t.perm();
    for (const BlockId& b : p.admissible) {
        const Cluster& r = t.node(b.row);
        const Cluster& c = t.node(b.col);
        MatrixXd blk(static_cast<Index>(r.size()), static_cast<Index>(c.size()));
        for (Index j = 0; j < blk.cols(); ++j)
            for (Index i = 0; i < blk.rows(); ++i)
                blk(i, j) = s11(static_cast<Index>(perm[r.begin + static_cast<std::size_t>(i)]),
                                static_cast<Index>(perm[c.begin + static_cast<std::size_t>(j)]));
        Eigen::BDCSVD<MatrixXd> svd(blk);
        const VectorXd& sv = svd.singularValues();
        BlockSpectrum bs;
        bs.block = b;
        bs.sigma = VectorXd::Zero(r_max + 1);
        const Index keep = std::min<Index>(sv.size(), r_max + 1);
        bs.sigma.head(keep) = sv.head(keep);
        rep.blocks.push_back(std::move(bs));
    }
    return rep;
}

DecayFit decay_fit(std::span<const double> values, int r_lo, int r_hi) {
    std::vector<double> xs, ys;
    for (int r = std::max(r_lo, 0); r <= r_hi && static_cast<std::size_t>(r) < values.size(); ++r) {
        if (values[static_cast<std::size_t>(r)] > 0.0) {
            xs.push_back(r);
            ys.push_back(std::log(values[static_cast<std::size_t>(r)]));
        }
    }
    if (xs.size() < 3) throw std::invalid_argument("decay_fit: fewer than 3 usable points");
    const double m = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    DecayFit fit;
    fit.points = static_cast<int>(xs.size());
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += e * e;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

DecayFit decay_fit(const SpectrumReport& report, int r_lo, int r_hi) {
    const auto curve = report.bound_curve();
    return decay_fit(std::span<const double>(curve), r_lo, r_hi);
}

double spectral_norm(const MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<MatrixXd> svd(m);
    return svd.singularValues()[0];
}

double best_approximation_error(const MatrixXd& s11, std::shared_ptr<const BlockPartition> p, int r) {
    const HMatrix mr = compress(s11, std::move(p), Truncation::fixed_rank(r));
    return spectral_norm(s11 - mr.reconstruct());
}

} // namespace rbfh
