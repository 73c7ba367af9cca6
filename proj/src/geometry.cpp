#include "rbfh/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace rbfh {

AxisBox::AxisBox(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size() || lo_.empty())
        throw std::invalid_argument("AxisBox: lo/hi dimension mismatch");
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (!(lo_[i] <= hi_[i]))
            throw std::invalid_argument("AxisBox: lo must not exceed hi");
    }
}

AxisBox AxisBox::unit(std::size_t dim) {
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

bool AxisBox::contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
    }
    return true;
}

double box_diam(const AxisBox& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < b.dim(); ++i) s += b.extent(i) * b.extent(i);
    return std::sqrt(s);
}

double box_dist(const AxisBox& a, const AxisBox& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("box_dist: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double gap = std::max({0.0, a.lo()[i] - b.hi()[i], b.lo()[i] - a.hi()[i]});
        s += gap * gap;
    }
    return std::sqrt(s);
}

namespace {

double min_pair_distance(std::size_t dim, const std::vector<double>& x) {
    const std::size_t n = x.size() / dim;
    double best = std::numeric_limits<double>::infinity();
    double tiny = best;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < dim; ++a) {
                const double t = x[i * dim + a] - x[j * dim + a];
                s += t * t;
            }
            if (s < 1e-280) {
                // squares may have underflowed; rescale by the largest component
                double m = 0.0;
                for (std::size_t a = 0; a < dim; ++a) m = std::max(m, std::abs(x[i * dim + a] - x[j * dim + a]));
                double q = 0.0;
                for (std::size_t a = 0; a < dim; ++a) {
                    const double t = (x[i * dim + a] - x[j * dim + a]) / m;
                    q += t * t;
                }
                tiny = std::min(tiny, m * std::sqrt(q));
            } else {
                best = std::min(best, s);
            }
        }
    }
    return std::min(std::sqrt(best), tiny);
}

} // namespace

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
    if (dim_ == 0) throw std::invalid_argument("PointCloud: dimension must be positive");
    if (coords_.empty() || coords_.size() % dim_ != 0)
        throw std::invalid_argument("PointCloud: need at least one point with d coordinates");
    for (double c : coords_) {
        if (!std::isfinite(c)) throw std::invalid_argument("PointCloud: non-finite coordinate");
    }

    const std::size_t n = size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto lex_less = [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(coords_.begin() + a * dim_, coords_.begin() + (a + 1) * dim_,
                                            coords_.begin() + b * dim_, coords_.begin() + (b + 1) * dim_);
    };
    std::sort(order.begin(), order.end(), lex_less);
    for (std::size_t i = 1; i < n; ++i) {
        if (std::equal(coords_.begin() + order[i - 1] * dim_, coords_.begin() + (order[i - 1] + 1) * dim_,
                       coords_.begin() + order[i] * dim_)) {
            throw std::invalid_argument("PointCloud: duplicate point at index " +
                                        std::to_string(std::max(order[i - 1], order[i])));
        }
    }

    if (n >= 2) sep_distance_ = 0.5 * min_pair_distance(dim_, coords_);
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
    std::vector<double> c;
    c.reserve(indices.size() * dim_);
    for (std::size_t i : indices) {
        if (i >= size()) throw std::out_of_range("PointCloud::subset: index out of range");
        auto p = point(i);
        c.insert(c.end(), p.begin(), p.end());
    }
    return {dim_, std::move(c)};
}

double separation_distance(const PointCloud& cloud) {
    if (cloud.size() < 2) throw std::invalid_argument("need at least two points");
    return 0.5 * min_pair_distance(cloud.dim(), cloud.coords());
}

namespace {

PointCloud tensor_grid(std::size_t dim, const std::vector<double>& axis_unit, const AxisBox& domain) {
    if (domain.dim() != dim) throw std::invalid_argument("grid: domain dimension mismatch");
    const std::size_t n = axis_unit.size();
    std::size_t total = 1;
    for (std::size_t a = 0; a < dim; ++a) total *= n;

    std::vector<double> coords(total * dim);
    std::vector<std::size_t> idx(dim, 0);
    for (std::size_t p = 0; p < total; ++p) {
        for (std::size_t a = 0; a < dim; ++a) {
            coords[p * dim + a] = domain.lo()[a] + axis_unit[idx[a]] * domain.extent(a);
        }
        // last axis fastest
        for (std::size_t a = dim; a-- > 0;) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    return {dim, std::move(coords)};
}

} // namespace

PointCloud generate_uniform_grid(std::size_t dim, std::size_t n_per_axis, const AxisBox& domain) {
    return generate_graded_grid(dim, n_per_axis, 1.0, domain);
}

PointCloud generate_graded_grid(std::size_t dim, std::size_t n_per_axis, double beta,
                                const AxisBox& domain) {
    if (n_per_axis < 2) throw std::invalid_argument("grid: n_per_axis must be at least 2");
    if (!(beta >= 1.0)) throw std::invalid_argument("grid: grading exponent must be >= 1");
    std::vector<double> t(n_per_axis);
    const double denom = static_cast<double>(n_per_axis - 1);
    for (std::size_t i = 0; i < n_per_axis; ++i) {
        const double s = static_cast<double>(i) / denom;
        t[i] = beta == 1.0 ? s : std::pow(s, beta);
    }
    return tensor_grid(dim, t, domain);
}

PointCloud generate_random_cloud(std::size_t dim, std::size_t n, const AxisBox& domain,
                                 unsigned long long seed) {
    if (domain.dim() != dim) throw std::invalid_argument("random cloud: domain dimension mismatch");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> coords(n * dim);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t a = 0; a < dim; ++a) {
            coords[p * dim + a] = domain.lo()[a] + u(rng) * domain.extent(a);
        }
    }
    return {dim, std::move(coords)};
}

AxisBox bounding_box(const PointCloud& cloud, std::span<const std::size_t> indices, double inflate_by) {
    if (indices.empty()) throw std::invalid_argument("bounding_box: empty index set");
    if (!(inflate_by >= 0.0)) throw std::invalid_argument("bounding_box: negative inflation");
    const std::size_t d = cloud.dim();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i : indices) {
        auto p = cloud.point(i);
        for (std::size_t a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    for (std::size_t a = 0; a < d; ++a) {
        lo[a] -= inflate_by;
        hi[a] += inflate_by;
    }
    return {std::move(lo), std::move(hi)};
}

AxisBox bounding_box(const PointCloud& cloud, double inflate_by) {
    std::vector<std::size_t> all(cloud.size());
    std::iota(all.begin(), all.end(), 0);
    return bounding_box(cloud, all, inflate_by);
}

void write_points(std::ostream& os, const PointCloud& cloud) {
    os << cloud.dim() << ' ' << cloud.size() << '\n';
    os << std::setprecision(17);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        for (std::size_t a = 0; a < p.size(); ++a) os << (a ? " " : "") << p[a];
        os << '\n';
    }
}

PointCloud read_points(std::istream& is) {
    std::size_t d = 0, n = 0;
    if (!(is >> d >> n) || d == 0)
        throw std::invalid_argument("point file: malformed header (expected \"d N\")");
    std::vector<double> coords(d * n);
    for (double& c : coords) {
        if (!(is >> c)) throw std::invalid_argument("point file: truncated coordinate list");
    }
    return {d, std::move(coords)};
}

void write_points_file(const std::string& path, const PointCloud& cloud) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_points(os, cloud);
}

PointCloud read_points_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open " + path);
    return read_points(is);
}

} // namespace rbfh
