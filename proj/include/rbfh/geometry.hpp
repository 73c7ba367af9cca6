#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rbfh {

/// Axis-parallel box [lo, hi] in R^d.
class AxisBox {
public:
    AxisBox() = default;
    AxisBox(std::vector<double> lo, std::vector<double> hi);

    /// Unit cube [0,1]^d.
    static AxisBox unit(std::size_t dim);

    std::size_t dim() const { return lo_.size(); }
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }

    double extent(std::size_t axis) const { return hi_[axis] - lo_[axis]; }
    bool contains(std::span<const double> x) const;

private:
    std::vector<double> lo_;
    std::vector<double> hi_;
};

double box_diam(const AxisBox& b);
double box_dist(const AxisBox& a, const AxisBox& b);

/// Ordered set of pairwise distinct points in R^d, stored point-major.
///
/// The separation distance h_min (half the smallest pairwise distance) is
/// computed once at construction; it is 0 for a single point.
class PointCloud {
public:
    PointCloud(std::size_t dim, std::vector<double> coords);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return coords_.size() / dim_; }
    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    const std::vector<double>& coords() const { return coords_; }
    double sep_distance() const { return sep_distance_; }

    PointCloud subset(std::span<const std::size_t> indices) const;

private:
    std::size_t dim_;
    std::vector<double> coords_;
    double sep_distance_ = 0.0;
};

/// Half the minimum pairwise Euclidean distance. Throws for fewer than two points.
double separation_distance(const PointCloud& cloud);

PointCloud generate_uniform_grid(std::size_t dim, std::size_t n_per_axis, const AxisBox& domain);

/// Tensor grid with per-axis coordinates (i/(n-1))^beta, graded towards domain.lo().
PointCloud generate_graded_grid(std::size_t dim, std::size_t n_per_axis, double beta,
                                const AxisBox& domain);

/// Uniformly distributed random points in the domain (seeded, deterministic).
PointCloud generate_random_cloud(std::size_t dim, std::size_t n, const AxisBox& domain,
                                 unsigned long long seed);

/// Tight bounding box of the indexed points, inflated by `inflate_by` on every side.
AxisBox bounding_box(const PointCloud& cloud, std::span<const std::size_t> indices,
                     double inflate_by);
AxisBox bounding_box(const PointCloud& cloud, double inflate_by);

// Point-cloud text format: "d N" header, then N lines of d coordinates.
void write_points(std::ostream& os, const PointCloud& cloud);
PointCloud read_points(std::istream& is);
void write_points_file(const std::string& path, const PointCloud& cloud);
PointCloud read_points_file(const std::string& path);

} // namespace rbfh
