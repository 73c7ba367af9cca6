#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rbfh {

enum class KernelFamily { ThinPlateSpline, Matern };

/// How the fundamental solution is scaled.
///
/// `Exact` keeps the closed-form constants verbatim. `Unit` divides them out:
/// thin-plate splines become sign(C)·r^{2k-d}[ln r], Matern kernels are scaled
/// to phi(0) = 1 (e.g. e^{-r} for d=3, k=2, b=1).
enum class KernelScaling { Unit, Exact };

/// Kernel family plus the native-space parameters (d, k, k_min, sigma_l).
///
/// Use the named constructors; they enforce k > d/2 and the family-specific
/// coefficient patterns.
struct KernelSpec {
    KernelFamily family = KernelFamily::ThinPlateSpline;
    int dim = 2;
    int k = 2;
    int k_min = 2;
    double b = 0.0;             // Matern only
    std::vector<double> sigmas; // sigma_{k_min} .. sigma_k
    KernelScaling scaling = KernelScaling::Unit;

    static KernelSpec thin_plate(int dim, int k, KernelScaling scaling = KernelScaling::Unit);
    static KernelSpec matern(int dim, int k, double b, KernelScaling scaling = KernelScaling::Unit);

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;

    std::string family_name() const;
};

/// sigma_l = C(k,l) b^{2(k-l)}, l = 0..k.
std::vector<double> matern_sigmas(int k, double b);

/// N_min = dim P = C(d + k_min - 1, d).
std::size_t poly_space_dim(const KernelSpec& spec);

/// Gamma function; negative non-integer arguments go through the reflection formula.
double gamma_fn(double x);

/// The radial profile phi(x) = profile(|x|) with all constants precomputed.
class RadialKernel {
public:
    explicit RadialKernel(KernelSpec spec);

    const KernelSpec& spec() const { return spec_; }
    double operator()(double r) const;
    double at(std::span<const double> x) const;

    /// Ratio phi_used / phi_exact; 1 for KernelScaling::Exact.
    double scale_to_exact() const { return scale_; }

private:
    KernelSpec spec_;
    double constant_ = 1.0; // multiplies the raw radial profile
    double scale_ = 1.0;
    int power_ = 0;         // 2k - d for thin-plate splines
    int matern_l_ = 0;      // L = k - d/2 - 1/2 for odd d
    std::vector<double> matern_terms_;
};

double eval_kernel(const KernelSpec& spec, std::span<const double> x);

namespace detail {
/// (4pi)^{-d/2}/Gamma(k) * int_0^inf t^{k-d/2-1} exp(-b^2 t - r^2/(4t)) dt,
/// evaluated by adaptive Gauss-Kronrod on the log-substituted integrand.
double matern_integral(int dim, int k, double b, double r);
/// Exact Matern value at the origin: (4pi)^{-d/2} Gamma(k-d/2) b^{d-2k} / Gamma(k).
double matern_at_origin(int dim, int k, double b);
double thin_plate_constant(int dim, int k);
} // namespace detail

} // namespace rbfh
