#include "rbfh/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rbfh {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return std::round(c);
}

} // namespace

double gamma_fn(double x) {
    if (x < 0.5) {
        if (x == std::floor(x)) throw std::domain_error("gamma_fn: pole at non-positive integer");
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * std::tgamma(1.0 - x));
    }
    return std::tgamma(x);
}

std::vector<double> matern_sigmas(int k, double b) {
    if (k < 1) throw std::invalid_argument("matern_sigmas: k must be >= 1");
    if (!(b > 0.0)) throw std::invalid_argument("matern_sigmas: b must be positive");
    std::vector<double> s(static_cast<std::size_t>(k) + 1);
    for (int l = 0; l <= k; ++l) s[l] = binomial(k, l) * std::pow(b, 2.0 * (k - l));
    return s;
}

KernelSpec KernelSpec::thin_plate(int dim, int k, KernelScaling scaling) {
    KernelSpec s;
    s.family = KernelFamily::ThinPlateSpline;
    s.dim = dim;
    s.k = k;
    s.k_min = k;
    s.sigmas = {1.0};
    s.scaling = scaling;
    s.validate();
    return s;
}

KernelSpec KernelSpec::matern(int dim, int k, double b, KernelScaling scaling) {
    KernelSpec s;
    s.family = KernelFamily::Matern;
    s.dim = dim;
    s.k = k;
    s.k_min = 0;
    s.b = b;
    s.sigmas = matern_sigmas(k, b);
    s.scaling = scaling;
    s.validate();
    return s;
}

void KernelSpec::validate() const {
    if (dim < 1) throw std::invalid_argument("kernel: dimension must be positive");
    if (2 * k <= dim) throw std::invalid_argument("kernel: need k > d/2");
    if (k_min < 0 || k_min > k) throw std::invalid_argument("kernel: k_min must lie in 0..k");
    if (sigmas.size() != static_cast<std::size_t>(k - k_min + 1))
        throw std::invalid_argument("kernel: expected k - k_min + 1 coefficients");
    for (double s : sigmas) {
        if (!(s >= 0.0)) throw std::invalid_argument("kernel: coefficients must be nonnegative");
    }
    if (!(sigmas.front() > 0.0) || !(sigmas.back() > 0.0))
        throw std::invalid_argument("kernel: sigma_{k_min} and sigma_k must be positive");

    switch (family) {
    case KernelFamily::ThinPlateSpline:
        if (k_min != k || sigmas.size() != 1 || sigmas[0] != 1.0)
            throw std::invalid_argument("thin-plate spline requires k_min = k and sigma_k = 1");
        break;
    case KernelFamily::Matern: {
        if (!(b > 0.0)) throw std::invalid_argument("matern: b must be positive");
        if (k_min != 0) throw std::invalid_argument("matern requires k_min = 0");
        const auto expect = matern_sigmas(k, b);
        for (std::size_t l = 0; l < expect.size(); ++l) {
            if (std::abs(sigmas[l] - expect[l]) > 1e-12 * std::abs(expect[l]))
                throw std::invalid_argument("matern: sigma_l must equal C(k,l) b^{2(k-l)}");
        }
        break;
    }
    }
}

std::string KernelSpec::family_name() const {
    return family == KernelFamily::Matern ? "matern" : "tps";
}

std::size_t poly_space_dim(const KernelSpec& spec) {
    if (spec.k_min == 0) return 0;
    return static_cast<std::size_t>(binomial(spec.dim + spec.k_min - 1, spec.dim));
}

namespace detail {

double thin_plate_constant(int dim, int k) {
    const double pi_d2 = std::pow(std::numbers::pi, 0.5 * dim);
    if (dim % 2 == 1) {
        return gamma_fn(0.5 * dim - k) / (std::pow(4.0, k) * pi_d2 * factorial(k - 1));
    }
    const int sign_exp = k + (dim - 2) / 2;
    const double sign = sign_exp % 2 == 0 ? 1.0 : -1.0;
    return sign / (std::pow(2.0, 2 * k - 1) * pi_d2 * factorial(k - 1) * factorial(k - dim / 2));
}

double matern_at_origin(int dim, int k, double b) {
    return std::pow(4.0 * std::numbers::pi, -0.5 * dim) * gamma_fn(k - 0.5 * dim) *
           std::pow(b, dim - 2.0 * k) / gamma_fn(k);
}

double matern_integral(int dim, int k, double b, double r) {
    // t = e^s: integrand exp(nu s - b^2 e^s - r^2 e^{-s}/4), shifted to its peak.
    const double nu = k - 0.5 * dim;
    const double b2 = b * b;
    const double y_peak = (nu + std::sqrt(nu * nu + b2 * r * r)) / (2.0 * b2);
    const double s_peak = std::log(y_peak);
    auto g = [&](double s) {
        const double e = std::exp(s);
        // e underflows far out on the left tail; r = 0 must not turn that into 0/0
        return r == 0.0 ? nu * s - b2 * e : nu * s - b2 * e - 0.25 * r * r / e;
    };
    const double g_peak = g(s_peak);
    auto f = [&](double u) {
        const double v = g(s_peak + u) - g_peak;
        return v >= -745.0 ? std::exp(v) : 0.0;
    };
    double err = 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, -inf, inf, 20, 1e-13, &err);
    return std::pow(4.0 * std::numbers::pi, -0.5 * dim) / gamma_fn(k) * std::exp(g_peak) * integral;
}

} // namespace detail

RadialKernel::RadialKernel(KernelSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const int d = spec_.dim;
    const int k = spec_.k;
    const bool exact = spec_.scaling == KernelScaling::Exact;

    if (spec_.family == KernelFamily::ThinPlateSpline) {
        power_ = 2 * k - d;
        const double c = detail::thin_plate_constant(d, k);
        constant_ = exact ? c : (c > 0 ? 1.0 : -1.0);
        scale_ = exact ? 1.0 : 1.0 / std::abs(c);
        return;
    }

    const double origin = detail::matern_at_origin(d, k, spec_.b);
    scale_ = exact ? 1.0 : 1.0 / origin;
    if (d % 2 == 1) {
        matern_l_ = k - (d + 1) / 2;
        const int L = matern_l_;
        matern_terms_.resize(static_cast<std::size_t>(L) + 1);
        for (int l = 0; l <= L; ++l) {
            matern_terms_[l] = factorial(2 * L - l) / (factorial(l) * factorial(L - l));
        }
        const double prefactor = std::pow(4.0 * std::numbers::pi, 0.5 * (1 - d)) /
                                 (gamma_fn(k) * std::pow(2.0 * spec_.b, 2 * L + 1));
        constant_ = prefactor * scale_;
    } else {
        constant_ = scale_;
    }
}

double RadialKernel::operator()(double r) const {
    if (spec_.family == KernelFamily::ThinPlateSpline) {
        const double rp = std::pow(r, power_);
        if (spec_.dim % 2 == 1) return constant_ * rp;
        if (r == 0.0) return 0.0;
        return constant_ * rp * std::log(r);
    }
    if (spec_.dim % 2 == 1) {
        const double z = 2.0 * spec_.b * r;
        double sum = 0.0;
        double zl = 1.0;
        for (double t : matern_terms_) {
            sum += t * zl;
            zl *= z;
        }
        return constant_ * sum * std::exp(-spec_.b * r);
    }
    return constant_ * detail::matern_integral(spec_.dim, spec_.k, spec_.b, r);
}

double RadialKernel::at(std::span<const double> x) const {
    double s = 0.0;
    for (double v : x) s += v * v;
    return (*this)(std::sqrt(s));
}

double eval_kernel(const KernelSpec& spec, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(spec.dim))
        throw std::invalid_argument("eval_kernel: point dimension mismatch");
    return RadialKernel(spec).at(x);
}

} // namespace rbfh
