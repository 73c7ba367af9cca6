#pragma once

#include <cmath>

namespace rbfh {

/// Unevaluated sum hi + lo of two doubles (~106 bit significand).
///
/// Built from the error-free transformations two_sum and two_prod (fma);
/// only what the dense elimination needs is provided.
class DDouble {
public:
    constexpr DDouble(double x = 0.0) : hi_(x), lo_(0.0) {}
    constexpr DDouble(double hi, double lo) : hi_(hi), lo_(lo) {}

    constexpr double hi() const { return hi_; }
    constexpr double lo() const { return lo_; }
    explicit constexpr operator double() const { return hi_ + lo_; }

    static DDouble two_sum(double a, double b) {
        const double s = a + b;
        const double bb = s - a;
        return {s, (a - (s - bb)) + (b - bb)};
    }
    static DDouble quick_two_sum(double a, double b) {
        const double s = a + b;
        return {s, b - (s - a)};
    }
    static DDouble two_prod(double a, double b) {
        const double p = a * b;
        return {p, std::fma(a, b, -p)};
    }

    friend DDouble operator+(DDouble a, DDouble b) {
        DDouble s = two_sum(a.hi_, b.hi_);
        DDouble t = two_sum(a.lo_, b.lo_);
        double lo = s.lo_ + t.hi_;
        s = quick_two_sum(s.hi_, lo);
        lo = s.lo_ + t.lo_;
        return quick_two_sum(s.hi_, lo);
    }
    friend DDouble operator-(DDouble a) { return {-a.hi_, -a.lo_}; }
    friend DDouble operator-(DDouble a, DDouble b) { return a + (-b); }
    friend DDouble operator*(DDouble a, DDouble b) {
        DDouble p = two_prod(a.hi_, b.hi_);
        const double lo = p.lo_ + (a.hi_ * b.lo_ + a.lo_ * b.hi_);
        return quick_two_sum(p.hi_, lo);
    }
    friend DDouble operator/(DDouble a, DDouble b) {
        const double q1 = a.hi_ / b.hi_;
        DDouble r = a - b * DDouble(q1);
        const double q2 = r.hi_ / b.hi_;
        r = r - b * DDouble(q2);
        const double q3 = r.hi_ / b.hi_;
        return quick_two_sum(q1, q2) + DDouble(q3);
    }

    DDouble& operator+=(DDouble b) { return *this = *this + b; }
    DDouble& operator-=(DDouble b) { return *this = *this - b; }
    DDouble& operator*=(DDouble b) { return *this = *this * b; }
    DDouble& operator/=(DDouble b) { return *this = *this / b; }

    friend DDouble abs(DDouble a) { return a.hi_ < 0.0 ? -a : a; }
    friend bool operator<(DDouble a, DDouble b) { return a.hi_ < b.hi_ || (a.hi_ == b.hi_ && a.lo_ < b.lo_); }
    friend bool operator==(DDouble a, DDouble b) { return a.hi_ == b.hi_ && a.lo_ == b.lo_; }

private:
    double hi_;
    double lo_;
};

} // namespace rbfh
