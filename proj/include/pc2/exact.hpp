#pragma once
// Exact arithmetic in the field Q(√3): values a + b√3 with rational a, b.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>

namespace pc2::exact {

using Rational = boost::multiprecision::cpp_rational;

class QSqrt3 {
public:
    QSqrt3() = default;
    QSqrt3(Rational a, Rational b = 0) : a_(std::move(a)), b_(std::move(b)) {}
    QSqrt3(std::int64_t a) : a_(a) {}

    static QSqrt3 sqrt3() { return {0, 1}; }

    const Rational& rational_part() const { return a_; }
    const Rational& sqrt3_part() const { return b_; }

    QSqrt3 operator+(const QSqrt3& o) const { return {a_ + o.a_, b_ + o.b_}; }
    QSqrt3 operator-(const QSqrt3& o) const { return {a_ - o.a_, b_ - o.b_}; }
    QSqrt3 operator-() const { return {-a_, -b_}; }
    QSqrt3 operator*(const QSqrt3& o) const { return {a_ * o.a_ + 3 * b_ * o.b_, a_ * o.b_ + b_ * o.a_}; }
    QSqrt3 operator/(const QSqrt3& o) const {
        // (a + b√3)/(c + e√3) = (a + b√3)(c - e√3) / (c² - 3e²)
        const Rational den = o.a_ * o.a_ - 3 * o.b_ * o.b_;
        if (den == 0) throw std::domain_error("QSqrt3: division by zero");
        return {(a_ * o.a_ - 3 * b_ * o.b_) / den, (b_ * o.a_ - a_ * o.b_) / den};
    }
    QSqrt3& operator+=(const QSqrt3& o) { return *this = *this + o; }
    QSqrt3& operator-=(const QSqrt3& o) { return *this = *this - o; }

    /// Exact sign of a + b√3.
    int sign() const {
        const int sa = a_.sign(), sb = b_.sign();
        if (sa == 0) return sb;
        if (sb == 0 || sa == sb) return sa;
        // opposite signs: compare a² with 3b²
        const Rational lhs = a_ * a_, rhs = 3 * b_ * b_;
        if (lhs == rhs) return 0;
        return lhs > rhs ? sa : sb;
    }

    double to_double() const {
        return static_cast<double>(a_) + static_cast<double>(b_) * 1.7320508075688772935;
    }

    friend bool operator==(const QSqrt3& x, const QSqrt3& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
    friend std::strong_ordering operator<=>(const QSqrt3& x, const QSqrt3& y) {
        const int s = (x - y).sign();
        return s < 0 ? std::strong_ordering::less : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }

    std::string str() const { return a_.str() + " + " + b_.str() + "*sqrt3"; }

private:
    Rational a_{0};
    Rational b_{0};
};

/// Largest integer k with k <= x (exact).
inline std::int64_t floor_div(const QSqrt3& x, const QSqrt3& period) {
    // k = floor(x / period) computed with an approximate guess and exact correction
    const QSqrt3 q = x / period;
    auto k = static_cast<std::int64_t>(std::floor(q.to_double()));
    while (QSqrt3(k) > q) --k;
    while (QSqrt3(k + 1) <= q) ++k;
    return k;
}

}  // namespace pc2::exact
