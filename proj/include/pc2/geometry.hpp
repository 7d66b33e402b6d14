#pragma once
/**
 * @file geometry.hpp
 * @brief Planar primitives for packing-constrained point covering.
 *
 * All lengths are in units of the unit-disk radius. A point at distance
 * exactly 1 from a disk center is covered (closed disks), so the uncovered
 * region of a packing is open.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pc2 {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSqrt3 = std::numbers::sqrt3;

/// Radius of the disk that fits between three mutually tangent unit disks.
inline constexpr double kHoleRadius = 2.0 / kSqrt3 - 1.0;
/// Area of one cell of the close-packing lattice (minimum distance 2).
inline constexpr double kFundamentalArea = 2.0 * kSqrt3;
/// Uncovered area per cell of a close packing.
inline constexpr double kInterstitiumArea = 2.0 * kSqrt3 - kPi;
/// Default comparison tolerance for lengths and angles.
inline constexpr double kEps = 1e-9;
/// Largest H_d spacing for which every hole of radius r meets a lattice point.
inline constexpr double kCriticalSpacing = kSqrt3 * kHoleRadius;

struct Point2 {
    double x{0.0};
    double y{0.0};

    constexpr Point2() = default;
    Point2(double px, double py) : x(px), y(py) {
        if (!std::isfinite(px) || !std::isfinite(py)) {
            throw std::invalid_argument("Point2: non-finite coordinate");
        }
    }

    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator-() const { return {-x, -y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    friend Point2 operator*(double s, const Point2& p) { return p * s; }
    Point2 operator/(double s) const { return {x / s, y / s}; }
    Point2& operator+=(const Point2& o) { x += o.x; y += o.y; return *this; }
    Point2& operator-=(const Point2& o) { x -= o.x; y -= o.y; return *this; }

    constexpr double dot(const Point2& o) const { return x * o.x + y * o.y; }
    constexpr double cross(const Point2& o) const { return x * o.y - y * o.x; }
    constexpr double norm2() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }

    friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

using PointSet = std::vector<Point2>;

inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

inline Point2 rotate(const Point2& p, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

inline Point2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Wraps an angle into [0, 2π).
inline double normalize_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

inline bool lex_less(const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

struct Disk {
    Point2 center;
    double radius{1.0};

    Disk() = default;
    Disk(Point2 c, double r) : center(c), radius(r) {
        if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("Disk: radius must be positive");
    }

    /// Closed-disk membership with tolerance.
    bool contains(const Point2& p, double tol = kEps) const {
        return distance(p, center) <= radius + tol;
    }
};

/// Rigid motion: rotation about the origin followed by a translation.
struct Pose {
    double angle{0.0};
    Point2 shift{};

    Pose() = default;
    Pose(double a, Point2 s) : angle(normalize_angle(a)), shift(s) {
        if (!std::isfinite(a)) throw std::invalid_argument("Pose: non-finite angle");
    }

    Point2 apply(const Point2& p) const { return rotate(p, angle) + shift; }
    Point2 apply_inverse(const Point2& p) const { return rotate(p - shift, -angle); }

    friend bool operator==(const Pose&, const Pose&) = default;
};

/// Lexicographic order on (angle, shift.x, shift.y); used for deterministic ties.
inline bool pose_less(const Pose& a, const Pose& b) {
    if (a.angle != b.angle) return a.angle < b.angle;
    return lex_less(a.shift, b.shift);
}

/**
 * Hexagonal lattice with minimum distance d. Before the pose is applied the
 * basis is (d, 0) and (d/2, √3 d/2); the pose rotates the basis and moves the
 * lattice origin to pose.shift.
 */
class HexLattice {
public:
    HexLattice() : HexLattice(2.0) {}
    explicit HexLattice(double min_dist, Pose pose = {}) : d_(min_dist), pose_(pose) {
        if (!(min_dist > 0.0) || !std::isfinite(min_dist)) {
            throw std::invalid_argument("HexLattice: min_dist must be positive");
        }
        b1_ = rotate({d_, 0.0}, pose_.angle);
        b2_ = rotate({0.5 * d_, 0.5 * kSqrt3 * d_}, pose_.angle);
        det_ = b1_.cross(b2_);
    }

    /// The close-packing lattice H: d = 2, identity pose.
    static HexLattice close_packing() { return HexLattice(2.0); }

    double min_dist() const { return d_; }
    const Pose& pose() const { return pose_; }
    const Point2& basis1() const { return b1_; }
    const Point2& basis2() const { return b2_; }
    double cell_area() const { return std::abs(det_); }
    double covering_radius() const { return d_ / kSqrt3; }

    Point2 vector(double i, double j) const { return b1_ * i + b2_ * j; }
    Point2 point(double i, double j) const { return pose_.shift + vector(i, j); }

    /// Coordinates (a, b) of a displacement v in the basis: v = a·b1 + b·b2.
    std::pair<double, double> fractional(const Point2& v) const {
        return {v.cross(b2_) / det_, b1_.cross(v) / det_};
    }

    /// The two deep holes of the cell spanned by the basis at the lattice origin.
    std::array<Point2, 2> deep_holes() const {
        return {point(1.0 / 3.0, 1.0 / 3.0), point(2.0 / 3.0, 2.0 / 3.0)};
    }

private:
    double d_;
    Pose pose_;
    Point2 b1_, b2_;
    double det_;
};

namespace detail {

// Squared distance from displacement v to the nearest vector of the lattice
// spanned by b1, b2 (60 degrees apart), and that lattice vector's indices.
// The nearest vector is a corner of the parallelogram cell containing v.
inline double nearest_vector_sq(const HexLattice& L, double vx, double vy, long& bi, long& bj) {
    const Point2& b1 = L.basis1();
    const Point2& b2 = L.basis2();
    const double det = b1.x * b2.y - b1.y * b2.x;
    const double a = (vx * b2.y - vy * b2.x) / det;
    const double b = (b1.x * vy - b1.y * vx) / det;
    const double fa = std::floor(a), fb = std::floor(b);
    double best = INFINITY;
    for (int di = 0; di <= 1; ++di) {
        for (int dj = 0; dj <= 1; ++dj) {
            const double i = fa + di, j = fb + dj;
            const double rx = vx - (i * b1.x + j * b2.x);
            const double ry = vy - (i * b1.y + j * b2.y);
            const double n2 = rx * rx + ry * ry;
            if (n2 < best) {
                best = n2;
                bi = static_cast<long>(i);
                bj = static_cast<long>(j);
            }
        }
    }
    return best;
}

// Fast squared distance from (x, y) to the close-packing lattice H.
inline double dist2_to_close_packing(double x, double y) {
    constexpr double inv_h = 1.0 / kSqrt3;
    const double b = y * inv_h;
    const double a = 0.5 * (x - b);
    const double fa = std::floor(a), fb = std::floor(b);
    const double rx = x - 2.0 * fa - fb;
    const double ry = y - kSqrt3 * fb;
    // corners (0,0), (2,0), (1,√3), (3,√3) relative to (rx, ry)
    const double d0 = rx * rx + ry * ry;
    const double d1 = (rx - 2.0) * (rx - 2.0) + ry * ry;
    const double d2 = (rx - 1.0) * (rx - 1.0) + (ry - kSqrt3) * (ry - kSqrt3);
    const double d3 = (rx - 3.0) * (rx - 3.0) + (ry - kSqrt3) * (ry - kSqrt3);
    return std::min(std::min(d0, d1), std::min(d2, d3));
}

// Displacement from the nearest point of H to (x, y).
inline Point2 offset_to_close_packing(double x, double y) {
    constexpr double inv_h = 1.0 / kSqrt3;
    const double b = y * inv_h;
    const double a = 0.5 * (x - b);
    const double fa = std::floor(a), fb = std::floor(b);
    const double rx = x - 2.0 * fa - fb;
    const double ry = y - kSqrt3 * fb;
    const double cx[4] = {0.0, 2.0, 1.0, 3.0};
    const double cy[4] = {0.0, 0.0, kSqrt3, kSqrt3};
    int best = 0;
    double bd = INFINITY;
    for (int c = 0; c < 4; ++c) {
        const double d = (rx - cx[c]) * (rx - cx[c]) + (ry - cy[c]) * (ry - cy[c]);
        if (d < bd) {
            bd = d;
            best = c;
        }
    }
    return {rx - cx[best], ry - cy[best]};
}

}  // namespace detail

/// Closest lattice point to p and its distance.
inline std::pair<Point2, double> nearest_lattice_point(const Point2& p, const HexLattice& L) {
    const Point2 v = p - L.pose().shift;
    long i = 0, j = 0;
    const double n2 = detail::nearest_vector_sq(L, v.x, v.y, i, j);
    return {L.point(static_cast<double>(i), static_cast<double>(j)), std::sqrt(n2)};
}

inline double distance_to_lattice(const Point2& p, const HexLattice& L) {
    return nearest_lattice_point(p, L).second;
}

/// Distance from p to the close-packing lattice H (no pose).
inline double distance_to_close_packing(const Point2& p) {
    return std::sqrt(detail::dist2_to_close_packing(p.x, p.y));
}

/**
 * Reduces p modulo the lattice vectors of L into the Voronoi cell of the
 * origin. Points on a cell boundary map to the lexicographically smallest
 * of their equidistant representatives.
 */
inline Point2 reduce_to_fundamental(const Point2& p, const HexLattice& L) {
    long i0 = 0, j0 = 0;
    const double best = detail::nearest_vector_sq(L, p.x, p.y, i0, j0);
    const double tie = 1e-12 * L.min_dist() * L.min_dist();
    Point2 rep = p - L.vector(static_cast<double>(i0), static_cast<double>(j0));
    for (long di = -1; di <= 1; ++di) {
        for (long dj = -1; dj <= 1; ++dj) {
            if (di == 0 && dj == 0) continue;
            const Point2 cand = p - L.vector(static_cast<double>(i0 + di), static_cast<double>(j0 + dj));
            if (cand.norm2() <= best + tie && lex_less(cand, rep)) rep = cand;
        }
    }
    return rep;
}

/// True iff p is uncovered by the closed unit disks centered on H + t.
inline bool point_in_interstitium(const Point2& p, const Point2& t) {
    return detail::dist2_to_close_packing(p.x - t.x, p.y - t.y) > (1.0 + kEps) * (1.0 + kEps);
}

struct Circle {
    Point2 center;
    double radius{0.0};

    bool contains(const Point2& p, double tol = 1e-12) const {
        return distance(p, center) <= radius * (1.0 + 1e-14) + tol;
    }
};

namespace detail {

inline Circle circle_from_two(const Point2& a, const Point2& b) {
    const Point2 c = (a + b) * 0.5;
    return {c, std::max(distance(a, c), distance(b, c))};
}

inline Circle circle_from_three(const Point2& a, const Point2& b, const Point2& c) {
    const double bx = b.x - a.x, by = b.y - a.y;
    const double cx = c.x - a.x, cy = c.y - a.y;
    const double den = 2.0 * (bx * cy - by * cx);
    const double scale = std::max({std::abs(bx), std::abs(by), std::abs(cx), std::abs(cy), 1e-300});
    if (std::abs(den) <= 1e-14 * scale * scale) {
        // collinear under rounding: the farthest pair spans the circle
        Circle best = circle_from_two(a, b);
        for (const Circle& k : {circle_from_two(a, c), circle_from_two(b, c)}) {
            if (k.radius > best.radius) best = k;
        }
        return best;
    }
    const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    const Point2 o{a.x + (cy * b2 - by * c2) / den, a.y + (bx * c2 - cx * b2) / den};
    return {o, std::max({distance(o, a), distance(o, b), distance(o, c)})};
}

}  // namespace detail

/**
 * Smallest circle enclosing all points. Iterative Welzl recursion over the
 * input order, so the result is deterministic.
 */
inline Circle min_enclosing_circle(std::span<const Point2> pts) {
    if (pts.empty()) throw std::invalid_argument("min_enclosing_circle: empty point set");
    Circle c{pts[0], 0.0};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (c.contains(pts[i])) continue;
        c = {pts[i], 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (c.contains(pts[j])) continue;
            c = detail::circle_from_two(pts[i], pts[j]);
            for (std::size_t k = 0; k < j; ++k) {
                if (!c.contains(pts[k])) c = detail::circle_from_three(pts[i], pts[j], pts[k]);
            }
        }
    }
    return c;
}

struct AreaEstimate {
    double estimate{0.0};
    double std_error{0.0};
};

/**
 * Monte Carlo estimate of the uncovered area in one cell of the close
 * packing. Only the close-packing lattice is accepted.
 */
inline AreaEstimate interstitium_area_mc(std::uint64_t samples, std::uint64_t seed,
                                         const HexLattice& L = HexLattice::close_packing()) {
    if (samples < 10000) throw std::invalid_argument("interstitium_area_mc: need at least 10^4 samples");
    if (L.min_dist() != 2.0) throw std::invalid_argument("interstitium_area_mc: only the close packing (d = 2) is supported");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uint64_t hits = 0;
    for (std::uint64_t n = 0; n < samples; ++n) {
        const double a = u(rng), b = u(rng);
        const double x = 2.0 * a + b, y = kSqrt3 * b;
        if (detail::dist2_to_close_packing(x, y) > 1.0) ++hits;
    }
    const double f = static_cast<double>(hits) / static_cast<double>(samples);
    return {kFundamentalArea * f, kFundamentalArea * std::sqrt(f * (1.0 - f) / static_cast<double>(samples))};
}

}  // namespace pc2
