#pragma once
// Builds the uncoverable point configuration: lattice points of a fine
// hexagonal lattice H_d lying strictly inside a (2+4r) x (1+3r) rectangle,
// with the lattice pose chosen to minimize the number of points.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "geometry.hpp"
#include "parallel.hpp"

namespace pc2 {

/// Rectangle centered at its pose origin, long side along the local x axis.
struct HardRectangle {
    double width{2.0 + 4.0 * kHoleRadius};
    double height{1.0 + 3.0 * kHoleRadius};
    Pose pose{};

    double half_width() const { return 0.5 * width; }
    double half_height() const { return 0.5 * height; }
};

struct HardConfiguration {
    PointSet points;  // rectangle frame (rectangle centered at the origin)
    double lattice_min_dist{kCriticalSpacing};
    Pose pose{};  // lattice pose in the rectangle frame
    double boundary_clearance{0.0};
    HardRectangle rect{};

    /// Points in world coordinates (rectangle pose applied).
    PointSet world_points() const {
        PointSet out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(rect.pose.apply(p));
        return out;
    }
};

struct PoseScore {
    std::size_t count{0};
    double clearance{0.0};
};

namespace detail {

// Distance of a point to the rectangle boundary, for points on either side.
inline double boundary_distance(double x, double y, double hw, double hh) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax < hw && ay < hh) return std::min(hw - ax, hh - ay);
    const double ox = std::max(ax - hw, 0.0), oy = std::max(ay - hh, 0.0);
    return std::hypot(ox, oy);
}

// Visits every lattice point within `reach` of the origin.
template <class F>
void for_each_lattice_point_near_origin(const HexLattice& L, double reach, F&& fn) {
    const auto [a0, b0] = L.fractional(-L.pose().shift);
    const double span = reach / (0.5 * kSqrt3 * L.min_dist()) + 2.0;
    const long i_lo = static_cast<long>(std::floor(a0 - span)), i_hi = static_cast<long>(std::ceil(a0 + span));
    const long j_lo = static_cast<long>(std::floor(b0 - span)), j_hi = static_cast<long>(std::ceil(b0 + span));
    const Point2 b1 = L.basis1(), b2 = L.basis2(), s = L.pose().shift;
    const double reach2 = reach * reach;
    for (long j = j_lo; j <= j_hi; ++j) {
        const double rx = s.x + static_cast<double>(j) * b2.x;
        const double ry = s.y + static_cast<double>(j) * b2.y;
        for (long i = i_lo; i <= i_hi; ++i) {
            const double x = rx + static_cast<double>(i) * b1.x;
            const double y = ry + static_cast<double>(i) * b1.y;
            if (x * x + y * y <= reach2) fn(x, y);
        }
    }
}

inline double scan_reach(const HardRectangle& R, double d) {
    return std::hypot(R.half_width(), R.half_height()) + 2.0 * d;
}

}  // namespace detail

/// Number of lattice points strictly inside the rectangle, and the clearance.
inline PoseScore score_pose(double d, const Pose& pose, const HardRectangle& R = {}) {
    const HexLattice L(d, pose);
    const double hw = R.half_width(), hh = R.half_height();
    PoseScore s{0, std::numeric_limits<double>::infinity()};
    detail::for_each_lattice_point_near_origin(L, detail::scan_reach(R, d), [&](double x, double y) {
        if (std::abs(x) < hw && std::abs(y) < hh) ++s.count;
        s.clearance = std::min(s.clearance, detail::boundary_distance(x, y, hw, hh));
    });
    return s;
}

/**
 * All lattice points of H_d (posed in the rectangle frame) strictly inside
 * the rectangle. The clearance is the smallest distance from any lattice
 * point, inside or outside, to the rectangle boundary.
 */
inline HardConfiguration generate_configuration(double d, const Pose& pose, const HardRectangle& R = {}) {
    if (!(d > 0.0)) throw std::invalid_argument("generate_configuration: d must be positive");
    HardConfiguration cfg;
    cfg.lattice_min_dist = d;
    cfg.pose = pose;
    cfg.rect = R;
    const HexLattice L(d, pose);
    const double hw = R.half_width(), hh = R.half_height();
    double clearance = std::numeric_limits<double>::infinity();
    detail::for_each_lattice_point_near_origin(L, detail::scan_reach(R, d), [&](double x, double y) {
        if (std::abs(x) < hw && std::abs(y) < hh) cfg.points.emplace_back(x, y);
        clearance = std::min(clearance, detail::boundary_distance(x, y, hw, hh));
    });
    std::sort(cfg.points.begin(), cfg.points.end(), lex_less);
    cfg.boundary_clearance = clearance;
    return cfg;
}

struct PoseSearchOptions {
    int angle_steps{720};
    int shift_steps{64};
    bool refine{true};
};

struct PoseSearchResult {
    Pose pose;
    std::size_t count{0};
    double clearance{0.0};
};

namespace detail {

// Fewer points first, then larger clearance, then the lexicographically
// smaller pose.
inline bool better_pose(const PoseSearchResult& a, const PoseSearchResult& b) {
    if (a.count != b.count) return a.count < b.count;
    if (a.clearance != b.clearance) return a.clearance > b.clearance;
    return pose_less(a.pose, b.pose);
}

inline Pose grid_pose(double d, int ia, int iu, int iv, const PoseSearchOptions& opt) {
    const double angle = (kPi / 3.0) * ia / opt.angle_steps;
    const HexLattice L(d, Pose(angle, {}));
    const double u = static_cast<double>(iu) / opt.shift_steps;
    const double v = static_cast<double>(iv) / opt.shift_steps;
    return Pose(angle, L.vector(u, v));
}

}  // namespace detail

/**
 * Grid search over rotation in [0, π/3) and translation over one lattice
 * cell, followed by coordinate-descent refinement of the best grid pose.
 */
inline PoseSearchResult optimize_pose(double d, const PoseSearchOptions& opt = {}, const HardRectangle& R = {}) {
    if (!(d > 0.0) || d > kCriticalSpacing * (1.0 + 1e-12)) {
        throw std::invalid_argument("optimize_pose: need 0 < d <= sqrt(3) r");
    }
    std::vector<PoseSearchResult> per_angle(static_cast<std::size_t>(opt.angle_steps));
    parallel_for(per_angle.size(), [&](std::size_t ia) {
        std::optional<PoseSearchResult> best;
        for (int iu = 0; iu < opt.shift_steps; ++iu) {
            for (int iv = 0; iv < opt.shift_steps; ++iv) {
                const Pose p = detail::grid_pose(d, static_cast<int>(ia), iu, iv, opt);
                const PoseScore s = score_pose(d, p, R);
                PoseSearchResult cand{p, s.count, s.clearance};
                if (!best || detail::better_pose(cand, *best)) best = cand;
            }
        }
        per_angle[ia] = *best;
    });
    PoseSearchResult best = per_angle.front();
    for (const auto& c : per_angle) {
        if (detail::better_pose(c, best)) best = c;
    }
    if (!opt.refine) return best;

    const double cell = d / opt.shift_steps;
    double step_a = (kPi / 3.0) / opt.angle_steps;
    double step_s = cell;
    while (step_a > 1e-12 || step_s > 1e-12) {
        bool improved = false;
        for (int axis = 0; axis < 3; ++axis) {
            for (int sign : {-1, 1}) {
                Pose p = best.pose;
                if (axis == 0) p = Pose(p.angle + sign * step_a, p.shift);
                if (axis == 1) p = Pose(p.angle, {p.shift.x + sign * step_s, p.shift.y});
                if (axis == 2) p = Pose(p.angle, {p.shift.x, p.shift.y + sign * step_s});
                const PoseScore s = score_pose(d, p, R);
                PoseSearchResult cand{p, s.count, s.clearance};
                if (cand.count < best.count || (cand.count == best.count && cand.clearance > best.clearance)) {
                    best = cand;
                    improved = true;
                }
            }
        }
        if (!improved) {
            step_a *= 0.5;
            step_s *= 0.5;
        }
    }
    return best;
}

/// True iff no lattice point lies within kEps of the rectangle boundary.
inline bool verify_compressibility(const HardConfiguration& cfg) { return cfg.boundary_clearance > kEps; }

/// Rebuilds the configuration with the lattice scaled by `factor` about the
/// rectangle center.
inline HardConfiguration compress(const HardConfiguration& cfg, double factor) {
    return generate_configuration(cfg.lattice_min_dist * factor, Pose(cfg.pose.angle, cfg.pose.shift * factor),
                                  cfg.rect);
}

struct RowSeparation {
    double above{0.0};       // lowest lattice y above the top edge
    double below{0.0};       // highest lattice y below the bottom edge
    double separation{0.0};  // above - below
};

/**
 * Vertical separation of the lattice points just outside the long edges,
 * taken over lattice points whose x lies within the rectangle's horizontal
 * extent.
 */
inline RowSeparation outside_row_separation(const HardConfiguration& cfg) {
    const HexLattice L(cfg.lattice_min_dist, cfg.pose);
    const double hw = cfg.rect.half_width(), hh = cfg.rect.half_height();
    RowSeparation r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
    detail::for_each_lattice_point_near_origin(L, detail::scan_reach(cfg.rect, cfg.lattice_min_dist),
                                               [&](double x, double y) {
                                                   if (std::abs(x) >= hw) return;
                                                   if (y >= hh) r.above = std::min(r.above, y);
                                                   if (y <= -hh) r.below = std::max(r.below, y);
                                               });
    r.separation = r.above - r.below;
    return r;
}

}  // namespace pc2
