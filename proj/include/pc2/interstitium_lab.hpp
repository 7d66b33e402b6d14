#pragma once
/**
 * @file interstitium_lab.hpp
 * @brief Lower-bound machinery on the fundamental domain U = R²/H.
 *
 * The interstitium I(t) is the part of U left uncovered by the close packing
 * translated by t. A point p is uncovered by H + t exactly when
 * dist(p - t, H) > 1, so "translate t misses p" and "p lies in I(t)" are the
 * same relation; both certifiers below decide whether a family of such open
 * regions covers U.
 *
 * Two certifiers:
 * - certify_translate_cover: quadtree subdivision of the rhombic cell with a
 *   positive margin. Cannot terminate across exactly tangent boundaries.
 * - certify_triangle_tiling: exact test, in Q(√3), that the equilateral
 *   triangles inscribed in the interstitia tile U. This is sufficient for
 *   the interstitia themselves to cover U.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "exact.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace pc2 {

// ---------------------------------------------------------------------------
// Area bound

struct LowerBound {
    double ratio{0.0};
    long bound{0};
};

/// |U| / |I| and its ceiling.
inline LowerBound lower_bound_from_areas(double fundamental_area, double interstitium_area) {
    if (!(interstitium_area > 0.0)) throw std::invalid_argument("lower_bound_from_areas: area must be positive");
    const double ratio = fundamental_area / interstitium_area;
    return {ratio, static_cast<long>(std::ceil(ratio - 1e-12))};
}

inline LowerBound compute_lower_bound() { return lower_bound_from_areas(kFundamentalArea, kInterstitiumArea); }

// ---------------------------------------------------------------------------
// Translate sets

struct TranslateSet {
    std::vector<Point2> translates;  // reduced to the Voronoi cell of H, no duplicates
};

/// Reduces every member to U and drops duplicates (within 1e-12).
inline TranslateSet make_translate_set(std::span<const Point2> raw) {
    const HexLattice H = HexLattice::close_packing();
    TranslateSet ts;
    for (const Point2& t : raw) {
        const Point2 u = reduce_to_fundamental(t, H);
        const bool dup = std::any_of(ts.translates.begin(), ts.translates.end(), [&](const Point2& o) {
            return distance_to_close_packing(o - u) <= 1e-12;
        });
        if (!dup) ts.translates.push_back(u);
    }
    return ts;
}

/// The n² coset representatives of H/n, reduced to U.
inline TranslateSet lattice_translate_set(int n) {
    if (n < 1) throw std::invalid_argument("lattice_translate_set: n must be >= 1");
    const HexLattice H = HexLattice::close_packing();
    std::vector<Point2> raw;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) raw.push_back(H.vector(static_cast<double>(i) / n, static_cast<double>(j) / n));
    }
    return make_translate_set(raw);
}

// ---------------------------------------------------------------------------
// Inscribed triangles

inline constexpr double kTriangleSide = 4.0 - 2.0 * kSqrt3;

struct InscribedTriangle {
    std::array<Point2, 3> vertices;
    Point2 centroid;
    bool pointing_up{true};  // true for the triangle about the (1, 1/√3) deep hole

    double side() const { return distance(vertices[0], vertices[1]); }
};

/**
 * Equilateral triangles of inradius r about the two deep holes of H + t,
 * each edge tangent to one of the three unit disks around that deep hole.
 */
inline std::array<InscribedTriangle, 2> inscribed_triangles(const Point2& t) {
    const HexLattice H = HexLattice::close_packing();
    const std::array<Point2, 2> holes = H.deep_holes();
    const std::array<std::array<Point2, 3>, 2> corners{{
        {H.vector(0, 0), H.vector(1, 0), H.vector(0, 1)},
        {H.vector(1, 0), H.vector(0, 1), H.vector(1, 1)},
    }};
    std::array<InscribedTriangle, 2> out;
    for (int k = 0; k < 2; ++k) {
        const Point2 g = holes[k] + t;
        out[k].centroid = g;
        out[k].pointing_up = (k == 0);
        for (int v = 0; v < 3; ++v) {
            const Point2 toward = (corners[k][v] + t) - g;
            out[k].vertices[v] = g - toward / toward.norm() * (2.0 * kHoleRadius);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact triangle tiling

namespace detail {

using exact::QSqrt3;
using exact::Rational;

// Exact fractional coordinates of a translate, snapping to a nearby rational
// with small denominator when one exists (lattice sets round-trip exactly).
inline Rational snap_rational(double v) {
    for (int den = 1; den <= 240; ++den) {
        const double num = std::round(v * den);
        if (std::abs(v * den - num) <= 1e-9 * den) return Rational(static_cast<long long>(num), den);
    }
    return Rational(v);
}

// Half-plane triangle in coordinates u_k = n_k·x, with n1 = (0, 1),
// n2 = (-√3/2, -1/2), n3 = (√3/2, -1/2). Up triangles are {u_k <= c_k},
// down triangles {u_k >= c_k}. The image of H is √3·Z² in (u1, u2).
struct ExactTriangle {
    std::array<QSqrt3, 3> c;
    bool up{true};
};

inline QSqrt3 wrap(const QSqrt3& v, const QSqrt3& lo, const QSqrt3& period) {
    // representative of v in [lo, lo + period)
    const std::int64_t k = exact::floor_div(v - lo, period);
    return v - QSqrt3(k) * period;
}

inline bool triangle_contains(const ExactTriangle& T, const QSqrt3& w1, const QSqrt3& w2) {
    const QSqrt3 P = QSqrt3::sqrt3();
    if (T.up) {
        const QSqrt3 a = wrap(w1, T.c[0] - P, P);  // a in [c1 - √3, c1)
        const QSqrt3 b = wrap(w2, T.c[1] - P, P);
        // the closed constraint u <= c admits the representative a + √3 when it equals c
        const QSqrt3 a2 = (a + P == T.c[0]) ? a + P : a;
        const QSqrt3 b2 = (b + P == T.c[1]) ? b + P : b;
        for (const QSqrt3& x : {a, a2}) {
            for (const QSqrt3& y : {b, b2}) {
                if (-(x + y) <= T.c[2]) return true;
            }
        }
        return false;
    }
    const QSqrt3 a = wrap(w1, T.c[0], P);  // a in [c1, c1 + √3)
    const QSqrt3 b = wrap(w2, T.c[1], P);
    return -(a + b) >= T.c[2];
}

}  // namespace detail

struct TilingReport {
    bool covered{false};
    std::size_t cells_checked{0};
    std::optional<Point2> uncovered_witness;  // a point of U inside no triangle
};

/**
 * Decides exactly whether the inscribed triangles of all translates cover U.
 * Translates are converted to exact fractional lattice coordinates.
 */
inline TilingReport certify_triangle_tiling_report(const TranslateSet& ts) {
    using detail::ExactTriangle;
    using detail::QSqrt3;
    using detail::Rational;
    const HexLattice H = HexLattice::close_packing();
    const QSqrt3 P = QSqrt3::sqrt3();
    const Rational third(1, 3);
    const QSqrt3 r = QSqrt3(Rational(-1), Rational(2, 3));  // 2/√3 - 1
    // u-coordinates of the two deep holes relative to the translate
    const std::array<QSqrt3, 3> up_hole{QSqrt3(0, third), QSqrt3(0, Rational(-2, 3)), QSqrt3(0, third)};
    const std::array<QSqrt3, 3> down_hole{QSqrt3(0, Rational(2, 3)), QSqrt3(0, Rational(-4, 3)),
                                          QSqrt3(0, Rational(2, 3))};

    std::vector<ExactTriangle> tris;
    for (const Point2& t : ts.translates) {
        const auto [fa, fb] = H.fractional(t);
        const Rational a = detail::snap_rational(fa), b = detail::snap_rational(fb);
        // t = a·(2,0) + b·(1,√3): u1 = b√3, u2 = -(a+b)√3, u3 = a√3
        const std::array<QSqrt3, 3> ut{QSqrt3(0, b), QSqrt3(0, -(a + b)), QSqrt3(0, a)};
        ExactTriangle up{{ut[0] + up_hole[0] + r, ut[1] + up_hole[1] + r, ut[2] + up_hole[2] + r}, true};
        ExactTriangle dn{{ut[0] + down_hole[0] - r, ut[1] + down_hole[1] - r, ut[2] + down_hole[2] - r}, false};
        tris.push_back(up);
        tris.push_back(dn);
    }

    TilingReport rep;
    auto to_point = [](const QSqrt3& w1, const QSqrt3& w2) {
        // invert u1 = y, u2 = -(√3/2)x - y/2
        const double y = w1.to_double();
        const double x = -(2.0 * w2.to_double() + y) / kSqrt3;
        return reduce_to_fundamental(Point2{x, y}, HexLattice::close_packing());
    };
    if (tris.empty()) {
        rep.uncovered_witness = Point2{0.0, 0.0};
        return rep;
    }

    auto breakpoints = [&](int k, bool negate) {
        std::vector<QSqrt3> v;
        for (const auto& T : tris) v.push_back(detail::wrap(negate ? -T.c[k] : T.c[k], QSqrt3(0), P));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    const std::vector<QSqrt3> b1 = breakpoints(0, false);
    const std::vector<QSqrt3> b2 = breakpoints(1, false);
    const std::vector<QSqrt3> b3 = breakpoints(2, true);  // lines w1 + w2 = -c3

    // floating prefilter per triangle; the exact test runs only near edges
    std::vector<std::array<double, 3>> approx;
    for (const auto& T : tris) approx.push_back({T.c[0].to_double(), T.c[1].to_double(), T.c[2].to_double()});
    auto contains = [&](const QSqrt3& w1, const QSqrt3& w2) {
        const double x1 = w1.to_double(), x2 = w2.to_double();
        constexpr double p = kSqrt3, tol = 1e-9;
        for (std::size_t k = 0; k < tris.size(); ++k) {
            const auto& T = tris[k];
            const auto& c = approx[k];
            // offsets of the wrapped coordinates from the constraint lines, in [0, p)
            double da, db, m3;
            if (T.up) {
                da = c[0] - x1 - std::floor((c[0] - x1) / p) * p;
                db = c[1] - x2 - std::floor((c[1] - x2) / p) * p;
                m3 = c[2] + (c[0] - da) + (c[1] - db);
            } else {
                da = x1 - c[0] - std::floor((x1 - c[0]) / p) * p;
                db = x2 - c[1] - std::floor((x2 - c[1]) / p) * p;
                m3 = -(c[0] + da) - (c[1] + db) - c[2];
            }
            const bool robust = std::abs(m3) > tol && da > tol && da < p - tol && db > tol && db < p - tol;
            if (robust) {
                if (m3 > 0.0) return true;
                continue;
            }
            if (detail::triangle_contains(T, w1, w2)) return true;
        }
        return false;
    };

    const Rational half(1, 2);
    for (std::size_t i = 0; i < b1.size(); ++i) {
        const QSqrt3 lo1 = b1[i];
        const QSqrt3 hi1 = (i + 1 < b1.size()) ? b1[i + 1] : b1[0] + P;
        for (std::size_t j = 0; j < b2.size(); ++j) {
            const QSqrt3 lo2 = b2[j];
            const QSqrt3 hi2 = (j + 1 < b2.size()) ? b2[j + 1] : b2[0] + P;
            const QSqrt3 smin = lo1 + lo2, smax = hi1 + hi2;
            std::vector<QSqrt3> cuts{smin};
            for (const QSqrt3& s0 : b3) {
                // all lines w1 + w2 = s0 + k√3 strictly between smin and smax
                std::int64_t k = exact::floor_div(smin - s0, P) + 1;
                for (QSqrt3 s = s0 + QSqrt3(k) * P; s < smax; s += P) {
                    if (s > smin) cuts.push_back(s);
                }
            }
            cuts.push_back(smax);
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                const QSqrt3 sm = (cuts[c] + cuts[c + 1]) * QSqrt3(half);
                const QSqrt3 lo = std::max(lo1, sm - hi2), hi = std::min(hi1, sm - lo2);
                const QSqrt3 w1 = (lo + hi) * QSqrt3(half);
                const QSqrt3 w2 = sm - w1;
                ++rep.cells_checked;
                if (!contains(w1, w2)) {
                    rep.uncovered_witness = to_point(w1, w2);
                    return rep;
                }
            }
        }
    }
    rep.covered = true;
    return rep;
}

inline bool certify_triangle_tiling(const TranslateSet& ts) { return certify_triangle_tiling_report(ts).covered; }

// ---------------------------------------------------------------------------
// Box subdivision over the rhombic cell

/// Box [a0, a1] x [b0, b1] in fractional coordinates of H.
struct RhombicBox {
    double a0{0.0}, a1{1.0}, b0{0.0}, b1{1.0};
    int depth{0};

    Point2 center() const {
        const double a = 0.5 * (a0 + a1), b = 0.5 * (b0 + b1);
        return {2.0 * a + b, kSqrt3 * b};
    }
    double circumradius() const {
        const double da = 0.5 * (a1 - a0), db = 0.5 * (b1 - b0);
        const double l1 = std::hypot(2.0 * da + db, kSqrt3 * db);
        const double l2 = std::hypot(2.0 * da - db, kSqrt3 * db);
        return std::max(l1, l2);
    }
    bool degenerate() const { return a0 == a1 && b0 == b1; }
};

enum class CoverStatus { Covered, NotCovered, Undecided };

struct CoverCertificate {
    CoverStatus status{CoverStatus::Undecided};
    int depth{0};                      // deepest subdivision level reached
    double margin{0.0};
    std::uint64_t boxes{0};            // boxes examined
    std::optional<RhombicBox> witness;  // NotCovered: outside every region
    std::vector<RhombicBox> frontier;  // Undecided: boxes left at the depth cap (truncated)
};

struct SubdivisionOptions {
    int max_depth{24};
    double margin{1e-6};
    std::uint64_t max_boxes{50'000'000};
    std::size_t max_frontier{1000};
};

/**
 * Decides whether the open regions {x : dist(x - s, H) > 1}, s in `sites`,
 * cover U. A box is accepted when one region contains it with clearance
 * >= margin; it is a witness when its center, or the whole box, lies in no
 * region.
 */
inline CoverCertificate subdivide_cover(std::span<const Point2> sites, const SubdivisionOptions& opt) {
    CoverCertificate cert;
    cert.status = CoverStatus::Covered;
    cert.margin = opt.margin;
    if (sites.empty()) {
        cert.status = CoverStatus::NotCovered;
        cert.witness = RhombicBox{};
        return cert;
    }
    const double accept = 1.0 + opt.margin;
    struct Item {
        RhombicBox box;
        std::size_t hint;
    };
    std::vector<Item> stack{{RhombicBox{}, 0}};
    const std::size_t n = sites.size();
    while (!stack.empty()) {
        const Item it = stack.back();
        stack.pop_back();
        ++cert.boxes;
        cert.depth = std::max(cert.depth, it.box.depth);
        const Point2 c = it.box.center();
        const double rho = it.box.circumradius();
        bool inside = false;
        bool center_free = true;
        bool box_free = true;
        std::size_t hit = it.hint;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t s = (it.hint + k) % n;
            const double delta = std::sqrt(detail::dist2_to_close_packing(c.x - sites[s].x, c.y - sites[s].y));
            if (delta - rho >= accept) {
                inside = true;
                hit = s;
                break;
            }
            if (delta > 1.0) center_free = false;
            if (delta + rho > 1.0) box_free = false;
        }
        if (inside) continue;
        if (box_free || center_free) {
            cert.status = CoverStatus::NotCovered;
            if (box_free) {
                cert.witness = it.box;
            } else {
                const double a = 0.5 * (it.box.a0 + it.box.a1), b = 0.5 * (it.box.b0 + it.box.b1);
                cert.witness = RhombicBox{a, a, b, b, it.box.depth};
            }
            cert.frontier.clear();
            return cert;
        }
        if (it.box.depth >= opt.max_depth || cert.boxes >= opt.max_boxes) {
            if (cert.frontier.size() < opt.max_frontier) cert.frontier.push_back(it.box);
            cert.status = CoverStatus::Undecided;
            continue;
        }
        const double am = 0.5 * (it.box.a0 + it.box.a1), bm = 0.5 * (it.box.b0 + it.box.b1);
        const int d = it.box.depth + 1;
        stack.push_back({{it.box.a0, am, it.box.b0, bm, d}, hit});
        stack.push_back({{am, it.box.a1, it.box.b0, bm, d}, hit});
        stack.push_back({{it.box.a0, am, bm, it.box.b1, d}, hit});
        stack.push_back({{am, it.box.a1, bm, it.box.b1, d}, hit});
    }
    return cert;
}

/// Certifies that the interstitia I(t), t in ts, cover U.
inline CoverCertificate certify_translate_cover(const TranslateSet& ts, double margin = 1e-6, int depth = 24) {
    if (!(margin > 0.0)) throw std::invalid_argument("certify_translate_cover: margin must be positive");
    SubdivisionOptions opt;
    opt.margin = margin;
    opt.max_depth = depth;
    return subdivide_cover(ts.translates, opt);
}

// ---------------------------------------------------------------------------
// Handicap game: player 2 may only translate the close packing.

/// Every point lies within distance 1 of H + t.
inline bool translate_covers_all(std::span<const Point2> points, const Point2& t) {
    return std::all_of(points.begin(), points.end(),
                       [&](const Point2& p) { return detail::dist2_to_close_packing(p.x - t.x, p.y - t.y) <= 1.0; });
}

struct Coverable {
    Point2 translate;
};

using HandicapResult = std::variant<Coverable, CoverCertificate>;

/**
 * Decides whether some translate of the close packing covers every point.
 * Returns a verified witness translate, or a certificate: Covered means the
 * exclusion regions cover U, so no translate works.
 */
inline HandicapResult handicap_oracle(std::span<const Point2> points, int depth = 24, double margin = 1e-6) {
    if (points.empty()) throw std::invalid_argument("handicap_oracle: empty point set");
    SubdivisionOptions opt;
    opt.max_depth = depth;
    opt.margin = margin;
    CoverCertificate cert = subdivide_cover(points, opt);
    if (cert.status == CoverStatus::NotCovered && cert.witness) {
        const RhombicBox& w = *cert.witness;
        // try the box center, then its corners, for a translate covering every point
        std::vector<Point2> candidates{w.center()};
        for (double a : {w.a0, w.a1}) {
            for (double b : {w.b0, w.b1}) candidates.push_back({2.0 * a + b, kSqrt3 * b});
        }
        for (const Point2& t : candidates) {
            if (translate_covers_all(points, t)) return Coverable{reduce_to_fundamental(t, HexLattice::close_packing())};
        }
        cert.status = CoverStatus::Undecided;
    }
    return cert;
}

/// Dense grid scan of translates: returns a covering translate if the grid has one.
inline std::optional<Point2> handicap_grid_scan(std::span<const Point2> points, int resolution) {
    const std::size_t n = points.size();
    std::vector<std::optional<Point2>> found(static_cast<std::size_t>(resolution));
    parallel_for(found.size(), [&](std::size_t i) {
        std::size_t last = 0;
        const double a = (static_cast<double>(i) + 0.5) / resolution;
        for (int j = 0; j < resolution; ++j) {
            const double b = (j + 0.5) / resolution;
            const double tx = 2.0 * a + b, ty = kSqrt3 * b;
            bool missed = false;
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t s = (last + k) % n;
                if (detail::dist2_to_close_packing(points[s].x - tx, points[s].y - ty) > 1.0) {
                    last = s;
                    missed = true;
                    break;
                }
            }
            if (!missed) {
                found[i] = Point2{tx, ty};
                return;
            }
        }
    });
    for (const auto& f : found) {
        if (f) return f;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Monte Carlo uncovered area and translate-cover search

/// One uniform sample in each cell of a res x res grid over the rhombic cell.
inline std::vector<Point2> stratified_samples(int res, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point2> out;
    out.reserve(static_cast<std::size_t>(res) * res);
    for (int i = 0; i < res; ++i) {
        for (int j = 0; j < res; ++j) {
            const double a = (i + u(rng)) / res, b = (j + u(rng)) / res;
            out.push_back({2.0 * a + b, kSqrt3 * b});
        }
    }
    return out;
}

struct UncoveredEstimate {
    double fraction{0.0};   // uncovered fraction of U
    double std_error{0.0};  // binomial standard error
    std::size_t uncovered{0};
    std::size_t samples{0};
};

/// Fraction of U outside every interstitium I(t), t in ts.
inline UncoveredEstimate estimate_uncovered(const TranslateSet& ts, int res = 512, std::uint64_t seed = 0) {
    const std::vector<Point2> samples = stratified_samples(res, seed);
    UncoveredEstimate e;
    e.samples = samples.size();
    for (const Point2& x : samples) {
        const bool covered = std::any_of(ts.translates.begin(), ts.translates.end(), [&](const Point2& t) {
            return detail::dist2_to_close_packing(x.x - t.x, x.y - t.y) > 1.0;
        });
        if (!covered) ++e.uncovered;
    }
    const double f = static_cast<double>(e.uncovered) / static_cast<double>(e.samples);
    e.fraction = f;
    e.std_error = std::sqrt(std::max(f * (1.0 - f), 1.0 / e.samples) / static_cast<double>(e.samples));
    return e;
}

struct SearchOptions {
    std::uint64_t budget{20000};  // proposed moves per restart
    int restarts{1};
    int resolution{512};
    double sigma_start{0.2};
    double sigma_end{0.001};
    double temp_start{2e-3};
    double temp_end{1e-6};
    double teleport_prob{0.05};
    std::optional<TranslateSet> initial;  // seeds restart 0 when set
    double certify_margin{1e-6};
    int certify_depth{24};
    int polish_iterations{200};  // margin ascent after annealing; 0 disables
    int polish_resolution{256};
};

struct SearchResult {
    TranslateSet best;
    UncoveredEstimate estimate;
    std::optional<CoverCertificate> certificate;  // present when the estimate reached zero
    int best_restart{0};
    double min_depth{0.0};  // smallest coverage depth over the polishing samples
};

namespace detail {

struct AnnealState {
    std::vector<Point2> translates;
    std::vector<std::vector<char>> member;  // member[i][s]: sample s lies in I(t_i)
    std::vector<std::uint16_t> count;
    std::size_t uncovered{0};
};

inline void membership(const std::vector<Point2>& samples, const Point2& t, std::vector<char>& out) {
    out.resize(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
        out[s] = detail::dist2_to_close_packing(samples[s].x - t.x, samples[s].y - t.y) > 1.0 ? 1 : 0;
    }
}

/// How far x lies inside the union of the interstitia I(t); negative when uncovered.
inline double coverage_depth(const Point2& x, std::span<const Point2> translates) {
    double best = -INFINITY;
    for (const Point2& t : translates) best = std::max(best, std::sqrt(dist2_to_close_packing(x.x - t.x, x.y - t.y)));
    return best - 1.0;
}

inline double min_coverage_depth(std::span<const Point2> translates, const std::vector<Point2>& samples) {
    double m = INFINITY;
    for (const Point2& x : samples) m = std::min(m, coverage_depth(x, translates));
    return m;
}

/**
 * Gradient ascent (Adam) on a soft minimum of the coverage depth over the
 * samples. Returns the iterate with the largest true minimum.
 */
inline std::vector<Point2> polish_translates(std::vector<Point2> t, const std::vector<Point2>& samples,
                                             int iterations, double& min_depth) {
    constexpr double tau = 2e-3;
    double lr = 2e-3;
    const std::size_t k = t.size();
    std::vector<double> depth(samples.size());
    std::vector<std::size_t> owner(samples.size());
    std::vector<Point2> dir(samples.size());
    std::vector<Point2> m1(k), grad(k);
    std::vector<std::array<double, 2>> m2(k, {0.0, 0.0});
    std::vector<Point2> best = t;
    min_depth = -INFINITY;
    for (int it = 0; it <= iterations; ++it) {
        double lo = INFINITY;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            double bd = -INFINITY;
            for (std::size_t i = 0; i < k; ++i) {
                const Point2 o = offset_to_close_packing(samples[s].x - t[i].x, samples[s].y - t[i].y);
                const double d = o.norm();
                if (d > bd) {
                    bd = d;
                    owner[s] = i;
                    dir[s] = d > 0.0 ? o / d : Point2{};
                }
            }
            depth[s] = bd - 1.0;
            lo = std::min(lo, depth[s]);
        }
        if (lo > min_depth) {
            min_depth = lo;
            best = t;
        }
        if (it == iterations) break;
        std::fill(grad.begin(), grad.end(), Point2{});
        double z = 0.0;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const double w = std::exp(-(depth[s] - lo) / tau);
            z += w;
            grad[owner[s]] += dir[s] * w;
        }
        for (std::size_t i = 0; i < k; ++i) {
            const Point2 g = grad[i] / z;
            m1[i] = m1[i] * 0.9 + g * 0.1;
            m2[i][0] = 0.999 * m2[i][0] + 0.001 * g.x * g.x;
            m2[i][1] = 0.999 * m2[i][1] + 0.001 * g.y * g.y;
            t[i] -= Point2{m1[i].x / (std::sqrt(m2[i][0]) + 1e-12), m1[i].y / (std::sqrt(m2[i][1]) + 1e-12)} * lr;
        }
        lr *= 0.995;
    }
    return best;
}

inline SearchResult anneal_once(int k, const SearchOptions& opt, std::uint64_t seed,
                                const std::vector<Point2>& samples, const std::optional<TranslateSet>& init) {
    const HexLattice H = HexLattice::close_packing();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, k - 1);

    AnnealState st;
    for (int i = 0; i < k; ++i) {
        if (init && i < static_cast<int>(init->translates.size())) {
            st.translates.push_back(init->translates[static_cast<std::size_t>(i)]);
        } else {
            st.translates.push_back(H.vector(u01(rng), u01(rng)));
        }
    }
    st.member.resize(static_cast<std::size_t>(k));
    st.count.assign(samples.size(), 0);
    for (int i = 0; i < k; ++i) {
        membership(samples, st.translates[static_cast<std::size_t>(i)], st.member[static_cast<std::size_t>(i)]);
        for (std::size_t s = 0; s < samples.size(); ++s) st.count[s] += st.member[static_cast<std::size_t>(i)][s];
    }
    st.uncovered = static_cast<std::size_t>(std::count(st.count.begin(), st.count.end(), 0));

    std::vector<Point2> best = st.translates;
    std::size_t best_unc = st.uncovered;
    std::vector<char> fresh;
    const double n = static_cast<double>(samples.size());
    const std::array<Point2, 2> holes = H.deep_holes();
    for (std::uint64_t step = 0; step < opt.budget && best_unc > 0; ++step) {
        const double frac = opt.budget > 1 ? static_cast<double>(step) / static_cast<double>(opt.budget - 1) : 1.0;
        const double sigma = opt.sigma_start * std::pow(opt.sigma_end / opt.sigma_start, frac);
        const double temp = opt.temp_start * std::pow(opt.temp_end / opt.temp_start, frac);
        const auto i = static_cast<std::size_t>(pick(rng));
        Point2 cand;
        if (st.uncovered > 0 && u01(rng) < opt.teleport_prob) {
            // move the translate so one of its deep holes sits on an uncovered sample
            std::uniform_int_distribution<std::size_t> which(0, st.uncovered - 1);
            std::size_t target = which(rng), s = 0;
            for (; s < samples.size(); ++s) {
                if (st.count[s] == 0 && target-- == 0) break;
            }
            cand = samples[s] - holes[u01(rng) < 0.5 ? 0 : 1];
        } else {
            cand = st.translates[i] + Point2{gauss(rng), gauss(rng)} * sigma;
        }
        cand = reduce_to_fundamental(cand, H);
        membership(samples, cand, fresh);
        long delta = 0;
        const std::vector<char>& old = st.member[i];
        for (std::size_t s = 0; s < samples.size(); ++s) {
            if (old[s] == fresh[s]) continue;
            const int c = st.count[s];
            if (old[s] && c == 1) ++delta;
            if (fresh[s] && c == 0) --delta;
        }
        const double dE = static_cast<double>(delta) / n;
        if (delta <= 0 || u01(rng) < std::exp(-dE / temp)) {
            for (std::size_t s = 0; s < samples.size(); ++s) {
                st.count[s] = static_cast<std::uint16_t>(st.count[s] - old[s] + fresh[s]);
            }
            st.member[i].swap(fresh);
            st.translates[i] = cand;
            st.uncovered = static_cast<std::size_t>(static_cast<long>(st.uncovered) + delta);
            if (st.uncovered < best_unc) {
                best_unc = st.uncovered;
                best = st.translates;
            }
        }
    }
    SearchResult res;
    res.best = make_translate_set(best);
    return res;
}

}  // namespace detail

/**
 * Simulated annealing over k translate positions, minimizing the sampled
 * uncovered fraction of U, then margin ascent on the result. A zero
 * estimate is handed to the box certifier.
 */
inline SearchResult search_translate_cover(int k, std::uint64_t seed, const SearchOptions& opt = {}) {
    if (k < 1) throw std::invalid_argument("search_translate_cover: k must be >= 1");
    const std::vector<Point2> samples = stratified_samples(opt.resolution, seed);
    const std::vector<Point2> polish_samples =
        opt.polish_iterations > 0 ? stratified_samples(opt.polish_resolution, seed + 1) : std::vector<Point2>{};
    std::vector<SearchResult> runs(static_cast<std::size_t>(std::max(1, opt.restarts)));
    parallel_for(runs.size(), [&](std::size_t r) {
        const auto init = (r == 0) ? opt.initial : std::nullopt;
        runs[r] = detail::anneal_once(k, opt, seed * 7919 + r + 1, samples, init);
        if (opt.polish_iterations > 0) {
            double depth = 0.0;
            const auto polished =
                detail::polish_translates(runs[r].best.translates, polish_samples, opt.polish_iterations, depth);
            runs[r].best = make_translate_set(polished);
            runs[r].min_depth = detail::min_coverage_depth(runs[r].best.translates, polish_samples);
        } else {
            runs[r].min_depth = detail::min_coverage_depth(runs[r].best.translates, samples);
        }
        runs[r].estimate = estimate_uncovered(runs[r].best, opt.resolution, seed);
        runs[r].best_restart = static_cast<int>(r);
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        const auto& a = runs[r].estimate;
        const auto& b = runs[best].estimate;
        if (a.uncovered < b.uncovered || (a.uncovered == b.uncovered && runs[r].min_depth > runs[best].min_depth)) {
            best = r;
        }
    }
    SearchResult res = std::move(runs[best]);
    if (res.estimate.uncovered == 0) {
        res.certificate = certify_translate_cover(res.best, opt.certify_margin, opt.certify_depth);
    }
    return res;
}

}  // namespace pc2
