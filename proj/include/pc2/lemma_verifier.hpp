#pragma once
/**
 * @file lemma_verifier.hpp
 * @brief Numerical checks of the hole lemmas.
 *
 * - Tangency arcs: a neighbor disk at center distance s < 2(1+r) excludes an
 *   open arc of hole-tangency angles around a base disk. The arcs of a packing
 *   are disjoint and at most π/3 long, so every closed π/3 arc of the base
 *   circle admits a tangent hole.
 * - Rectangle sweep: a unit disk centered anywhere in the quarter square S of
 *   the (2+4r) x (1+3r) rectangle admits a π/3 arc of tangent holes that stay
 *   inside the rectangle.
 * - Hole sampling: a hole anywhere in the plane contains a point of H_d when
 *   d < √3 r.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "parallel.hpp"

namespace pc2 {

/// Half-angle of the tangency arc excluded by a unit disk at center distance s.
inline double excluded_halfangle(double s) {
    if (!(s >= 2.0 - kEps)) throw std::invalid_argument("excluded_halfangle: disks overlap (s < 2)");
    const double reach = 2.0 * (1.0 + kHoleRadius);
    if (s >= reach) return 0.0;
    return std::acos(std::min(1.0, s / reach));
}

struct AngularInterval {
    double start{0.0};  // in [0, 2π)
    double length{0.0};

    double end() const { return start + length; }
    /// True iff angle lies in the open interval (modulo 2π).
    bool contains_open(double a, double tol = 0.0) const {
        const double off = normalize_angle(a - start);
        return off > tol && off < length - tol;
    }
};

/// Excluded open intervals of hole-tangency angles around a base disk.
struct TangencyArcSet {
    Point2 base{};
    std::vector<AngularInterval> excluded;  // sorted by start

    double total_excluded() const {
        double s = 0.0;
        for (const auto& iv : excluded) s += iv.length;
        return s;
    }
};

inline TangencyArcSet build_tangency_arcs(const Point2& base, std::span<const Point2> neighbors) {
    TangencyArcSet set{base, {}};
    for (const Point2& q : neighbors) {
        const Point2 v = q - base;
        const double h = excluded_halfangle(v.norm());
        if (h <= 0.0) continue;
        const double dir = std::atan2(v.y, v.x);
        set.excluded.push_back({normalize_angle(dir - h), 2.0 * h});
    }
    std::sort(set.excluded.begin(), set.excluded.end(),
              [](const AngularInterval& a, const AngularInterval& b) { return a.start < b.start; });
    return set;
}

/// Overlap length of two open arcs on the circle (0 when disjoint).
inline double arc_overlap(const AngularInterval& a, const AngularInterval& b) {
    double total = 0.0;
    for (double shift : {-kTwoPi, 0.0, kTwoPi}) {
        const double lo = std::max(a.start, b.start + shift);
        const double hi = std::min(a.end(), b.end() + shift);
        total += std::max(0.0, hi - lo);
    }
    return total;
}

/// Hole center tangent to the base unit disk at angle phi.
inline Point2 tangent_hole_center(const Point2& base, double phi) {
    return base + unit_vector(phi) * (1.0 + kHoleRadius);
}

/**
 * An allowed tangency angle inside the closed arc [alpha, alpha + π/3]:
 * alpha itself, or the end of the excluded interval containing it.
 */
inline std::optional<double> allowed_angle_in_arc(const TangencyArcSet& set, double alpha, double tol = kEps) {
    double phi = normalize_angle(alpha);
    for (int guard = 0; guard <= static_cast<int>(set.excluded.size()); ++guard) {
        const AngularInterval* hit = nullptr;
        for (const auto& iv : set.excluded) {
            if (iv.contains_open(phi, tol)) {
                hit = &iv;
                break;
            }
        }
        if (!hit) {
            if (normalize_angle(phi - alpha) <= kPi / 3.0 + tol) return phi;
            return std::nullopt;
        }
        phi = normalize_angle(hit->end());
    }
    return std::nullopt;
}

struct PackingWitness {
    std::uint64_t trial{0};
    std::string reason;
    PointSet disks;  // the neighbor centers; the base disk is at the origin
};

struct Lemma1Report {
    std::uint64_t trials{0};
    std::uint64_t arcs_checked{0};
    double max_interval{0.0};   // longest excluded interval seen
    double max_overlap{0.0};    // largest pairwise overlap seen
    std::vector<PackingWitness> failures;
    bool passed() const { return failures.empty(); }
};

struct Lemma1Options {
    std::uint64_t saturation_attempts{10000};
    int arc_rotations{10000};
    double tol{kEps};
};

/**
 * Random sequential adsorption of unit disks around a base disk at the
 * origin: first center distances in [2, 2+2r), then in [2+2r, 4), each
 * phase stopping after `attempts` consecutive rejections.
 */
inline PointSet random_saturated_packing(std::mt19937_64& rng, std::uint64_t attempts) {
    PointSet disks;
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    const double near_hi = 2.0 + 2.0 * kHoleRadius;
    for (auto [lo, hi] : {std::pair{2.0, near_hi}, std::pair{near_hi, 4.0}}) {
        std::uniform_real_distribution<double> u(lo * lo, hi * hi);
        std::uint64_t misses = 0;
        while (misses < attempts) {
            const Point2 c = unit_vector(ang(rng)) * std::sqrt(u(rng));
            const bool ok = std::all_of(disks.begin(), disks.end(),
                                        [&](const Point2& q) { return (c - q).norm2() >= 4.0; });
            if (ok) {
                disks.push_back(c);
                misses = 0;
            } else {
                ++misses;
            }
        }
    }
    return disks;
}

/// Checks one packing; returns a failure reason or nothing.
inline std::optional<std::string> check_lemma1_packing(const PointSet& disks, const Lemma1Options& opt,
                                                       double* max_interval = nullptr,
                                                       double* max_overlap = nullptr) {
    const Point2 base{0.0, 0.0};
    const TangencyArcSet set = build_tangency_arcs(base, disks);
    for (std::size_t i = 0; i < set.excluded.size(); ++i) {
        if (max_interval) *max_interval = std::max(*max_interval, set.excluded[i].length);
        if (set.excluded[i].length > kPi / 3.0 + opt.tol) return "excluded interval longer than pi/3";
        for (std::size_t j = i + 1; j < set.excluded.size(); ++j) {
            const double ov = arc_overlap(set.excluded[i], set.excluded[j]);
            if (max_overlap) *max_overlap = std::max(*max_overlap, ov);
            if (ov > opt.tol) return "excluded intervals overlap";
        }
    }
    if (set.total_excluded() > kTwoPi + opt.tol) return "excluded length exceeds 2pi";
    const double hole_clear = 1.0 + kHoleRadius - opt.tol;
    for (int k = 0; k < opt.arc_rotations; ++k) {
        const double alpha = kTwoPi * k / opt.arc_rotations;
        const auto phi = allowed_angle_in_arc(set, alpha, opt.tol);
        if (!phi) return "closed pi/3 arc without an allowed tangency";
        const Point2 hole = tangent_hole_center(base, *phi);
        for (const Point2& q : disks) {
            if (distance(hole, q) < hole_clear) return "allowed tangency hole overlaps a packed disk";
        }
    }
    return std::nullopt;
}

/// Per-trial seeds derive from (seed, trial) so results do not depend on threading.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::uint64_t out[1];
    seq.generate(reinterpret_cast<std::uint32_t*>(out), reinterpret_cast<std::uint32_t*>(out) + 2);
    return out[0];
}

inline Lemma1Report verify_lemma1(std::uint64_t trials, std::uint64_t seed, const Lemma1Options& opt = {}) {
    if (trials < 1) throw std::invalid_argument("verify_lemma1: trials must be >= 1");
    struct Slot {
        std::optional<std::string> failure;
        PointSet disks;
        double max_interval{0.0}, max_overlap{0.0};
    };
    std::vector<Slot> slots(trials);
    parallel_for(trials, [&](std::size_t t) {
        std::mt19937_64 rng(trial_seed(seed, t));
        Slot& s = slots[t];
        s.disks = random_saturated_packing(rng, opt.saturation_attempts);
        s.failure = check_lemma1_packing(s.disks, opt, &s.max_interval, &s.max_overlap);
        if (!s.failure) s.disks.clear();
    });
    Lemma1Report rep;
    rep.trials = trials;
    for (std::size_t t = 0; t < slots.size(); ++t) {
        rep.arcs_checked += static_cast<std::uint64_t>(opt.arc_rotations);
        rep.max_interval = std::max(rep.max_interval, slots[t].max_interval);
        rep.max_overlap = std::max(rep.max_overlap, slots[t].max_overlap);
        if (slots[t].failure) rep.failures.push_back({t, *slots[t].failure, slots[t].disks});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Rectangle construction

/// Named points of the rectangle construction, E at the origin.
struct Fig3Frame {
    std::map<char, Point2> pts;
    double half_width{1.0 + 2.0 * kHoleRadius};
    double half_height{0.5 * (1.0 + 3.0 * kHoleRadius)};

    const Point2& operator[](char name) const { return pts.at(name); }
};

inline Fig3Frame build_fig3_frame() {
    const double r = kHoleRadius, a = 1.0 + r;
    Fig3Frame f;
    f.pts = {
        {'E', {0.0, 0.0}},    {'F', {a, 0.0}},     {'G', {1.0, a / 2}}, {'H', {1.0, -a / 2}},
        {'I', {-a, 0.0}},     {'J', {-r, a / 2}},  {'K', {-a, a / 2}},  {'L', {0.0, a / 2}},
        {'M', {-a, a}},       {'N', {0.0, a}},
    };
    return f;
}

struct IdentityCheck {
    std::string name;
    double value{0.0};
    double expected{0.0};
    bool ok() const { return std::abs(value - expected) <= 1e-12; }
};

struct Fig3Report {
    std::vector<IdentityCheck> checks;
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.ok(); });
    }
};

inline double angle_at(const Point2& vertex, const Point2& a, const Point2& b) {
    const Point2 u = a - vertex, v = b - vertex;
    return std::atan2(std::abs(u.cross(v)), u.dot(v));
}

inline Fig3Report verify_fig3_construction(const Fig3Frame& f) {
    const double r = kHoleRadius, a = 1.0 + r;
    const double right = f.half_width, top = f.half_height;
    Fig3Report rep;
    auto add = [&](std::string name, double v, double e) { rep.checks.push_back({std::move(name), v, e}); };
    add("F tangent to right side", right - f['F'].x, r);
    add("G tangent to top side", top - f['G'].y, r);
    add("H tangent to bottom side", f['H'].y + top, r);
    add("I tangent to left side", f['I'].x + right, r);
    add("J tangent to top side", top - f['J'].y, r);
    for (char c : {'F', 'G', 'H'}) add(std::string("d(E,") + c + ") = 1+r", distance(f['E'], f[c]), a);
    add("angle GEH = pi/3", angle_at(f['E'], f['G'], f['H']), kPi / 3.0);
    add("d(I,E) = 1+r", distance(f['I'], f['E']), a);
    add("d(E,L) = (1+r)/2", distance(f['E'], f['L']), a / 2);
    add("d(G,H) + 2r = 1+3r", distance(f['G'], f['H']) + 2 * r, 1 + 3 * r);
    add("width = 2+4r", 2 * right, 2 + 4 * r);
    add("|IJ| = 1+r", distance(f['I'], f['J']), a);
    add("|JM| = 1+r", distance(f['J'], f['M']), a);
    add("|IM| = 1+r", distance(f['I'], f['M']), a);
    add("angle IMJ = pi/3", angle_at(f['M'], f['I'], f['J']), kPi / 3.0);
    // S' = IEKL and S'' = KLMN are congruent and tile the square S of side 1+r
    add("|IE| = |KL|", distance(f['I'], f['E']), distance(f['K'], f['L']));
    add("|IK| = |KM|", distance(f['I'], f['K']), distance(f['K'], f['M']));
    add("square side |IM|", distance(f['I'], f['M']), a);
    add("square side |MN|", distance(f['M'], f['N']), a);
    add("square diagonal |IN|", distance(f['I'], f['N']), a * std::sqrt(2.0));
    return rep;
}

// ---------------------------------------------------------------------------
// Sweep over the quarter square

/**
 * Longest closed arc of angles phi for which a hole tangent to a unit disk
 * centered at c (hole center c + (1+r)(cos phi, sin phi)) lies inside the
 * closed rectangle [-hw, hw] x [-hh, hh]. Computed from the exact
 * breakpoints of the four side constraints.
 */
inline double longest_hole_arc(const Point2& c, double hw = 1.0 + 2.0 * kHoleRadius,
                               double hh = 0.5 * (1.0 + 3.0 * kHoleRadius), double tol = kEps) {
    const double R = 1.0 + kHoleRadius;
    const double xlo = -hw + kHoleRadius, xhi = hw - kHoleRadius;
    const double ylo = -hh + kHoleRadius, yhi = hh - kHoleRadius;
    auto inside = [&](double phi) {
        const double x = c.x + R * std::cos(phi), y = c.y + R * std::sin(phi);
        return x >= xlo - tol && x <= xhi + tol && y >= ylo - tol && y <= yhi + tol;
    };
    std::vector<double> cuts{0.0};
    auto add_cos = [&](double v) {  // cos(phi) = v
        if (std::abs(v) <= 1.0) {
            const double a = std::acos(v);
            cuts.push_back(normalize_angle(a));
            cuts.push_back(normalize_angle(-a));
        }
    };
    auto add_sin = [&](double v) {  // sin(phi) = v
        if (std::abs(v) <= 1.0) {
            const double a = std::asin(v);
            cuts.push_back(normalize_angle(a));
            cuts.push_back(normalize_angle(kPi - a));
        }
    };
    add_cos((xlo - c.x) / R);
    add_cos((xhi - c.x) / R);
    add_sin((ylo - c.y) / R);
    add_sin((yhi - c.y) / R);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Each gap between consecutive breakpoints is wholly in or out.
    const std::size_t n = cuts.size();
    std::vector<char> in(n);
    std::vector<double> len(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = cuts[i], hi = (i + 1 < n) ? cuts[i + 1] : cuts[0] + kTwoPi;
        len[i] = hi - lo;
        in[i] = inside(0.5 * (lo + hi)) ? 1 : 0;
    }
    if (std::all_of(in.begin(), in.end(), [](char v) { return v != 0; })) return kTwoPi;
    double best = 0.0;
    for (std::size_t start = 0; start < n; ++start) {
        if (!in[start] || in[(start + n - 1) % n]) continue;
        double run = 0.0;
        for (std::size_t k = 0; k < n && in[(start + k) % n]; ++k) run += len[(start + k) % n];
        best = std::max(best, run);
    }
    return best;
}

struct SweepResult {
    double min_arc{0.0};
    Point2 argmin{};
    std::vector<Point2> minimizers;  // grid centers within kEps of the minimum
    int grid{0};
};

/// Minimum over a grid x grid lattice of centers in S = [-(1+r), 0] x [0, 1+r].
inline SweepResult sweep_lemma2(int grid) {
    if (grid < 100) throw std::invalid_argument("sweep_lemma2: grid must be >= 100");
    const double a = 1.0 + kHoleRadius;
    const int n = grid + 1;
    std::vector<double> arcs(static_cast<std::size_t>(n) * n);
    auto center = [&](int i, int j) { return Point2{-a + a * i / grid, a * j / grid}; };
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        for (int j = 0; j < n; ++j) arcs[i * n + j] = longest_hole_arc(center(static_cast<int>(i), j));
    });
    SweepResult res;
    res.grid = grid;
    res.min_arc = *std::min_element(arcs.begin(), arcs.end());
    bool first = true;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (arcs[static_cast<std::size_t>(i) * n + j] <= res.min_arc + kEps) {
                res.minimizers.push_back(center(i, j));
                if (first) res.argmin = center(i, j);
                first = false;
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Hole sampling by H_d

struct Lemma3Report {
    double d{0.0};
    std::uint64_t trials{0};
    std::uint64_t uncontained{0};      // sampled holes with no lattice point
    double max_nearest{0.0};           // largest sampled hole-to-lattice distance
    double threshold{0.0};             // covering radius d/√3
    Point2 deep_hole{};                // barycenter of a lattice triangle
    double deep_hole_distance{0.0};    // its distance to the lattice
    bool deep_hole_contained{false};   // distance <= r (closed hole)
    std::optional<Point2> witness;     // sampled counterexample, if any
    /// Every hole contains a lattice point (no counterexample anywhere).
    bool passed() const { return uncontained == 0 && deep_hole_contained; }
};

inline Lemma3Report verify_lemma3(std::uint64_t trials, double d, std::uint64_t seed) {
    if (!(d > 0.0)) throw std::invalid_argument("verify_lemma3: d must be positive");
    const HexLattice L(d);
    Lemma3Report rep;
    rep.d = d;
    rep.trials = trials;
    rep.threshold = L.covering_radius();
    rep.deep_hole = L.deep_holes()[0];
    rep.deep_hole_distance = distance_to_lattice(rep.deep_hole, L);
    rep.deep_hole_contained = rep.deep_hole_distance <= kHoleRadius + 1e-12;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::uint64_t t = 0; t < trials; ++t) {
        const Point2 c = L.vector(u(rng), u(rng));
        const double dist = distance_to_lattice(c, L);
        rep.max_nearest = std::max(rep.max_nearest, dist);
        if (dist > kHoleRadius + 1e-12) {
            ++rep.uncontained;
            if (!rep.witness) rep.witness = c;
        }
    }
    return rep;
}

}  // namespace pc2
