#pragma once
/**
 * @file cover_solver.hpp
 * @brief Player two: search for a packing of unit disks covering a point set.
 *
 * The search is one-sided. A Covered answer always carries a packing that
 * passes verify_cover; Unknown never certifies that no cover exists.
 *
 * Method: enumerate maximal clusters (point subsets fitting in one unit
 * disk), branch over partitions of the points into cluster subsets with the
 * fewest parts first, and for each partition look for disk centers by
 * alternating two projections: push overlapping centers apart, then project
 * each center onto the intersection of unit disks about its cluster.
 */

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "interstitium_lab.hpp"
#include "parallel.hpp"

namespace pc2 {

using Mask = std::uint64_t;

struct Cluster {
    Mask members{0};
    Point2 mec_center{};
    double mec_radius{0.0};

    std::size_t size() const { return static_cast<std::size_t>(std::popcount(members)); }
    bool contains(std::size_t i) const { return (members >> i) & 1U; }
};

inline PointSet select(std::span<const Point2> pts, Mask m) {
    PointSet out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if ((m >> i) & 1U) out.push_back(pts[i]);
    }
    return out;
}

/**
 * All subsets that fit in one closed unit disk and are maximal by inclusion.
 * Every such subset is the set of points within distance 1 of a center that
 * is either a point itself or a crossing of two unit circles about points.
 */
inline std::vector<Cluster> enumerate_clusters(std::span<const Point2> pts) {
    if (pts.size() > 64) throw std::invalid_argument("enumerate_clusters: at most 64 points supported");
    const std::size_t n = pts.size();
    const double reach = 1.0 + kEps;
    auto gather = [&](const Point2& c) {
        Mask m = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (distance(pts[k], c) <= reach) m |= Mask{1} << k;
        }
        return m;
    };
    std::vector<Mask> masks;
    for (std::size_t i = 0; i < n; ++i) {
        masks.push_back(gather(pts[i]));
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point2 d = pts[j] - pts[i];
            const double len = d.norm();
            if (len > 2.0 + kEps || len == 0.0) continue;
            const Point2 mid = (pts[i] + pts[j]) * 0.5;
            const double h = std::sqrt(std::max(0.0, 1.0 - 0.25 * len * len));
            const Point2 perp = Point2{-d.y, d.x} / len;
            masks.push_back(gather(mid + perp * h));
            masks.push_back(gather(mid - perp * h));
        }
    }
    std::sort(masks.begin(), masks.end());
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    // drop masks strictly contained in another
    std::sort(masks.begin(), masks.end(), [](Mask a, Mask b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa > pb : a < b;
    });
    std::vector<Cluster> out;
    for (Mask m : masks) {
        const bool sub = std::any_of(out.begin(), out.end(), [&](const Cluster& c) { return (m & ~c.members) == 0; });
        if (sub) continue;
        const PointSet members = select(pts, m);
        const Circle mec = min_enclosing_circle(members);
        if (mec.radius > reach) continue;
        out.push_back({m, mec.center, mec.radius});
    }
    std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) { return a.members < b.members; });
    return out;
}

// ---------------------------------------------------------------------------
// Cover verification

struct CoverCheck {
    bool valid{false};
    std::vector<char> covered;       // per point
    std::size_t uncovered{0};
    bool packing{true};              // centers pairwise >= 2 - tol apart
};

inline CoverCheck check_cover(std::span<const Point2> points, std::span<const Point2> centers, double tol = kEps) {
    CoverCheck c;
    c.covered.assign(points.size(), 0);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        for (std::size_t j = i + 1; j < centers.size(); ++j) {
            if (distance(centers[i], centers[j]) < 2.0 - tol) c.packing = false;
        }
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        c.covered[k] = std::any_of(centers.begin(), centers.end(),
                                   [&](const Point2& q) { return distance(points[k], q) <= 1.0 + tol; });
        if (!c.covered[k]) ++c.uncovered;
    }
    c.valid = c.packing && c.uncovered == 0;
    return c;
}

/// Every point within 1 + 1e-9 of a center, all centers >= 2 - 1e-9 apart.
inline bool verify_cover(std::span<const Point2> points, std::span<const Point2> centers) {
    return check_cover(points, centers).valid;
}

// ---------------------------------------------------------------------------
// Projection onto an intersection of unit disks

/// Convex hull vertices (Andrew's monotone chain); collinear points dropped.
inline PointSet convex_hull(PointSet pts) {
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;
    PointSet h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && (h[k - 1] - h[k - 2]).cross(pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && (h[k - 1] - h[k - 2]).cross(pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

/**
 * Nearest point to x in the intersection of closed unit disks about `anchors`
 * (the cluster's hull). The nearest point is either x, the projection onto a
 * single disk, or a crossing of two circles. Returns nothing if empty.
 */
inline std::optional<Point2> project_onto_disks(const Point2& x, std::span<const Point2> anchors) {
    const double tol = 1e-12;
    auto feasible = [&](const Point2& c) {
        return std::all_of(anchors.begin(), anchors.end(),
                           [&](const Point2& p) { return (c - p).norm2() <= (1.0 + tol) * (1.0 + tol); });
    };
    if (feasible(x)) return x;
    std::optional<Point2> best;
    double best_d = INFINITY;
    auto consider = [&](const Point2& c) {
        const double d = (c - x).norm2();
        if (d < best_d && feasible(c)) {
            best = c;
            best_d = d;
        }
    };
    for (const Point2& p : anchors) {
        const Point2 v = x - p;
        const double len = v.norm();
        if (len > 1.0) consider(p + v / len);
    }
    if (best) {
        // a single-disk projection that is feasible is optimal
        return best;
    }
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        for (std::size_t j = i + 1; j < anchors.size(); ++j) {
            const Point2 d = anchors[j] - anchors[i];
            const double len = d.norm();
            if (len > 2.0 || len == 0.0) continue;
            const Point2 mid = (anchors[i] + anchors[j]) * 0.5;
            const double h = std::sqrt(std::max(0.0, 1.0 - 0.25 * len * len));
            const Point2 perp = Point2{-d.y, d.x} / len;
            consider(mid + perp * h);
            consider(mid - perp * h);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Continuous feasibility for one partition

struct FeasibilityOptions {
    int restarts{32};
    int iterations{500};
    double jitter{0.5};
    int stall_window{60};  // stop a restart when violation stops shrinking
};

struct FeasibilityResult {
    bool success{false};
    PointSet centers;      // last or successful centers, one per cluster
    double violation{0.0};  // max pairwise overlap 2 - |ci - cj| of the result
};

namespace detail {

inline double max_overlap(std::span<const Point2> c) {
    double v = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = i + 1; j < c.size(); ++j) v = std::max(v, 2.0 - distance(c[i], c[j]));
    }
    return v;
}

}  // namespace detail

/**
 * Seeks centers c_i with every point of cluster i within 1 of c_i and all
 * centers pairwise >= 2 apart. Restart 0 starts from the MEC centers; later
 * restarts jitter them.
 */
inline FeasibilityResult continuous_feasibility(std::span<const Point2> points, std::span<const Cluster> partition,
                                                const FeasibilityOptions& opt, std::uint64_t seed,
                                                const std::atomic<bool>* cancel = nullptr) {
    const std::size_t k = partition.size();
    std::vector<PointSet> anchors(k);
    for (std::size_t i = 0; i < k; ++i) {
        anchors[i] = convex_hull(select(points, partition[i].members));
        if (partition[i].mec_radius > 1.0 + kEps) throw std::invalid_argument("continuous_feasibility: cluster does not fit in a unit disk");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    FeasibilityResult best;
    best.violation = INFINITY;
    PointSet c(k);
    for (int rs = 0; rs < std::max(1, opt.restarts); ++rs) {
        if (cancel && cancel->load(std::memory_order_relaxed)) break;
        for (std::size_t i = 0; i < k; ++i) {
            Point2 start = partition[i].mec_center;
            if (rs > 0) start += Point2{gauss(rng), gauss(rng)} * opt.jitter;
            c[i] = project_onto_disks(start, anchors[i]).value_or(partition[i].mec_center);
        }
        double viol = detail::max_overlap(c);
        double window_start = viol;
        for (int it = 0; it < opt.iterations && viol > 1e-11; ++it) {
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = i + 1; j < k; ++j) {
                    Point2 d = c[i] - c[j];
                    double len = d.norm();
                    if (len >= 2.0) continue;
                    if (len < 1e-12) {
                        d = unit_vector(ang(rng));
                        len = 1.0;
                        c[j] = c[i];
                    }
                    const Point2 push = d / len * (0.5 * (2.0 - len));
                    c[i] += push;
                    c[j] -= push;
                }
            }
            for (std::size_t i = 0; i < k; ++i) {
                c[i] = project_onto_disks(c[i], anchors[i]).value_or(partition[i].mec_center);
            }
            viol = detail::max_overlap(c);
            if ((it + 1) % opt.stall_window == 0) {
                if (viol > 0.95 * window_start) break;
                window_start = viol;
            }
        }
        if (viol < best.violation) {
            best.violation = viol;
            best.centers = c;
        }
        if (viol <= 1e-11) {
            best.success = true;
            break;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Solver

struct SolveBudget {
    std::size_t partitions{1000};
    int restarts{32};
    int iterations{500};

    SolveBudget scaled(double f) const {
        return {static_cast<std::size_t>(static_cast<double>(partitions) * f), restarts, iterations};
    }
};

struct SolveOptions {
    SolveBudget budget{};
    std::uint64_t seed{0};
    bool try_lattice_translate{false};    // first try translates of the close packing
    std::optional<PointSet> seed_centers;  // tried before any search
    std::size_t node_limit_factor{200};   // partition-tree nodes per budgeted partition
    const std::atomic<bool>* cancel{nullptr};
};

enum class SolveStatus { Covered, Unknown };

struct CoverSolution {
    SolveStatus status{SolveStatus::Unknown};
    PointSet centers;                 // a packing (verified); covers all points iff Covered
    std::vector<long> assignment;     // point -> center index, -1 if uncovered
    std::size_t best_uncovered{0};    // uncovered points of the best packing found
    std::size_t partitions_tried{0};
    bool cancelled{false};
};

namespace detail {

// Assigns each point to a covering center and drops unused centers.
inline CoverSolution finalize(std::span<const Point2> points, PointSet centers) {
    CoverSolution s;
    std::vector<long> assign(points.size(), -1);
    std::vector<char> used(centers.size(), 0);
    for (std::size_t k = 0; k < points.size(); ++k) {
        double best = INFINITY;
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double d = distance(points[k], centers[i]);
            if (d <= 1.0 + kEps && d < best) {
                best = d;
                assign[k] = static_cast<long>(i);
            }
        }
        if (assign[k] >= 0) used[static_cast<std::size_t>(assign[k])] = 1;
    }
    std::vector<long> remap(centers.size(), -1);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (used[i]) {
            remap[i] = static_cast<long>(s.centers.size());
            s.centers.push_back(centers[i]);
        }
    }
    s.assignment.resize(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
        s.assignment[k] = assign[k] >= 0 ? remap[static_cast<std::size_t>(assign[k])] : -1;
        if (s.assignment[k] < 0) ++s.best_uncovered;
    }
    s.status = s.best_uncovered == 0 && check_cover(points, s.centers).packing ? SolveStatus::Covered
                                                                                 : SolveStatus::Unknown;
    return s;
}

// Turns arbitrary centers into a packing by dropping disks involved in
// overlaps, most conflicts first (ties: fewer exclusively covered points).
inline PointSet repair_packing(std::span<const Point2> points, PointSet centers) {
    for (;;) {
        const std::size_t k = centers.size();
        std::vector<int> conflicts(k, 0);
        bool any = false;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                if (distance(centers[i], centers[j]) < 2.0 - kEps) {
                    ++conflicts[i];
                    ++conflicts[j];
                    any = true;
                }
            }
        }
        if (!any) return centers;
        std::vector<int> covers(k, 0);
        for (const Point2& p : points) {
            for (std::size_t i = 0; i < k; ++i) {
                if (distance(p, centers[i]) <= 1.0 + kEps) ++covers[i];
            }
        }
        std::size_t worst = 0;
        for (std::size_t i = 1; i < k; ++i) {
            if (conflicts[i] > conflicts[worst] || (conflicts[i] == conflicts[worst] && covers[i] < covers[worst])) worst = i;
        }
        centers.erase(centers.begin() + static_cast<long>(worst));
    }
}

inline PointSet close_packing_centers_near(std::span<const Point2> points, const Point2& t) {
    PointSet centers;
    for (const Point2& p : points) {
        const auto [q, dist] = nearest_lattice_point(p, HexLattice(2.0, Pose(0.0, t)));
        if (dist <= 1.0 + kEps && std::none_of(centers.begin(), centers.end(), [&](const Point2& c) { return distance(c, q) < 1e-9; })) {
            centers.push_back(q);
        }
    }
    return centers;
}

// Enumerates partitions into cluster subsets, fewest parts first.
class PartitionEnumerator {
public:
    PartitionEnumerator(std::span<const Point2> pts, std::vector<Cluster> clusters, std::size_t max_partitions,
                        std::size_t node_limit, const std::atomic<bool>* cancel = nullptr)
        : pts_(pts), clusters_(std::move(clusters)), max_(max_partitions), node_limit_(node_limit), cancel_(cancel) {
        for (const auto& c : clusters_) max_size_ = std::max(max_size_, c.size());
        max_size_ = std::max<std::size_t>(max_size_, 1);
    }

    std::vector<std::vector<Mask>> run() {
        const Mask all = pts_.size() == 64 ? ~Mask{0} : ((Mask{1} << pts_.size()) - 1);
        if (pts_.empty()) return {{}};
        for (std::size_t k = lower_bound(all); k <= pts_.size() && !halted(); ++k) {
            target_ = k;
            current_.clear();
            dfs(all);
        }
        return std::move(out_);
    }

private:
    std::size_t lower_bound(Mask rem) const {
        const std::size_t n = static_cast<std::size_t>(std::popcount(rem));
        return (n + max_size_ - 1) / max_size_;
    }

    bool halted() const {
        return out_.size() >= max_ || nodes_ >= node_limit_ || (cancel_ && cancel_->load(std::memory_order_relaxed));
    }

    void dfs(Mask rem) {
        if (halted()) return;
        ++nodes_;
        if (rem == 0) {
            if (current_.size() == target_) out_.push_back(current_);
            return;
        }
        if (current_.size() + lower_bound(rem) > target_) return;
        const std::size_t i = static_cast<std::size_t>(std::countr_zero(rem));
        std::vector<Mask> parts;
        for (const auto& c : clusters_) {
            if (c.contains(i)) parts.push_back(c.members & rem);
        }
        parts.push_back(Mask{1} << i);
        std::sort(parts.begin(), parts.end(), [](Mask a, Mask b) {
            const int pa = std::popcount(a), pb = std::popcount(b);
            return pa != pb ? pa > pb : a < b;
        });
        parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
        for (Mask part : parts) {
            current_.push_back(part);
            dfs(rem & ~part);
            current_.pop_back();
            if (halted()) return;
        }
    }

    std::span<const Point2> pts_;
    std::vector<Cluster> clusters_;
    std::size_t max_;
    std::size_t node_limit_;
    const std::atomic<bool>* cancel_;
    std::size_t max_size_{1};
    std::size_t target_{0};
    std::size_t nodes_{0};
    std::vector<Mask> current_;
    std::vector<std::vector<Mask>> out_;
};

}  // namespace detail

/// Partitions the solver will try, in order.
inline std::vector<std::vector<Mask>> enumerate_partitions(std::span<const Point2> points, std::size_t max_partitions,
                                                           std::size_t node_limit,
                                                           const std::atomic<bool>* cancel = nullptr) {
    return detail::PartitionEnumerator(points, enumerate_clusters(points), max_partitions, node_limit, cancel).run();
}

inline CoverSolution solve_cover(std::span<const Point2> points, const SolveOptions& opt = {}) {
    if (points.empty()) {
        CoverSolution s;
        s.status = SolveStatus::Covered;
        return s;
    }
    if (points.size() > 64) throw std::invalid_argument("solve_cover: at most 64 points supported");
    CoverSolution best;
    best.best_uncovered = points.size() + 1;
    auto consider = [&](CoverSolution s) {
        if (s.best_uncovered < best.best_uncovered) best = std::move(s);
    };

    if (opt.seed_centers) {
        CoverSolution s = detail::finalize(points, detail::repair_packing(points, *opt.seed_centers));
        if (s.status == SolveStatus::Covered) return s;
        consider(std::move(s));
    }
    if (opt.try_lattice_translate) {
        const HandicapResult h = handicap_oracle(points, 16, 1e-6);
        if (const auto* w = std::get_if<Coverable>(&h)) {
            CoverSolution s = detail::finalize(points, detail::close_packing_centers_near(points, w->translate));
            if (s.status == SolveStatus::Covered) return s;
            consider(std::move(s));
        }
    }

    const std::vector<std::vector<Mask>> partitions =
        enumerate_partitions(points, opt.budget.partitions, opt.budget.partitions * opt.node_limit_factor, opt.cancel);
    FeasibilityOptions fo;
    fo.restarts = opt.budget.restarts;
    fo.iterations = opt.budget.iterations;
    const std::size_t batch = std::max<unsigned>(1, max_threads());
    for (std::size_t start = 0; start < partitions.size(); start += batch) {
        if (opt.cancel && opt.cancel->load()) {
            best.cancelled = true;
            break;
        }
        const std::size_t end = std::min(partitions.size(), start + batch);
        std::vector<FeasibilityResult> results(end - start);
        parallel_for(results.size(), [&](std::size_t b) {
            const auto& masks = partitions[start + b];
            std::vector<Cluster> parts;
            for (Mask m : masks) {
                const Circle mec = min_enclosing_circle(select(points, m));
                parts.push_back({m, mec.center, mec.radius});
            }
            results[b] = continuous_feasibility(points, parts, fo, opt.seed * 1000003ULL + start + b, opt.cancel);
        });
        best.partitions_tried = end;
        for (std::size_t b = 0; b < results.size(); ++b) {
            if (results[b].success) {
                CoverSolution s = detail::finalize(points, results[b].centers);
                if (s.status == SolveStatus::Covered) {
                    s.partitions_tried = end;
                    return s;
                }
            }
            consider(detail::finalize(points, detail::repair_packing(points, results[b].centers)));
        }
    }
    const std::size_t tried = best.partitions_tried;
    best.partitions_tried = tried;
    if (best.best_uncovered > points.size()) {
        best = detail::finalize(points, {});
        best.partitions_tried = tried;
    }
    best.status = SolveStatus::Unknown;
    if (opt.cancel && opt.cancel->load()) best.cancelled = true;
    return best;
}

struct RemovalOutcome {
    std::size_t removed{0};  // index of the removed point
    SolveStatus status{SolveStatus::Unknown};
    std::size_t best_uncovered{0};
};

/// Solves the configuration with each point removed in turn.
inline std::vector<RemovalOutcome> removability_probe(std::span<const Point2> points, const SolveOptions& opt = {}) {
    std::vector<RemovalOutcome> out;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (opt.cancel && opt.cancel->load()) break;
        PointSet rest;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i != k) rest.push_back(points[i]);
        }
        const CoverSolution s = solve_cover(rest, opt);
        out.push_back({k, s.status, s.best_uncovered});
    }
    return out;
}

}  // namespace pc2
