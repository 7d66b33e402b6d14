#include <gtest/gtest.h>

#include <random>
#include <set>

#include "pc2/config_builder.hpp"
#include "pc2/cover_solver.hpp"

using namespace pc2;

namespace {

PointSet random_points(std::mt19937_64& rng, int n, double box) {
    std::uniform_real_distribution<double> u(0.0, box);
    PointSet p;
    for (int i = 0; i < n; ++i) p.emplace_back(u(rng), u(rng));
    return p;
}

// Maximal subsets with MEC radius <= 1, by exhaustive subset enumeration.
std::set<Mask> brute_clusters(const PointSet& pts) {
    const std::size_t n = pts.size();
    std::vector<Mask> ok;
    for (Mask m = 1; m < (Mask{1} << n); ++m) {
        if (min_enclosing_circle(select(pts, m)).radius <= 1.0 + kEps) ok.push_back(m);
    }
    std::set<Mask> out;
    for (Mask m : ok) {
        const bool sub = std::any_of(ok.begin(), ok.end(), [&](Mask o) { return o != m && (m & ~o) == 0; });
        if (!sub) out.insert(m);
    }
    return out;
}

// Samples of the boundary and vertices of the intersection of unit disks about `pts`.
PointSet sample_feasible_region(const PointSet& pts, int per_circle) {
    PointSet out;
    auto feasible = [&](const Point2& c) {
        return std::all_of(pts.begin(), pts.end(), [&](const Point2& p) { return distance(c, p) <= 1.0 + 1e-12; });
    };
    for (const auto& p : pts) {
        for (int k = 0; k < per_circle; ++k) {
            const Point2 c = p + unit_vector(kTwoPi * k / per_circle);
            if (feasible(c)) out.push_back(c);
        }
    }
    out.push_back(min_enclosing_circle(pts).center);
    return out;
}

PointSet fifty_five() {
    return generate_configuration(kCriticalSpacing, Pose(kPi / 6, {0.0, 0.066987})).points;
}

}  // namespace

TEST(Clusters, Examples) {
    const PointSet far{{0, 0}, {2.5, 0}};
    const auto c1 = enumerate_clusters(far);
    ASSERT_EQ(c1.size(), 2u);
    EXPECT_EQ(c1[0].size(), 1u);
    EXPECT_EQ(c1[1].size(), 1u);

    const PointSet touching{{0, 0}, {2, 0}};
    const auto c2 = enumerate_clusters(touching);
    ASSERT_EQ(c2.size(), 1u);
    EXPECT_EQ(c2[0].members, 3u);
    EXPECT_NEAR(c2[0].mec_radius, 1.0, 1e-15);

    const PointSet tri{{0, 0}, {2, 0}, {1, kSqrt3}};
    const auto c3 = enumerate_clusters(tri);
    ASSERT_EQ(c3.size(), 3u);
    for (const auto& c : c3) EXPECT_EQ(c.size(), 2u);

    EXPECT_THROW(enumerate_clusters(PointSet(65, Point2{0, 0})), std::invalid_argument);
}

TEST(Clusters, MatchExhaustiveEnumeration) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
        const PointSet pts = random_points(rng, 2 + t % 9, 2.0 + (t % 4));
        std::set<Mask> got;
        for (const auto& c : enumerate_clusters(pts)) {
            got.insert(c.members);
            EXPECT_LE(c.mec_radius, 1.0 + kEps);
        }
        EXPECT_EQ(got, brute_clusters(pts)) << "trial " << t;
    }
}

TEST(Partitions, EveryPointExactlyOnce) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 50; ++t) {
        const PointSet pts = random_points(rng, 4 + t % 8, 3.0);
        const auto clusters = enumerate_clusters(pts);
        const auto parts = enumerate_partitions(pts, 200, 100000);
        ASSERT_FALSE(parts.empty());
        const Mask all = (Mask{1} << pts.size()) - 1;
        std::size_t prev = 0;
        for (const auto& partition : parts) {
            Mask seen = 0;
            for (Mask m : partition) {
                EXPECT_NE(m, 0u);
                EXPECT_EQ(seen & m, 0u);
                seen |= m;
                const bool inside = std::any_of(clusters.begin(), clusters.end(),
                                                [&](const Cluster& c) { return (m & ~c.members) == 0; });
                EXPECT_TRUE(inside);
            }
            EXPECT_EQ(seen, all);
            EXPECT_GE(partition.size(), prev);  // fewest parts first
            prev = partition.size();
        }
    }
}

TEST(Projection, NearestFeasiblePoint) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 300; ++t) {
        PointSet pts = random_points(rng, 1 + t % 5, 1.2);
        if (min_enclosing_circle(pts).radius > 1.0) continue;
        const PointSet hull = convex_hull(pts);
        const Point2 x{u(rng), u(rng)};
        const auto proj = project_onto_disks(x, hull);
        ASSERT_TRUE(proj.has_value());
        for (const auto& p : pts) EXPECT_LE(distance(*proj, p), 1.0 + 1e-9);
        // no sampled feasible point is closer
        for (const auto& c : sample_feasible_region(pts, 720)) EXPECT_GE(distance(c, x), distance(*proj, x) - 1e-9);
    }
}

TEST(Projection, EmptyIntersection) {
    const PointSet pts{{0, 0}, {3, 0}};
    EXPECT_FALSE(project_onto_disks({1.5, 0.0}, pts).has_value());
}

TEST(ConvexHull, DropsInteriorAndCollinear) {
    const PointSet pts{{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {1, 1}};
    const PointSet h = convex_hull(pts);
    EXPECT_EQ(h.size(), 4u);
}

TEST(Feasibility, FarSingletons) {
    const PointSet pts{{0, 0}, {5, 0}};
    const auto clusters = enumerate_clusters(pts);
    const FeasibilityResult r = continuous_feasibility(pts, clusters, {}, 0);
    ASSERT_TRUE(r.success);
    EXPECT_EQ(r.centers[0], clusters[0].mec_center);
    EXPECT_EQ(r.centers[1], clusters[1].mec_center);
}

TEST(Feasibility, UnitDistanceSingletons) {
    const PointSet pts{{0, 0}, {1, 0}};
    const std::vector<Cluster> parts{{1, {0, 0}, 0.0}, {2, {1, 0}, 0.0}};
    const FeasibilityResult r = continuous_feasibility(pts, parts, {}, 0);
    ASSERT_TRUE(r.success);
    EXPECT_GE(distance(r.centers[0], r.centers[1]), 2.0 - 1e-9);
    EXPECT_LE(distance(r.centers[0], pts[0]), 1.0 + 1e-9);
    EXPECT_LE(distance(r.centers[1], pts[1]), 1.0 + 1e-9);
}

TEST(Feasibility, CloseSingletonsStillFeasible) {
    // two singleton clusters are always separable: max center distance is |p - q| + 2
    const PointSet pts{{0, 0}, {0.5, 0}};
    const std::vector<Cluster> parts{{1, {0, 0}, 0.0}, {2, {0.5, 0}, 0.0}};
    const FeasibilityResult r = continuous_feasibility(pts, parts, {}, 0);
    ASSERT_TRUE(r.success);
    EXPECT_TRUE(verify_cover(pts, r.centers));
}

TEST(Feasibility, TwoClusterOracle) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-0.6, 0.6), off(0.0, 3.0), ang(0.0, kTwoPi);
    int decided = 0;
    for (int t = 0; t < 300; ++t) {
        PointSet a, b;
        for (int i = 0; i < 1 + t % 3; ++i) a.emplace_back(u(rng), u(rng));
        const Point2 shift = unit_vector(ang(rng)) * off(rng);
        for (int i = 0; i < 1 + (t / 3) % 3; ++i) b.push_back(Point2{u(rng), u(rng)} + shift);
        if (min_enclosing_circle(a).radius > 1.0 || min_enclosing_circle(b).radius > 1.0) continue;
        PointSet pts = a;
        pts.insert(pts.end(), b.begin(), b.end());
        const Mask ma = (Mask{1} << a.size()) - 1, mb = ((Mask{1} << pts.size()) - 1) & ~ma;
        const Circle ca = min_enclosing_circle(a), cb = min_enclosing_circle(b);
        const std::vector<Cluster> parts{{ma, ca.center, ca.radius}, {mb, cb.center, cb.radius}};
        // oracle: largest distance between the two feasible regions
        double best = 0.0;
        const PointSet sa = sample_feasible_region(a, 1440), sb = sample_feasible_region(b, 1440);
        for (const auto& p : sa) {
            for (const auto& q : sb) best = std::max(best, distance(p, q));
        }
        const FeasibilityResult r = continuous_feasibility(pts, parts, {}, static_cast<std::uint64_t>(t));
        if (best > 2.0 + 1e-3) {
            EXPECT_TRUE(r.success) << "trial " << t << " oracle " << best;
            ++decided;
        } else if (best < 2.0 - 1e-3) {
            EXPECT_FALSE(r.success) << "trial " << t << " oracle " << best;
            ++decided;
        }
        if (r.success) {
            EXPECT_GE(distance(r.centers[0], r.centers[1]), 2.0 - 1e-9);
            for (const auto& p : a) EXPECT_LE(distance(p, r.centers[0]), 1.0 + 1e-9);
            for (const auto& q : b) EXPECT_LE(distance(q, r.centers[1]), 1.0 + 1e-9);
        }
    }
    EXPECT_GT(decided, 100);
}

TEST(VerifyCover, Examples) {
    EXPECT_TRUE(verify_cover(PointSet{{0, 0}}, PointSet{{0, 0}}));
    EXPECT_FALSE(verify_cover(PointSet{{0, 0}}, PointSet{{0, 0}, {1.9, 0}}));
    EXPECT_TRUE(verify_cover(PointSet{{0, 0}}, PointSet{{0, 0}, {2.0, 0}}));
    EXPECT_FALSE(verify_cover(PointSet{{0, 0}, {5, 5}}, PointSet{{0, 0}}));
    EXPECT_TRUE(verify_cover(PointSet{{1, 0}}, PointSet{{0, 0}}));
}

TEST(Solve, SinglePoint) {
    const PointSet p{{0.0, 0.0}};
    const CoverSolution s = solve_cover(p);
    ASSERT_EQ(s.status, SolveStatus::Covered);
    ASSERT_EQ(s.centers.size(), 1u);
    EXPECT_LE(distance(s.centers[0], p[0]), 1.0);
    EXPECT_EQ(s.assignment, std::vector<long>{0});
}

TEST(Solve, EmptyAndOversized) {
    EXPECT_EQ(solve_cover(PointSet{}).status, SolveStatus::Covered);
    EXPECT_THROW(solve_cover(PointSet(65, Point2{0, 0})), std::invalid_argument);
}

TEST(Solve, TenRandomPointsQuality) {
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        std::mt19937_64 rng(seed);
        const PointSet p = random_points(rng, 10, 6.0);
        SolveOptions opt;
        opt.seed = seed;
        const CoverSolution s = solve_cover(p, opt);
        if (s.status == SolveStatus::Covered) {
            ++covered;
            EXPECT_TRUE(verify_cover(p, s.centers));
        }
    }
    EXPECT_GE(covered, 57);
}

TEST(Solve, SoundnessFuzz) {
    std::mt19937_64 rng(16);
    SolveOptions opt;
    opt.budget = {60, 4, 200};
    for (int t = 0; t < 400; ++t) {
        const PointSet p = random_points(rng, 1 + t % 16, 1.0 + (t % 5));
        opt.seed = static_cast<std::uint64_t>(t);
        const CoverSolution s = solve_cover(p, opt);
        const CoverCheck chk = check_cover(p, s.centers);
        EXPECT_TRUE(chk.packing) << "trial " << t;
        ASSERT_EQ(s.assignment.size(), p.size());
        std::size_t unc = 0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (s.assignment[k] < 0) {
                ++unc;
                continue;
            }
            EXPECT_LE(distance(p[k], s.centers[static_cast<std::size_t>(s.assignment[k])]), 1.0 + 1e-9);
        }
        EXPECT_EQ(unc, s.best_uncovered);
        if (s.status == SolveStatus::Covered) EXPECT_TRUE(verify_cover(p, s.centers)) << "trial " << t;
    }
}

TEST(Solve, Deterministic) {
    std::mt19937_64 rng(17);
    const PointSet p = random_points(rng, 14, 3.0);
    SolveOptions opt;
    opt.budget = {100, 8, 200};
    opt.seed = 3;
    set_max_threads(1);
    const CoverSolution a = solve_cover(p, opt);
    set_max_threads(3);
    const CoverSolution b = solve_cover(p, opt);
    set_max_threads(0);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.centers, b.centers);
    EXPECT_EQ(a.assignment, b.assignment);
    EXPECT_EQ(a.best_uncovered, b.best_uncovered);
}

TEST(Solve, HandicapAgreement) {
    std::mt19937_64 rng(18);
    int checked = 0;
    for (int t = 0; t < 100; ++t) {
        const PointSet p = random_points(rng, 3 + t % 12, 3.0);
        const HandicapResult h = handicap_oracle(p, 20, 1e-6);
        const auto* w = std::get_if<Coverable>(&h);
        if (!w) continue;
        ++checked;
        PointSet centers;
        const HexLattice L(2.0, Pose(0.0, w->translate));
        for (const auto& q : p) centers.push_back(nearest_lattice_point(q, L).first);
        SolveOptions opt;
        opt.seed_centers = centers;
        opt.budget = {1, 1, 1};
        const CoverSolution s = solve_cover(p, opt);
        EXPECT_EQ(s.status, SolveStatus::Covered) << "trial " << t;
        EXPECT_TRUE(verify_cover(p, s.centers));
    }
    EXPECT_GT(checked, 20);
}

TEST(Solve, FiftyFiveNeverCovered) {
    const PointSet p = fifty_five();
    ASSERT_EQ(p.size(), 55u);
    SolveOptions opt;
    opt.budget = {200, 8, 200};
    const CoverSolution s = solve_cover(p, opt);
    EXPECT_EQ(s.status, SolveStatus::Unknown);
    EXPECT_GE(s.best_uncovered, 1u);
    EXPECT_TRUE(check_cover(p, s.centers).packing);
}

TEST(Solve, Cancellation) {
    std::atomic<bool> cancel{true};
    SolveOptions opt;
    opt.cancel = &cancel;
    const CoverSolution s = solve_cover(fifty_five(), opt);
    EXPECT_TRUE(s.cancelled);
    EXPECT_EQ(s.status, SolveStatus::Unknown);
}

TEST(Removability, AllButOneIsCovered) {
    const PointSet p{{0, 0}, {0.5, 0}};
    const auto rep = removability_probe(p);
    ASSERT_EQ(rep.size(), 2u);
    for (const auto& o : rep) EXPECT_EQ(o.status, SolveStatus::Covered);
}

TEST(Removability, ReportsEveryPoint) {
    std::mt19937_64 rng(19);
    const PointSet p = random_points(rng, 6, 2.0);
    SolveOptions opt;
    opt.budget = {20, 2, 100};
    const auto rep = removability_probe(p, opt);
    ASSERT_EQ(rep.size(), p.size());
    for (std::size_t k = 0; k < rep.size(); ++k) EXPECT_EQ(rep[k].removed, k);
}
