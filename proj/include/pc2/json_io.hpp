#pragma once
// JSON interchange for point sets, configurations, translate sets,
// certificates and solver output. Numbers are written in shortest
// round-trip form, so reading a file back gives bit-identical doubles.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "config_builder.hpp"
#include "cover_solver.hpp"
#include "interstitium_lab.hpp"
#include "lemma_verifier.hpp"

namespace pc2::io {

using json = nlohmann::json;

inline json to_json(const Point2& p) { return json::array({p.x, p.y}); }

inline Point2 point_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw std::invalid_argument("expected a point [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(std::span<const Point2> pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back(to_json(p));
    return a;
}

inline PointSet points_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected an array of points");
    PointSet out;
    for (const auto& e : j) out.push_back(point_from_json(e));
    return out;
}

inline json to_json(const Pose& p) { return {{"angle", p.angle}, {"shift", to_json(p.shift)}}; }

inline Pose pose_from_json(const json& j) { return Pose(j.at("angle").get<double>(), point_from_json(j.at("shift"))); }

/// {"d", "pose", "points", "boundary_clearance", "rectangle"}
inline json to_json(const HardConfiguration& c) {
    return {{"d", c.lattice_min_dist},
            {"pose", to_json(c.pose)},
            {"points", to_json(c.points)},
            {"boundary_clearance", c.boundary_clearance},
            {"rectangle", {{"width", c.rect.width}, {"height", c.rect.height}, {"pose", to_json(c.rect.pose)}}}};
}

/// Reads a configuration; the point list is kept as given (not regenerated).
inline HardConfiguration configuration_from_json(const json& j) {
    HardConfiguration c;
    c.lattice_min_dist = j.at("d").get<double>();
    c.pose = pose_from_json(j.at("pose"));
    c.points = points_from_json(j.at("points"));
    if (j.contains("boundary_clearance")) c.boundary_clearance = j["boundary_clearance"].get<double>();
    if (j.contains("rectangle")) {
        const json& r = j["rectangle"];
        c.rect.width = r.at("width").get<double>();
        c.rect.height = r.at("height").get<double>();
        if (r.contains("pose")) c.rect.pose = pose_from_json(r["pose"]);
    }
    return c;
}

/// A bare array, {"points": [...]}, or a configuration object.
inline PointSet any_points_from_json(const json& j) {
    if (j.is_array()) return points_from_json(j);
    return points_from_json(j.at("points"));
}

inline json to_json(const TranslateSet& ts) { return {{"translates", to_json(ts.translates)}}; }

inline TranslateSet translate_set_from_json(const json& j) {
    const PointSet raw = points_from_json(j.is_array() ? j : j.at("translates"));
    return make_translate_set(raw);
}

inline json to_json(const RhombicBox& b) {
    return {{"a", {b.a0, b.a1}}, {"b", {b.b0, b.b1}}, {"depth", b.depth}, {"center", to_json(b.center())}};
}

inline std::string to_string(CoverStatus s) {
    switch (s) {
        case CoverStatus::Covered: return "covered";
        case CoverStatus::NotCovered: return "not_covered";
        case CoverStatus::Undecided: return "undecided";
    }
    return "undecided";
}

inline json to_json(const CoverCertificate& c) {
    json j{{"status", to_string(c.status)}, {"depth", c.depth}, {"margin", c.margin}, {"boxes", c.boxes}};
    j["witness"] = c.witness ? to_json(*c.witness) : json(nullptr);
    json f = json::array();
    for (const auto& b : c.frontier) f.push_back(to_json(b));
    j["frontier"] = f;
    return j;
}

inline json to_json(const HandicapResult& r) {
    if (const auto* w = std::get_if<Coverable>(&r)) {
        return {{"verdict", "coverable"}, {"translate", to_json(w->translate)}};
    }
    const auto& cert = std::get<CoverCertificate>(r);
    const char* verdict = cert.status == CoverStatus::Covered ? "no_translate_covers" : "undecided";
    return {{"verdict", verdict}, {"certificate", to_json(cert)}};
}

// Adds the points, the disks of the translated packing that hold them, and per-point covered flags.
inline json to_json(const HandicapResult& r, std::span<const Point2> points) {
    json j = to_json(r);
    j["points"] = to_json(points);
    PointSet centers;
    json covered = json::array();
    const auto* w = std::get_if<Coverable>(&r);
    for (const Point2& p : points) {
        if (!w) {
            covered.push_back(false);
            continue;
        }
        const Point2 c = nearest_lattice_point(p - w->translate, HexLattice::close_packing()).first + w->translate;
        covered.push_back(distance(p, c) <= 1.0 + kEps);
        if (std::none_of(centers.begin(), centers.end(), [&](const Point2& q) { return distance(q, c) < 1e-9; })) {
            centers.push_back(c);
        }
    }
    j["centers"] = to_json(centers);
    j["covered"] = covered;
    return j;
}

inline json to_json(const TilingReport& r) {
    json j{{"covered", r.covered}, {"cells_checked", r.cells_checked}};
    j["uncovered_witness"] = r.uncovered_witness ? to_json(*r.uncovered_witness) : json(nullptr);
    return j;
}

inline json to_json(const UncoveredEstimate& e) {
    return {{"fraction", e.fraction}, {"std_error", e.std_error}, {"uncovered", e.uncovered}, {"samples", e.samples}};
}

inline json to_json(const SearchResult& r) {
    json j = to_json(r.best);
    j["k"] = r.best.translates.size();
    j["uncovered_estimate"] = to_json(r.estimate);
    j["best_restart"] = r.best_restart;
    j["min_depth"] = r.min_depth;
    j["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
    return j;
}

inline std::string to_string(SolveStatus s) { return s == SolveStatus::Covered ? "covered" : "unknown"; }

inline json to_json(const CoverSolution& s, std::span<const Point2> points) {
    json covered = json::array();
    for (long a : s.assignment) covered.push_back(a >= 0);
    return {{"status", to_string(s.status)},
            {"points", to_json(points)},
            {"centers", to_json(s.centers)},
            {"assignment", s.assignment},
            {"covered", covered},
            {"best_uncovered", s.best_uncovered},
            {"partitions_tried", s.partitions_tried},
            {"cancelled", s.cancelled}};
}

inline PointSet centers_from_json(const json& j) { return points_from_json(j.is_array() ? j : j.at("centers")); }

inline json to_json(const Lemma1Report& r) {
    json fails = json::array();
    for (const auto& f : r.failures) {
        fails.push_back({{"trial", f.trial}, {"reason", f.reason}, {"disks", to_json(f.disks)}});
    }
    return {{"lemma", 1},
            {"trials", r.trials},
            {"arcs_checked", r.arcs_checked},
            {"max_interval", r.max_interval},
            {"max_overlap", r.max_overlap},
            {"failures", fails}};
}

inline json to_json(const Fig3Report& r, const SweepResult& s) {
    json checks = json::array();
    json fails = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"value", c.value}, {"expected", c.expected}, {"ok", c.ok()}});
        if (!c.ok()) fails.push_back(c.name);
    }
    return {{"lemma", 2},
            {"identities", checks},
            {"grid", s.grid},
            {"trials", (s.grid + 1) * (s.grid + 1)},
            {"min_arc", s.min_arc},
            {"argmin", to_json(s.argmin)},
            {"witnesses", to_json(s.minimizers)},
            {"failures", fails}};
}

inline json to_json(const Lemma3Report& r) {
    json j{{"lemma", 3},
           {"d", r.d},
           {"trials", r.trials},
           {"uncontained", r.uncontained},
           {"max_nearest", r.max_nearest},
           {"threshold", r.threshold},
           {"deep_hole", to_json(r.deep_hole)},
           {"deep_hole_distance", r.deep_hole_distance},
           {"deep_hole_contained", r.deep_hole_contained},
           {"passed", r.passed()}};
    j["witness"] = r.witness ? to_json(*r.witness) : json(nullptr);
    return j;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace pc2::io
