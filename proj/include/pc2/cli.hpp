#pragma once
// The pc2 command line. Every command prints one JSON document on stdout
// and a short human summary on stderr. Exit codes: 0 success, 1 a check
// failed, 2 usage or input error.

#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "config_builder.hpp"
#include "cover_solver.hpp"
#include "interstitium_lab.hpp"
#include "json_io.hpp"
#include "lemma_verifier.hpp"
#include "parallel.hpp"
#include "svg.hpp"

namespace pc2::cli {

using io::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    unsigned threads{0};
    std::uint64_t seed{0};
    std::string out_path;  // JSON copy
    std::string svg_path;

    // config
    double d_frac{1.0};
    int angle_steps{720};
    int shift_steps{64};
    std::string input;

    // lemma
    int lemma{0};
    std::uint64_t trials{0};
    int grid{200};
    int rotations{10000};
    std::uint64_t attempts{10000};

    // handicap / certifiers
    int depth{24};
    double margin{1e-6};
    int grid_scan{0};

    // cover
    std::size_t partitions{1000};
    int restarts{32};
    int iterations{500};
    double budget_scale{1.0};
    bool lattice_first{false};
    std::string centers;

    // translates
    int n{5};
    int k{23};
    std::uint64_t anneal_budget{20000};
    int polish{200};
    int resolution{512};
    std::string init;

    // render
    std::string kind;
    std::string solution;
};

inline std::uint64_t resolved_trials(const Options& o, std::uint64_t fallback) { return o.trials ? o.trials : fallback; }

inline json load(const std::string& path) {
    if (path.empty()) throw UsageError("missing input file");
    try {
        return io::read_json_file(path);
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
    }
}

inline SolveOptions solve_options(const Options& o) {
    SolveOptions s;
    s.budget = SolveBudget{o.partitions, o.restarts, o.iterations}.scaled(o.budget_scale);
    s.seed = o.seed;
    s.try_lattice_translate = o.lattice_first;
    return s;
}

// ---------------------------------------------------------------------------
// Commands. Each returns the exit code and fills `doc`.

inline int cmd_bound(json& doc, std::ostream& err) {
    const LowerBound b = compute_lower_bound();
    doc = {{"ratio", b.ratio}, {"bound", b.bound}, {"fundamental_area", kFundamentalArea},
           {"interstitium_area", kInterstitiumArea}};
    char line[128];
    std::snprintf(line, sizeof line, "ratio %.10f\nbound %ld\n", b.ratio, b.bound);
    err << line;
    return 0;
}

inline int cmd_config_generate(const Options& o, json& doc, std::ostream& err) {
    const double d = o.d_frac * kCriticalSpacing;
    PoseSearchOptions ps;
    ps.angle_steps = o.angle_steps;
    ps.shift_steps = o.shift_steps;
    const PoseSearchResult best = optimize_pose(d, ps);
    const HardConfiguration cfg = generate_configuration(d, best.pose);
    const RowSeparation sep = outside_row_separation(cfg);
    doc = io::to_json(cfg);
    doc["count"] = cfg.points.size();
    doc["compressible"] = verify_compressibility(cfg);
    doc["row_separation"] = {{"above", sep.above}, {"below", sep.below}, {"separation", sep.separation},
                             {"rectangle_height", cfg.rect.height}};
    doc["search"] = {{"angle_steps", ps.angle_steps}, {"shift_steps", ps.shift_steps}};
    if (!o.svg_path.empty()) io::write_text_file(o.svg_path, svg::render_configuration(cfg));
    err << cfg.points.size() << " points, clearance " << cfg.boundary_clearance << ", row separation "
        << sep.separation << " vs height " << cfg.rect.height << "\n";
    return 0;
}

inline int cmd_config_verify(const Options& o, json& doc, std::ostream& err) {
    const HardConfiguration given = io::configuration_from_json(load(o.input));
    const HardConfiguration regen = generate_configuration(given.lattice_min_dist, given.pose, given.rect);
    bool same = regen.points.size() == given.points.size();
    for (std::size_t i = 0; same && i < regen.points.size(); ++i) same = distance(regen.points[i], given.points[i]) <= 1e-9;
    const bool compressible = verify_compressibility(regen);
    const bool fine = given.lattice_min_dist <= kCriticalSpacing * (1.0 + 1e-12);
    const bool ok = same && compressible && fine;
    doc = {{"count", given.points.size()},
           {"matches_lattice", same},
           {"compressible", compressible},
           {"boundary_clearance", regen.boundary_clearance},
           {"d_at_most_critical", fine},
           {"valid", ok}};
    err << (ok ? "configuration valid" : "configuration INVALID") << " (" << given.points.size() << " points)\n";
    return ok ? 0 : 1;
}

inline int cmd_lemma(const Options& o, json& doc, std::ostream& err) {
    switch (o.lemma) {
        case 1: {
            Lemma1Options lo;
            lo.saturation_attempts = o.attempts;
            lo.arc_rotations = o.rotations;
            const Lemma1Report rep = verify_lemma1(resolved_trials(o, 10000), o.seed, lo);
            doc = io::to_json(rep);
            doc["halfangle_at_2"] = excluded_halfangle(2.0);
            if (!o.svg_path.empty() && !rep.failures.empty()) {
                io::write_text_file(o.svg_path, svg::render_packing(rep.failures.front().disks));
            }
            err << "lemma 1: " << rep.trials << " packings, " << rep.failures.size() << " failures, longest interval "
                << rep.max_interval << "\n";
            return rep.passed() ? 0 : 1;
        }
        case 2: {
            const Fig3Report fig = verify_fig3_construction(build_fig3_frame());
            const SweepResult sw = sweep_lemma2(o.grid);
            doc = io::to_json(fig, sw);
            const bool ok = fig.passed() && sw.min_arc >= kPi / 3.0 - kEps;
            err << "lemma 2: min arc " << sw.min_arc << " (pi/3 = " << kPi / 3.0 << "), identities "
                << (fig.passed() ? "ok" : "FAILED") << "\n";
            return ok ? 0 : 1;
        }
        case 3: {
            const double frac = o.d_frac == 1.0 ? 0.99 : o.d_frac;
            const Lemma3Report rep = verify_lemma3(resolved_trials(o, 100000), frac * kCriticalSpacing, o.seed);
            doc = io::to_json(rep);
            err << "lemma 3 at d = " << frac << " sqrt(3) r: " << rep.uncontained << " empty holes of " << rep.trials
                << ", deep hole distance " << rep.deep_hole_distance << "\n";
            return rep.passed() ? 0 : 1;
        }
        default:
            throw UsageError("lemma must be 1, 2 or 3");
    }
}

inline int cmd_handicap(const Options& o, json& doc, std::ostream& err) {
    const PointSet pts = io::any_points_from_json(load(o.input));
    if (pts.empty()) throw UsageError("empty point set");
    const HandicapResult res = handicap_oracle(pts, o.depth, o.margin);
    doc = io::to_json(res, pts);
    if (o.grid_scan > 0) {
        const auto t = handicap_grid_scan(pts, o.grid_scan);
        doc["grid_scan"] = {{"resolution", o.grid_scan}, {"translate", t ? io::to_json(*t) : json(nullptr)}};
    }
    err << "handicap: " << doc["verdict"].get<std::string>() << "\n";
    return doc["verdict"] == "undecided" ? 1 : 0;
}

inline int cmd_cover_solve(const Options& o, json& doc, std::ostream& err) {
    const PointSet pts = io::any_points_from_json(load(o.input));
    const CoverSolution s = solve_cover(pts, solve_options(o));
    doc = io::to_json(s, pts);
    if (!o.svg_path.empty()) io::write_text_file(o.svg_path, svg::render_cover(pts, s));
    err << "cover: " << io::to_string(s.status) << ", " << s.centers.size() << " disks, " << s.best_uncovered
        << " uncovered, " << s.partitions_tried << " partitions\n";
    if (s.status == SolveStatus::Covered && !verify_cover(pts, s.centers)) return 1;
    return 0;
}

inline int cmd_cover_verify(const Options& o, json& doc, std::ostream& err) {
    const PointSet pts = io::any_points_from_json(load(o.input));
    const PointSet centers = io::centers_from_json(load(o.centers));
    const CoverCheck c = check_cover(pts, centers);
    doc = {{"valid", c.valid}, {"packing", c.packing}, {"uncovered", c.uncovered}};
    err << (c.valid ? "valid cover" : "not a valid cover") << "\n";
    return c.valid ? 0 : 1;
}

inline int cmd_cover_removability(const Options& o, json& doc, std::ostream& err) {
    const PointSet pts = io::any_points_from_json(load(o.input));
    const auto rep = removability_probe(pts, solve_options(o));
    json rows = json::array();
    std::size_t covered = 0;
    for (const auto& r : rep) {
        rows.push_back({{"removed", r.removed},
                        {"point", io::to_json(pts[r.removed])},
                        {"status", io::to_string(r.status)},
                        {"best_uncovered", r.best_uncovered}});
        if (r.status == SolveStatus::Covered) ++covered;
    }
    doc = {{"points", pts.size()}, {"removals", rows}, {"covered_after_removal", covered}};
    err << "removability: " << covered << " of " << rep.size() << " removals became coverable\n";
    return 0;
}

inline int cmd_translates_lattice(const Options& o, json& doc, std::ostream& err) {
    if (o.n < 1) throw UsageError("--n must be >= 1");
    const TranslateSet ts = lattice_translate_set(o.n);
    const TilingReport tiling = certify_triangle_tiling_report(ts);
    doc = io::to_json(ts);
    doc["n"] = o.n;
    doc["triangle_side"] = kTriangleSide;
    doc["triangle_tiling"] = io::to_json(tiling);
    if (!o.svg_path.empty()) io::write_text_file(o.svg_path, svg::render_translate_cover(ts));
    err << ts.translates.size() << " translates; triangle tiling " << (tiling.covered ? "covers" : "does not cover")
        << " U\n";
    return 0;
}

inline int cmd_translates_certify(const Options& o, json& doc, std::ostream& err) {
    const TranslateSet ts = io::translate_set_from_json(load(o.input));
    const TilingReport tiling = certify_triangle_tiling_report(ts);
    const CoverCertificate cert = certify_translate_cover(ts, o.margin, o.depth);
    doc = {{"translates", ts.translates.size()},
           {"triangle_tiling", io::to_json(tiling)},
           {"certificate", io::to_json(cert)}};
    const bool ok = tiling.covered || cert.status == CoverStatus::Covered;
    doc["covered"] = ok;
    err << "triangle tiling: " << (tiling.covered ? "covered" : "not covered") << "; box certificate: "
        << io::to_string(cert.status) << "\n";
    return ok ? 0 : 1;
}

inline int cmd_translates_search(const Options& o, json& doc, std::ostream& err) {
    if (o.k < 1) throw UsageError("--k must be >= 1");
    SearchOptions so;
    so.budget = o.anneal_budget;
    so.restarts = o.restarts == 32 ? 1 : o.restarts;
    so.resolution = o.resolution;
    so.certify_margin = o.margin;
    so.certify_depth = o.depth;
    so.polish_iterations = o.polish;
    if (o.init == "lattice5") {
        so.initial = lattice_translate_set(5);
    } else if (!o.init.empty()) {
        so.initial = io::translate_set_from_json(load(o.init));
    }
    const SearchResult res = search_translate_cover(o.k, o.seed, so);
    doc = io::to_json(res);
    const bool certified = res.certificate && res.certificate->status == CoverStatus::Covered;
    doc["certified"] = certified;
    if (!o.svg_path.empty()) io::write_text_file(o.svg_path, svg::render_translate_cover(res.best));
    err << "k = " << o.k << ": uncovered fraction " << res.estimate.fraction << ", certified "
        << (certified ? "yes" : "no") << ", margin " << res.min_depth << "\n";
    return 0;
}

inline int cmd_render(const Options& o, json& doc, std::ostream& err) {
    std::string text;
    if (o.kind == "fig1") {
        HardConfiguration cfg;
        if (!o.input.empty()) {
            const HardConfiguration given = io::configuration_from_json(load(o.input));
            cfg = generate_configuration(given.lattice_min_dist, given.pose, given.rect);
        } else {
            PoseSearchOptions ps;
            ps.angle_steps = o.angle_steps;
            ps.shift_steps = o.shift_steps;
            const double d = o.d_frac * kCriticalSpacing;
            cfg = generate_configuration(d, optimize_pose(d, ps).pose);
        }
        text = svg::render_configuration(cfg);
    } else if (o.kind == "fig4") {
        const TranslateSet ts = o.input.empty() ? lattice_translate_set(o.n) : io::translate_set_from_json(load(o.input));
        text = svg::render_translate_cover(ts);
    } else if (o.kind == "cover") {
        const PointSet pts = io::any_points_from_json(load(o.input));
        CoverSolution s;
        if (o.solution.empty()) {
            s = solve_cover(pts, solve_options(o));
        } else {
            s = detail::finalize(pts, io::centers_from_json(load(o.solution)));
        }
        text = svg::render_cover(pts, s);
    } else if (o.kind == "packing") {
        text = svg::render_packing(io::any_points_from_json(load(o.input)));
    } else {
        throw UsageError("render kind must be fig1, fig4, cover or packing");
    }
    const std::string path = o.svg_path.empty() ? o.kind + ".svg" : o.svg_path;
    io::write_text_file(path, text);
    doc = {{"kind", o.kind}, {"svg", path}, {"bytes", text.size()}};
    err << "wrote " << path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"pc2: packing-constrained point covering workbench"};
    app.require_subcommand(1);
    app.fallthrough();
    auto opt = std::make_shared<Options>();
    Options& o = *opt;
    app.add_option("--threads", o.threads, "Worker thread cap (default: PC2_THREADS or all cores)");
    app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
    app.add_option("-o,--out", o.out_path, "Also write the JSON result to this file");

    std::string which;
    auto* bound = app.add_subcommand("bound", "Area lower bound on the winning point count");

    auto* config = app.add_subcommand("config", "Hard rectangle configuration");
    config->require_subcommand(1);
    auto* cgen = config->add_subcommand("generate", "Optimize the lattice pose and emit the configuration");
    cgen->add_option("--d-frac", o.d_frac, "Lattice spacing as a fraction of sqrt(3) r")->capture_default_str();
    cgen->add_option("--angles", o.angle_steps, "Rotation grid steps over [0, pi/3)")->capture_default_str();
    cgen->add_option("--shifts", o.shift_steps, "Translation grid steps per cell axis")->capture_default_str();
    cgen->add_option("--svg", o.svg_path, "Write an SVG rendering");
    auto* cver = config->add_subcommand("verify", "Check a configuration file");
    cver->add_option("input", o.input, "Configuration JSON")->required();

    auto* lemma = app.add_subcommand("lemma", "Numerical lemma checks");
    lemma->require_subcommand(1);
    auto* lver = lemma->add_subcommand("verify", "Run the check for lemma 1, 2 or 3");
    lver->add_option("lemma", o.lemma, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
    lver->add_option("--trials", o.trials, "Trials (lemma 1: packings, lemma 3: holes)");
    lver->add_option("--grid", o.grid, "Sweep grid for lemma 2")->capture_default_str()->check(CLI::Range(100, 100000));
    lver->add_option("--rotations", o.rotations, "Arc rotations per packing")->capture_default_str();
    lver->add_option("--attempts", o.attempts, "RSA saturation attempts")->capture_default_str();
    lver->add_option("--d-frac", o.d_frac, "Lemma 3 lattice spacing as a fraction of sqrt(3) r (default 0.99)");
    lver->add_option("--svg", o.svg_path, "Write an SVG of the first failing packing");

    auto* handicap = app.add_subcommand("handicap", "Translate-only game");
    handicap->require_subcommand(1);
    auto* hcheck = handicap->add_subcommand("check", "Decide whether a translate of the close packing covers the points");
    hcheck->add_option("input", o.input, "Point set JSON")->required();
    hcheck->add_option("--depth", o.depth, "Subdivision depth")->capture_default_str();
    hcheck->add_option("--margin", o.margin, "Acceptance margin")->capture_default_str();
    hcheck->add_option("--grid-scan", o.grid_scan, "Also scan an N x N grid of translates");

    auto* cover = app.add_subcommand("cover", "Unrestricted cover search");
    cover->require_subcommand(1);
    auto add_budget = [&](CLI::App* c) {
        c->add_option("--partitions", o.partitions, "Partitions to try")->capture_default_str();
        c->add_option("--restarts", o.restarts, "Restarts per partition")->capture_default_str();
        c->add_option("--iterations", o.iterations, "Projection iterations per restart")->capture_default_str();
        c->add_option("--budget-scale", o.budget_scale, "Multiply the partition budget")->capture_default_str();
        c->add_flag("--lattice-first", o.lattice_first, "Try translates of the close packing first");
    };
    auto* csolve = cover->add_subcommand("solve", "Search for a packing covering all points");
    csolve->add_option("input", o.input, "Point set JSON")->required();
    csolve->add_option("--svg", o.svg_path, "Write an SVG rendering");
    add_budget(csolve);
    auto* cverify = cover->add_subcommand("verify", "Check a proposed cover");
    cverify->add_option("input", o.input, "Point set JSON")->required();
    cverify->add_option("centers", o.centers, "Centers JSON (array or solution)")->required();
    auto* cremove = cover->add_subcommand("removability", "Solve with each point removed in turn");
    cremove->add_option("input", o.input, "Point set or configuration JSON")->required();
    add_budget(cremove);

    auto* trans = app.add_subcommand("translates", "Interstitium translate coverings of U");
    trans->require_subcommand(1);
    auto* tlat = trans->add_subcommand("lattice", "Coset translates of H/n");
    tlat->add_option("--n", o.n, "Divisor")->capture_default_str();
    tlat->add_option("--svg", o.svg_path, "Write an SVG rendering");
    auto* tcert = trans->add_subcommand("certify", "Certify that the interstitia cover U");
    tcert->add_option("input", o.input, "Translate set JSON")->required();
    tcert->add_option("--depth", o.depth, "Subdivision depth")->capture_default_str();
    tcert->add_option("--margin", o.margin, "Acceptance margin")->capture_default_str();
    auto* tsearch = trans->add_subcommand("search", "Anneal k translates toward a covering");
    tsearch->add_option("--k", o.k, "Number of translates")->capture_default_str();
    tsearch->add_option("--budget", o.anneal_budget, "Moves per restart")->capture_default_str();
    tsearch->add_option("--restarts", o.restarts, "Independent restarts (default 1)");
    tsearch->add_option("--resolution", o.resolution, "Stratified sampling grid")->capture_default_str();
    tsearch->add_option("--polish", o.polish, "Margin ascent iterations after annealing (0 disables)")
        ->capture_default_str();
    tsearch->add_option("--init", o.init, "Initial set: 'lattice5' or a translate set JSON");
    tsearch->add_option("--depth", o.depth, "Certifier depth")->capture_default_str();
    tsearch->add_option("--margin", o.margin, "Certifier margin")->capture_default_str();
    tsearch->add_option("--svg", o.svg_path, "Write an SVG rendering");

    auto* render = app.add_subcommand("render", "Write an SVG figure");
    render->add_option("kind", o.kind, "fig1, fig4, cover or packing")->required();
    render->add_option("--input", o.input, "Input JSON");
    render->add_option("--solution", o.solution, "Solution or centers JSON (cover)");
    render->add_option("--n", o.n, "Divisor for fig4 without input")->capture_default_str();
    render->add_option("--d-frac", o.d_frac, "Lattice spacing for fig1 without input");
    render->add_option("--angles", o.angle_steps, "Rotation grid for fig1 without input");
    render->add_option("--shifts", o.shift_steps, "Translation grid for fig1 without input");
    render->add_option("--svg", o.svg_path, "Output path (default <kind>.svg)");
    add_budget(render);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n" << app.help();
        return 2;
    }

    if (o.threads > 0) set_max_threads(o.threads);
    json doc;
    int code = 0;
    try {
        if (*bound) code = cmd_bound(doc, err);
        else if (*cgen) code = cmd_config_generate(o, doc, err);
        else if (*cver) code = cmd_config_verify(o, doc, err);
        else if (*lver) code = cmd_lemma(o, doc, err);
        else if (*hcheck) code = cmd_handicap(o, doc, err);
        else if (*csolve) code = cmd_cover_solve(o, doc, err);
        else if (*cverify) code = cmd_cover_verify(o, doc, err);
        else if (*cremove) code = cmd_cover_removability(o, doc, err);
        else if (*tlat) code = cmd_translates_lattice(o, doc, err);
        else if (*tcert) code = cmd_translates_certify(o, doc, err);
        else if (*tsearch) code = cmd_translates_search(o, doc, err);
        else if (*render) code = cmd_render(o, doc, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    const std::string text = doc.dump(2);
    out << text << "\n";
    if (!o.out_path.empty()) io::write_text_file(o.out_path, text + "\n");
    return code;
}

}  // namespace pc2::cli
