#pragma once
// Minimal SVG output for configurations, translate coverings and covers.
// World y points up; the writer flips it.

#include <cstdio>
#include <sstream>
#include <string>

#include "config_builder.hpp"
#include "cover_solver.hpp"
#include "interstitium_lab.hpp"

namespace pc2::svg {

class Canvas {
public:
    Canvas(double xmin, double ymin, double xmax, double ymax, double pixels_per_unit = 160.0)
        : xmin_(xmin), ymax_(ymax), scale_(pixels_per_unit), w_((xmax - xmin) * scale_), h_((ymax - ymin) * scale_) {}

    Canvas& circle(const Point2& c, double r, const std::string& style) {
        body_ << "<circle cx=\"" << sx(c.x) << "\" cy=\"" << sy(c.y) << "\" r=\"" << r * scale_ << "\" " << style
              << "/>\n";
        return *this;
    }

    Canvas& polygon(std::span<const Point2> pts, const std::string& style) {
        body_ << "<polygon points=\"";
        for (const auto& p : pts) body_ << sx(p.x) << ',' << sy(p.y) << ' ';
        body_ << "\" " << style << "/>\n";
        return *this;
    }

    Canvas& line(const Point2& a, const Point2& b, const std::string& style) {
        body_ << "<line x1=\"" << sx(a.x) << "\" y1=\"" << sy(a.y) << "\" x2=\"" << sx(b.x) << "\" y2=\"" << sy(b.y)
              << "\" " << style << "/>\n";
        return *this;
    }

    Canvas& text(const Point2& at, const std::string& s, double size = 14.0) {
        body_ << "<text x=\"" << sx(at.x) << "\" y=\"" << sy(at.y) << "\" font-size=\"" << size
              << "\" font-family=\"sans-serif\">" << s << "</text>\n";
        return *this;
    }

    std::string str() const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
            << "\" viewBox=\"0 0 " << w_ << ' ' << h_ << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

private:
    double sx(double x) const { return (x - xmin_) * scale_; }
    double sy(double y) const { return (ymax_ - y) * scale_; }

    double xmin_, ymax_, scale_, w_, h_;
    std::ostringstream body_;
};

inline PointSet rectangle_corners(const HardRectangle& R) {
    const double hw = R.half_width(), hh = R.half_height();
    PointSet c{{-hw, -hh}, {hw, -hh}, {hw, hh}, {-hw, hh}};
    for (auto& p : c) p = R.pose.apply(p);
    return c;
}

/// The hard rectangle, nearby lattice points in gray, interior points in black.
inline std::string render_configuration(const HardConfiguration& cfg) {
    const double pad = 0.4;
    const double hw = cfg.rect.half_width(), hh = cfg.rect.half_height();
    Canvas cv(-hw - pad, -hh - pad, hw + pad, hh + pad, 200.0);
    cv.polygon(rectangle_corners(cfg.rect), "fill=\"#d9d9d9\" stroke=\"#555\" stroke-width=\"1\"");
    const HexLattice L(cfg.lattice_min_dist, cfg.pose);
    const double dot = 0.018;
    detail::for_each_lattice_point_near_origin(L, std::hypot(hw + pad, hh + pad), [&](double x, double y) {
        if (std::abs(x) <= hw + pad && std::abs(y) <= hh + pad) {
            cv.circle(cfg.rect.pose.apply({x, y}), dot * 0.7, "fill=\"#aaa\"");
        }
    });
    for (const auto& p : cfg.world_points()) cv.circle(p, dot, "fill=\"black\"");
    return cv.str();
}

/// One fundamental cell of H with the close-packing disks, and the
/// inscribed triangles of every translate.
inline std::string render_translate_cover(const TranslateSet& ts) {
    Canvas cv(-1.2, -1.2, 4.2, 2.9, 120.0);
    const HexLattice H = HexLattice::close_packing();
    for (int i = -1; i <= 3; ++i) {
        for (int j = -1; j <= 2; ++j) {
            cv.circle(H.point(i, j), 1.0, "fill=\"none\" stroke=\"#bbb\" stroke-width=\"1\"");
        }
    }
    const PointSet cell{H.point(0, 0), H.point(1, 0), H.point(1, 1), H.point(0, 1)};
    cv.polygon(cell, "fill=\"none\" stroke=\"#333\" stroke-width=\"1.5\"");
    for (const Point2& t : ts.translates) {
        for (const auto& tri : inscribed_triangles(t)) {
            // draw every periodic copy that meets the cell
            for (int i = -1; i <= 1; ++i) {
                for (int j = -1; j <= 1; ++j) {
                    PointSet v;
                    for (const auto& p : tri.vertices) v.push_back(p + H.vector(i, j));
                    cv.polygon(v, "fill=\"#808080\" fill-opacity=\"0.55\" stroke=\"#444\" stroke-width=\"0.5\"");
                }
            }
        }
    }
    return cv.str();
}

/// Points, disks of a solution, and uncovered points in red.
inline std::string render_cover(std::span<const Point2> points, const CoverSolution& sol) {
    double xmin = INFINITY, ymin = INFINITY, xmax = -INFINITY, ymax = -INFINITY;
    auto grow = [&](const Point2& p, double r) {
        xmin = std::min(xmin, p.x - r);
        xmax = std::max(xmax, p.x + r);
        ymin = std::min(ymin, p.y - r);
        ymax = std::max(ymax, p.y + r);
    };
    for (const auto& p : points) grow(p, 0.2);
    for (const auto& c : sol.centers) grow(c, 1.05);
    if (points.empty() && sol.centers.empty()) grow({0, 0}, 1.0);
    Canvas cv(xmin, ymin, xmax, ymax, 120.0);
    for (const auto& c : sol.centers) cv.circle(c, 1.0, "fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"#3182bd\"");
    for (std::size_t k = 0; k < points.size(); ++k) {
        const bool ok = k < sol.assignment.size() && sol.assignment[k] >= 0;
        cv.circle(points[k], 0.03, ok ? "fill=\"black\"" : "fill=\"#d62728\" stroke=\"black\" stroke-width=\"0.5\"");
    }
    return cv.str();
}

/// A Lemma 1 packing: the base disk at the origin and its neighbors.
inline std::string render_packing(std::span<const Point2> disks) {
    Canvas cv(-5.2, -5.2, 5.2, 5.2, 60.0);
    cv.circle({0, 0}, 1.0, "fill=\"#fdae6b\" stroke=\"#333\"");
    cv.circle({0, 0}, 1.0 + kHoleRadius, "fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4 3\"");
    for (const auto& c : disks) cv.circle(c, 1.0, "fill=\"#c6dbef\" stroke=\"#333\"");
    return cv.str();
}

}  // namespace pc2::svg
