#include "polyagg/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

#include "polyagg/geometry.hpp"

namespace polyagg {

namespace {

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    double pos = q * static_cast<double>(sorted.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// Boundary of one element, flattened to coordinates: segments in 2D (hole
// edges included), fan triangles of the retained faces in 3D.
struct BoundarySegments {
    std::vector<std::array<Vec3, 2>> segs;
    std::vector<std::array<Vec3, 3>> tris;
};

BoundarySegments element_boundary(const Mesh& mesh, const Cell& c) {
    BoundarySegments b;
    if (mesh.dim == 2) {
        b.segs.reserve(c.faces.size());
        for (const Face& f : c.faces)
            b.segs.push_back({mesh.vertices[f.loop[0]], mesh.vertices[f.loop[1]]});
    } else {
        for (const Face& f : c.faces) {
            const Vec3& apex = mesh.vertices[f.loop[0]];
            for (size_t i = 1; i + 1 < f.loop.size(); ++i)
                b.tris.push_back({apex, mesh.vertices[f.loop[i]], mesh.vertices[f.loop[i + 1]]});
        }
    }
    return b;
}

bool inside_2d(const BoundarySegments& b, const Vec3& p) {
    // Even-odd rule with a ray towards +x; holes flip parity naturally.
    bool in = false;
    for (const auto& s : b.segs) {
        const Vec3& a = s[0];
        const Vec3& c = s[1];
        if ((a.y > p.y) != (c.y > p.y)) {
            double x_hit = a.x + (p.y - a.y) * (c.x - a.x) / (c.y - a.y);
            if (p.x < x_hit) in = !in;
        }
    }
    return in;
}

bool inside_3d(const BoundarySegments& b, const Vec3& p) {
    // Parity of triangle crossings along a fixed irrational-ish direction,
    // which keeps the ray clear of edges and vertices in practice.
    static const Vec3 dir = [] {
        Vec3 d{0.57735026918962584, 0.35112344158839170, 0.73712908082322375};
        return d / norm(d);
    }();
    int crossings = 0;
    for (const auto& t : b.tris) {
        Vec3 e1 = t[1] - t[0], e2 = t[2] - t[0];
        Vec3 h = cross(dir, e2);
        double det = dot(e1, h);
        if (std::abs(det) < 1e-15) continue;
        Vec3 s = p - t[0];
        double u = dot(s, h) / det;
        if (u < 0.0 || u > 1.0) continue;
        Vec3 q = cross(s, e1);
        double v = dot(dir, q) / det;
        if (v < 0.0 || u + v > 1.0) continue;
        double dist_along = dot(e2, q) / det;
        if (dist_along > 1e-12) ++crossings;
    }
    return (crossings % 2) == 1;
}

double boundary_distance(const BoundarySegments& b, const Vec3& p, int dim) {
    double best = std::numeric_limits<double>::infinity();
    if (dim == 2)
        for (const auto& s : b.segs) best = std::min(best, point_segment_distance(p, s[0], s[1]));
    else
        for (const auto& t : b.tris)
            best = std::min(best, point_triangle_distance(p, t[0], t[1], t[2]));
    return best;
}

// Pole of inaccessibility: branch-and-bound over shrinking boxes, maximizing
// the signed distance to the boundary (negative outside). The search stops
// once no box can beat the best point by more than `precision` relative.
double inscribed_radius(const BoundarySegments& b, int dim, const Vec3& lo, const Vec3& hi,
                        const Vec3& centroid_hint, double scale, double precision) {
    auto signed_dist = [&](const Vec3& p) {
        bool in = dim == 2 ? inside_2d(b, p) : inside_3d(b, p);
        double d = boundary_distance(b, p, dim);
        return in ? d : -d;
    };

    struct Box {
        double potential;
        Vec3 center;
        double h;  // half side
        bool operator<(const Box& o) const { return potential < o.potential; }
    };
    const double corner = dim == 2 ? std::numbers::sqrt2 : std::sqrt(3.0);

    double best = signed_dist(centroid_hint);
    Vec3 c0 = (lo + hi) * 0.5;
    best = std::max(best, signed_dist(c0));
    double h0 = 0.5 * std::max({hi.x - lo.x, hi.y - lo.y, dim == 3 ? hi.z - lo.z : 0.0});
    if (h0 <= 0.0) return std::max(best, 0.0);

    auto tolerance = [&] { return precision * std::max(best, 1e-6 * scale); };

    std::priority_queue<Box> queue;
    queue.push({signed_dist(c0) + h0 * corner, c0, h0});
    int pops = 0;
    while (!queue.empty() && pops < 200000) {
        Box top = queue.top();
        queue.pop();
        ++pops;
        if (top.potential - best <= tolerance()) break;
        double h = top.h * 0.5;
        const int nz = dim == 3 ? 2 : 1;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < nz; ++k) {
                    Vec3 cc = top.center;
                    cc.x += (i ? h : -h);
                    cc.y += (j ? h : -h);
                    if (dim == 3) cc.z += (k ? h : -h);
                    double d = signed_dist(cc);
                    best = std::max(best, d);
                    double pot = d + h * corner;
                    if (pot - best > tolerance()) queue.push({pot, cc, h});
                }
    }
    return std::max(best, 0.0);
}

double face_area(const Mesh& mesh, const Face& f) {
    const Vec3& apex = mesh.vertices[f.loop[0]];
    double area = 0.0;
    for (size_t i = 1; i + 1 < f.loop.size(); ++i)
        area += 0.5 * norm(cross(mesh.vertices[f.loop[i]] - apex,
                                 mesh.vertices[f.loop[i + 1]] - apex));
    return area;
}

std::string num9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string summary_json(const QualitySummary& s) {
    std::ostringstream os;
    os << "{\"min\": " << num9(s.min) << ", \"q1\": " << num9(s.q1)
       << ", \"median\": " << num9(s.median) << ", \"q3\": " << num9(s.q3)
       << ", \"max\": " << num9(s.max) << ", \"mean\": " << num9(s.mean) << "}";
    return os.str();
}

}  // namespace

QualitySummary summarize(std::span<const double> values) {
    QualitySummary s;
    if (values.empty()) return s;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = quantile(sorted, 0.25);
    s.median = quantile(sorted, 0.5);
    s.q3 = quantile(sorted, 0.75);
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean = sum / static_cast<double>(sorted.size());
    return s;
}

double circle_ratio(const Mesh& mesh, int cell, double precision) {
    const Cell& c = mesh.cells[cell];
    if (c.faces.empty() || c.vertices.empty()) return 0.0;
    CellGeometry geo;
    try {
        geo = cell_geometry(mesh, cell);
    } catch (const MeshError&) {
        return 0.0;  // degenerate element
    }

    std::vector<Vec3> pts;
    pts.reserve(c.vertices.size());
    for (int v : c.vertices) pts.push_back(mesh.vertices[v]);
    Ball outer = min_enclosing_ball(pts, mesh.dim);
    if (outer.radius <= 0.0) return 0.0;

    Vec3 lo = pts[0], hi = pts[0];
    for (const Vec3& p : pts) {
        lo.x = std::min(lo.x, p.x); hi.x = std::max(hi.x, p.x);
        lo.y = std::min(lo.y, p.y); hi.y = std::max(hi.y, p.y);
        lo.z = std::min(lo.z, p.z); hi.z = std::max(hi.z, p.z);
    }
    BoundarySegments b = element_boundary(mesh, c);
    double r_in = inscribed_radius(b, mesh.dim, lo, hi, geo.centroid, outer.radius, precision);
    return std::clamp(r_in / outer.radius, 0.0, 1.0);
}

double boundary_measure(const Mesh& mesh, int cell) {
    const Cell& c = mesh.cells[cell];
    double total = 0.0;
    if (mesh.dim == 2)
        for (const Face& f : c.faces)
            total += dist(mesh.vertices[f.loop[0]], mesh.vertices[f.loop[1]]);
    else
        for (const Face& f : c.faces) total += face_area(mesh, f);
    return total;
}

double area_perimeter_ratio(const Mesh& mesh, int cell) {
    if (mesh.dim != 2) throw MeshError("area_perimeter_ratio is a 2D metric");
    double perimeter = boundary_measure(mesh, cell);
    if (perimeter <= 0.0)
        throw MeshError("area_perimeter_ratio: element " + std::to_string(cell) +
                        " has zero boundary length");
    double area = cell_geometry(mesh, cell).measure;
    return 4.0 * std::numbers::pi * area / (perimeter * perimeter);
}

double sphericity(const Mesh& mesh, int cell) {
    if (mesh.dim != 3) throw MeshError("sphericity is a 3D metric");
    double surface = boundary_measure(mesh, cell);
    if (surface <= 0.0)
        throw MeshError("sphericity: element " + std::to_string(cell) +
                        " has zero boundary area");
    double volume = cell_geometry(mesh, cell).measure;
    return std::cbrt(36.0 * std::numbers::pi * volume * volume) / surface;
}

std::vector<double> uniformity_factor(const Mesh& mesh) {
    std::vector<double> diam(mesh.n_cells());
    double h = 0.0;
    for (int i = 0; i < mesh.n_cells(); ++i) {
        diam[i] = cell_geometry(mesh, i).diameter;
        h = std::max(h, diam[i]);
    }
    if (h > 0.0)
        for (double& d : diam) d /= h;
    return diam;
}

std::vector<double> volumes_difference(const Mesh& mesh) {
    std::vector<double> vol(mesh.n_cells());
    double mean = 0.0;
    for (int i = 0; i < mesh.n_cells(); ++i) {
        vol[i] = cell_geometry(mesh, i).measure;
        mean += vol[i];
    }
    if (mesh.n_cells() == 0) return vol;
    mean /= static_cast<double>(mesh.n_cells());
    for (double& v : vol) {
        double vd = std::abs(v - mean) / mean;
        v = 1.0 / (1.0 + vd);
    }
    return vol;
}

double heterogeneity_preservation(std::span<const double> member_tags) {
    if (member_tags.empty()) return 1.0;
    double p = 0.0;
    for (double t : member_tags)
        if (t >= 0.5) p += 1.0;
    p /= static_cast<double>(member_tags.size());
    return std::max(p, 1.0 - p);
}

QualityReport quality_report(const Mesh& mesh, std::span<const double> fine_tags) {
    QualityReport r;
    r.dim = mesh.dim;
    const int n = mesh.n_cells();
    r.circle_ratio.reserve(n);
    r.shape.reserve(n);
    for (int i = 0; i < n; ++i) {
        r.circle_ratio.push_back(circle_ratio(mesh, i));
        r.shape.push_back(mesh.dim == 2 ? area_perimeter_ratio(mesh, i) : sphericity(mesh, i));
    }
    r.uniformity = uniformity_factor(mesh);
    r.volume_deviation = volumes_difference(mesh);

    if (!fine_tags.empty()) {
        r.heterogeneity.reserve(n);
        for (int i = 0; i < n; ++i) {
            std::vector<double> tags;
            if (mesh.members.empty()) {
                if (i >= static_cast<int>(fine_tags.size()))
                    throw MeshError("quality_report: tag array shorter than cell count");
                tags.push_back(fine_tags[i]);
            } else {
                for (int m : mesh.members[i]) {
                    if (m < 0 || m >= static_cast<int>(fine_tags.size()))
                        throw MeshError("quality_report: member id " + std::to_string(m) +
                                        " outside the tag array");
                    tags.push_back(fine_tags[m]);
                }
            }
            r.heterogeneity.push_back(heterogeneity_preservation(tags));
        }
    }

    r.circle_ratio_summary = summarize(r.circle_ratio);
    r.shape_summary = summarize(r.shape);
    r.uniformity_summary = summarize(r.uniformity);
    r.volume_deviation_summary = summarize(r.volume_deviation);
    if (!r.heterogeneity.empty()) r.heterogeneity_summary = summarize(r.heterogeneity);
    return r;
}

std::string summary_text(const QualityReport& report) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"elements\": " << report.n_elements() << ",\n";
    os << "  \"circle_ratio\": " << summary_json(report.circle_ratio_summary) << ",\n";
    os << "  \"" << (report.dim == 2 ? "area_perimeter_ratio" : "sphericity")
       << "\": " << summary_json(report.shape_summary) << ",\n";
    os << "  \"uniformity_factor\": " << summary_json(report.uniformity_summary) << ",\n";
    os << "  \"volumes_difference\": " << summary_json(report.volume_deviation_summary);
    if (!report.heterogeneity.empty())
        os << ",\n  \"heterogeneity_preservation\": "
           << summary_json(report.heterogeneity_summary);
    os << "\n}\n";
    return os.str();
}

}  // namespace polyagg
