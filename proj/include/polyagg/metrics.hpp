#pragma once

#include "polyagg/mesh.hpp"

#include <span>
#include <string>
#include <vector>

namespace polyagg {

// Five-number summary plus mean; quartiles use linear interpolation between
// order statistics.
struct QualitySummary {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

QualitySummary summarize(std::span<const double> values);

// Element-wise shape quality of a (possibly agglomerated) mesh. Every metric
// lies in [0,1]; higher is better. `shape` holds the area-perimeter ratio in
// 2D and sphericity in 3D. `heterogeneity` is filled only when fine-cell tags
// are supplied to quality_report.
struct QualityReport {
    int dim = 2;
    std::vector<double> circle_ratio;
    std::vector<double> shape;
    std::vector<double> uniformity;
    std::vector<double> volume_deviation;
    std::vector<double> heterogeneity;

    QualitySummary circle_ratio_summary;
    QualitySummary shape_summary;
    QualitySummary uniformity_summary;
    QualitySummary volume_deviation_summary;
    QualitySummary heterogeneity_summary;

    int n_elements() const { return static_cast<int>(circle_ratio.size()); }
};

// Ratio between the largest inscribed ball and the smallest enclosing ball of
// one element. The enclosing radius comes from Welzl's algorithm over the
// element vertices; the inscribed radius from a pole-of-inaccessibility search
// (branch-and-bound over shrinking boxes) to relative precision `precision`.
// Degenerate elements score 0.
double circle_ratio(const Mesh& mesh, int cell, double precision = 1e-3);

// Isoperimetric quotient 4*pi*|P| / |boundary|^2 of a 2D element.
// Throws MeshError when the boundary length is zero.
double area_perimeter_ratio(const Mesh& mesh, int cell);

// Sphericity (36*pi*|P|^2)^(1/3) / |boundary| of a 3D element.
// Throws MeshError when the boundary area is zero.
double sphericity(const Mesh& mesh, int cell);

// Boundary measure of one element: total retained-face length (2D) or area
// (3D), hole boundaries included.
double boundary_measure(const Mesh& mesh, int cell);

// diam(P) / h for every element, where h is the largest element diameter.
// The largest element scores exactly 1.
std::vector<double> uniformity_factor(const Mesh& mesh);

// 1 / (1 + VD) with VD = |vol - mean vol| / mean vol, per element.
std::vector<double> volumes_difference(const Mesh& mesh);

// max(p, 1-p) where p is the fraction of member tags that round to 1.
// Tags in [0,1] are thresholded at 0.5 first.
double heterogeneity_preservation(std::span<const double> member_tags);

// Full per-element report. `fine_tags` are the tags of the pre-agglomeration
// cells; element membership comes from mesh.members (falling back to each
// cell being its own member for meshes that were never merged).
QualityReport quality_report(const Mesh& mesh, std::span<const double> fine_tags = {});

// JSON-formatted block of the per-metric summaries.
std::string summary_text(const QualityReport& report);

}  // namespace polyagg
