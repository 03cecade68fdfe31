#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "polyagg/generate.hpp"
#include "polyagg/metrics.hpp"

using namespace polyagg;

TEST_CASE("circle ratio of the unit square") {
    Mesh m = grid_quads(1, 1);
    // Inscribed radius 1/2, enclosing radius sqrt(2)/2.
    CHECK(circle_ratio(m, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.005));
}

TEST_CASE("circle ratio of a 4:1 rectangle") {
    Mesh m;
    m.add_vertex({0, 0, 0});
    m.add_vertex({4, 0, 0});
    m.add_vertex({4, 1, 0});
    m.add_vertex({0, 1, 0});
    m.add_polygon({0, 1, 2, 3});
    // r_in = 1/2, r_out = sqrt(17)/2.
    CHECK(circle_ratio(m, 0) == doctest::Approx(1.0 / std::sqrt(17.0)).epsilon(0.005));
}

TEST_CASE("circle ratio of a regular 64-gon approaches one") {
    Mesh m;
    std::vector<int> loop;
    for (int i = 0; i < 64; ++i) {
        double a = 2.0 * M_PI * i / 64.0;
        loop.push_back(m.add_vertex({std::cos(a), std::sin(a), 0.0}));
    }
    m.add_polygon(loop);
    // r_in = cos(pi/64) for circumradius 1.
    CHECK(circle_ratio(m, 0, 1e-4) == doctest::Approx(std::cos(M_PI / 64.0)).epsilon(1e-3));
}

TEST_CASE("circle ratio of the unit cube") {
    Mesh m = cube_hexes(1);
    // r_in = 1/2, r_out = sqrt(3)/2.
    CHECK(circle_ratio(m, 0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(0.005));
}

namespace {

// Chebyshev-center oracle for convex polygons: the largest inscribed circle
// is supported by three edges (or two parallel ones); enumerate edge triples,
// solve the 3x3 equidistance system, keep feasible candidates.
double chebyshev_radius(const std::vector<Vec3>& loop) {
    size_t n = loop.size();
    struct Line {
        double a, b, c;  // a x + b y = c, unit normal pointing inside
    };
    std::vector<Line> lines;
    for (size_t i = 0; i < n; ++i) {
        const Vec3& p = loop[i];
        const Vec3& q = loop[(i + 1) % n];
        double dx = q.x - p.x, dy = q.y - p.y;
        double len = std::hypot(dx, dy);
        // Inward normal for a counterclockwise loop.
        double a = -dy / len, b = dx / len;
        lines.push_back({a, b, a * p.x + b * p.y});
    }
    auto clearance = [&](double x, double y) {
        double r = 1e30;
        for (const Line& l : lines) r = std::min(r, l.a * x + l.b * y - l.c);
        return r;
    };
    double best = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (size_t k = j + 1; k < n; ++k) {
                // Equal clearance r to the three lines: a x + b y - r = c.
                double M[3][4] = {
                    {lines[i].a, lines[i].b, -1.0, lines[i].c},
                    {lines[j].a, lines[j].b, -1.0, lines[j].c},
                    {lines[k].a, lines[k].b, -1.0, lines[k].c},
                };
                // Gaussian elimination with partial pivoting.
                bool singular = false;
                for (int col = 0; col < 3 && !singular; ++col) {
                    int piv = col;
                    for (int r = col + 1; r < 3; ++r)
                        if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
                    if (std::abs(M[piv][col]) < 1e-12) {
                        singular = true;
                        break;
                    }
                    std::swap(M[piv], M[col]);
                    for (int r = 0; r < 3; ++r) {
                        if (r == col) continue;
                        double f = M[r][col] / M[col][col];
                        for (int cc = col; cc < 4; ++cc) M[r][cc] -= f * M[col][cc];
                    }
                }
                if (singular) continue;
                double x = M[0][3] / M[0][0], y = M[1][3] / M[1][1], r = M[2][3] / M[2][2];
                if (r <= 0.0) continue;
                if (clearance(x, y) >= r - 1e-9) best = std::max(best, r);
            }
    return best;
}

}  // namespace

TEST_CASE("inscribed radius matches the Chebyshev-center oracle on convex polygons") {
    std::mt19937_64 rng(27);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI), radius(0.5, 1.5);
    std::uniform_int_distribution<int> nv(4, 12);
    for (int trial = 0; trial < 15; ++trial) {
        int n = nv(rng);
        std::vector<double> angles(n);
        for (double& a : angles) a = angle(rng);
        std::sort(angles.begin(), angles.end());
        bool distinct = true;
        for (int i = 1; i < n; ++i)
            if (angles[i] - angles[i - 1] < 0.15) distinct = false;
        if (!distinct) continue;  // skip near-degenerate draws

        Mesh m;
        std::vector<int> loop;
        std::vector<Vec3> pts;
        double rr = radius(rng);
        for (double a : angles) {
            Vec3 p{rr * std::cos(a), rr * std::sin(a), 0.0};
            pts.push_back(p);
            loop.push_back(m.add_vertex(p));
        }
        m.add_polygon(loop);

        double oracle = chebyshev_radius(pts);
        REQUIRE(oracle > 0.0);
        Ball out = min_enclosing_ball(pts, 2);
        double cr = circle_ratio(m, 0, 1e-4);
        CHECK(cr * out.radius == doctest::Approx(oracle).epsilon(0.005));
    }
}

TEST_CASE("area-perimeter ratio gold values") {
    Mesh sq = grid_quads(1, 1);
    CHECK(area_perimeter_ratio(sq, 0) == doctest::Approx(M_PI / 4.0).epsilon(1e-6));

    Mesh rect;
    rect.add_vertex({0, 0, 0});
    rect.add_vertex({1, 0, 0});
    rect.add_vertex({1, 0.5, 0});
    rect.add_vertex({0, 0.5, 0});
    rect.add_polygon({0, 1, 2, 3});
    CHECK(area_perimeter_ratio(rect, 0) ==
          doctest::Approx(4.0 * M_PI * 0.5 / 9.0).epsilon(1e-9));
}

TEST_CASE("sphericity of the unit cube") {
    Mesh m = cube_hexes(1);
    double expect = std::cbrt(36.0 * M_PI) / 6.0;
    CHECK(sphericity(m, 0) == doctest::Approx(expect).epsilon(1e-4 / expect));
}

TEST_CASE("uniformity factor peaks at one on uniform meshes") {
    Mesh m = grid_quads(5, 5);
    std::vector<double> uf = uniformity_factor(m);
    for (double v : uf) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("volumes difference is one on equal-volume meshes") {
    Mesh m = grid_quads(4, 4);
    std::vector<double> vd = volumes_difference(m);
    for (double v : vd) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    // A mesh with one huge and many small cells scores below one.
    Mesh merged = merge_cells(m, {0, 0, 1, 2, 0, 0, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    std::vector<double> vd2 = volumes_difference(merged);
    CHECK(vd2[0] < 1.0);
}

TEST_CASE("heterogeneity preservation thresholds at one half") {
    // Member tag shares: [1, 1] -> 1; [0, 1] -> 0.5 -> 0.5; [1, 0, 0] -> 2/3.
    std::vector<double> pure{1.0, 1.0}, split{0.0, 1.0}, skew{1.0, 0.0, 0.0}, none;
    CHECK(heterogeneity_preservation(pure) == doctest::Approx(1.0));
    CHECK(heterogeneity_preservation(split) == doctest::Approx(0.5));
    CHECK(heterogeneity_preservation(skew) == doctest::Approx(2.0 / 3.0));
    CHECK(heterogeneity_preservation(none) == doctest::Approx(1.0));
}

TEST_CASE("summaries interpolate quartiles linearly") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    QualitySummary s = summarize(v);
    CHECK(s.min == doctest::Approx(1.0));
    CHECK(s.q1 == doctest::Approx(1.75));
    CHECK(s.median == doctest::Approx(2.5));
    CHECK(s.q3 == doctest::Approx(3.25));
    CHECK(s.max == doctest::Approx(4.0));
    CHECK(s.mean == doctest::Approx(2.5));
}

TEST_CASE("quality report covers every element and respects holes") {
    Mesh merged = merge_cells(grid_quads(3, 3), {0, 0, 0, 0, 1, 0, 0, 0, 0});
    QualityReport rep = quality_report(merged);
    REQUIRE(rep.n_elements() == 2);
    // The ring's inscribed circle must avoid the hole. The largest disk sits
    // in a corner at (t, t) with t = r balancing the outer walls against the
    // diagonal hole corner: t = sqrt(2) * (1/3 - t), so r_in = sqrt(2)/(3 +
    // 3*sqrt(2)) ~ 0.19526, well below the hole-blind value 1/2.
    double r_in = std::sqrt(2.0) / (3.0 + 3.0 * std::sqrt(2.0));
    double corner_disk = r_in / (std::sqrt(2.0) / 2.0);
    CHECK(rep.circle_ratio[0] == doctest::Approx(corner_disk).epsilon(0.01));
    CHECK(rep.circle_ratio[1] > 0.5);  // the center square scores ~0.707

    std::string text = summary_text(rep);
    CHECK(text.find("circle_ratio") != std::string::npos);
    CHECK(text.find("area_perimeter_ratio") != std::string::npos);
}

TEST_CASE("degenerate elements score zero circle ratio") {
    Mesh m;
    m.add_vertex({0, 0, 0});
    m.add_vertex({1, 0, 0});
    m.add_vertex({2, 0, 0});
    m.add_polygon({0, 1, 2});  // zero-area sliver
    CHECK(circle_ratio(m, 0) == doctest::Approx(0.0));
}
