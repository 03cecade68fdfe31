#include "polyagg/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace polyagg {

std::vector<int> convex_hull_2d(std::span<const Vec3> pts) {
    const int n = static_cast<int>(pts.size());
    if (n <= 2) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
        return pts[a].y < pts[b].y;
    });
    auto turn = [&](int o, int a, int b) {
        return (pts[a].x - pts[o].x) * (pts[b].y - pts[o].y) -
               (pts[a].y - pts[o].y) * (pts[b].x - pts[o].x);
    };
    std::vector<int> hull(2 * n);
    int k = 0;
    for (int idx = 0; idx < n; ++idx) {  // lower chain
        int i = order[idx];
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], i) <= 0) --k;
        hull[k++] = i;
    }
    for (int idx = n - 2, lower = k + 1; idx >= 0; --idx) {  // upper chain
        int i = order[idx];
        while (k >= lower && turn(hull[k - 2], hull[k - 1], i) <= 0) --k;
        hull[k++] = i;
    }
    hull.resize(k - 1);
    return hull;
}

double farthest_pair_distance(std::span<const Vec3> pts, int dim) {
    const int n = static_cast<int>(pts.size());
    if (n < 2) return 0.0;
    std::vector<Vec3> reduced;
    std::span<const Vec3> cand = pts;
    if (dim == 2 && n > 1000) {
        auto hull = convex_hull_2d(pts);
        reduced.reserve(hull.size());
        for (int i : hull) reduced.push_back(pts[i]);
        cand = reduced;
    }
    double best = 0.0;
    for (size_t i = 0; i < cand.size(); ++i)
        for (size_t j = i + 1; j < cand.size(); ++j)
            best = std::max(best, dist2(cand[i], cand[j]));
    return std::sqrt(best);
}

namespace {

// Circumscribed ball of up to dim+1 support points (exact for the
// degenerate cases Welzl produces).
Ball ball_from_support(const std::vector<Vec3>& s, int dim) {
    Ball b;
    const size_t m = s.size();
    if (m == 0) return b;
    if (m == 1) return {s[0], 0.0};
    if (m == 2) {
        b.center = (s[0] + s[1]) * 0.5;
        b.radius = dist(s[0], b.center);
        return b;
    }
    if (dim == 2 || m == 3) {
        // Circumcircle of 3 points (in 3D: circle in their plane).
        Vec3 a = s[0], p = s[1], q = s[2];
        Vec3 u = p - a, v = q - a;
        double uu = dot(u, u), vv = dot(v, v), uv = dot(u, v);
        double det = 2.0 * (uu * vv - uv * uv);
        if (std::abs(det) < 1e-30) {  // collinear: fall back to the widest pair
            Ball best;
            for (size_t i = 0; i < m; ++i)
                for (size_t j = i + 1; j < m; ++j) {
                    Vec3 c = (s[i] + s[j]) * 0.5;
                    double r = dist(s[i], c);
                    if (r > best.radius) best = {c, r};
                }
            return best;
        }
        double alpha = (vv * uu - uv * vv) / det;
        double beta = (uu * vv - uv * uu) / det;
        b.center = a + u * alpha + v * beta;
        b.radius = dist(a, b.center);
        return b;
    }
    // 4 support points in 3D: solve the 3x3 system for the circumcenter.
    Vec3 a = s[0];
    Vec3 r1 = s[1] - a, r2 = s[2] - a, r3 = s[3] - a;
    double d1 = 0.5 * dot(r1, r1), d2 = 0.5 * dot(r2, r2), d3 = 0.5 * dot(r3, r3);
    double det = dot(r1, cross(r2, r3));
    if (std::abs(det) < 1e-30) {
        std::vector<Vec3> tri(s.begin(), s.begin() + 3);
        return ball_from_support(tri, dim);
    }
    Vec3 c = (cross(r2, r3) * d1 + cross(r3, r1) * d2 + cross(r1, r2) * d3) / det;
    b.center = a + c;
    b.radius = norm(c);
    return b;
}

Ball welzl(std::vector<Vec3>& pts, size_t n, std::vector<Vec3>& support, int dim) {
    if (n == 0 || support.size() == static_cast<size_t>(dim) + 1)
        return ball_from_support(support, dim);
    Ball b = welzl(pts, n - 1, support, dim);
    const Vec3& p = pts[n - 1];
    if (dist(p, b.center) <= b.radius * (1.0 + 1e-12) + 1e-14) return b;
    support.push_back(p);
    b = welzl(pts, n - 1, support, dim);
    support.pop_back();
    return b;
}

}  // namespace

Ball min_enclosing_ball(std::span<const Vec3> pts, int dim) {
    std::vector<Vec3> shuffled(pts.begin(), pts.end());
    if (dim == 2)
        for (auto& p : shuffled) p.z = 0.0;
    std::mt19937 rng(12345);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::vector<Vec3> support;
    return welzl(shuffled, shuffled.size(), support, dim);
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    Vec3 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 < 1e-300) return dist(p, a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return dist(p, a + ab * t);
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Project onto the triangle plane, then classify against edges.
    Vec3 n = cross(b - a, c - a);
    double nn = norm2(n);
    if (nn < 1e-300)
        return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c),
                         point_segment_distance(p, a, c)});
    Vec3 q = p - n * (dot(p - a, n) / nn);
    // Barycentric test for the projected point.
    Vec3 v0 = b - a, v1 = c - a, v2 = q - a;
    double d00 = dot(v0, v0), d01 = dot(v0, v1), d11 = dot(v1, v1);
    double d20 = dot(v2, v0), d21 = dot(v2, v1);
    double denom = d00 * d11 - d01 * d01;
    double v = (d11 * d20 - d01 * d21) / denom;
    double w = (d00 * d21 - d01 * d20) / denom;
    if (v >= 0.0 && w >= 0.0 && v + w <= 1.0) return dist(p, q);
    return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c),
                     point_segment_distance(p, a, c)});
}

}  // namespace polyagg
