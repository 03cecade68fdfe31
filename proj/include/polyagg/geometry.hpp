#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace polyagg {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline double dist(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline double dist2(const Vec3& a, const Vec3& b) { return norm2(a - b); }

/// Signed area of triangle (a,b,c) in the xy-plane.
inline double tri_area2d(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

/// Signed volume of tetrahedron (a,b,c,d).
inline double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return dot(b - a, cross(c - a, d - a)) / 6.0;
}

/// Convex hull of 2D points (xy components), Andrew monotone chain.
/// Returns indices into `pts` in counterclockwise order.
std::vector<int> convex_hull_2d(std::span<const Vec3> pts);

/// Largest pairwise distance. In 2D the candidate set is reduced to the
/// convex hull when the input is large; in 3D the scan is direct.
double farthest_pair_distance(std::span<const Vec3> pts, int dim);

/// Smallest enclosing ball (Welzl, move-to-front). Works in 2D (z ignored
/// when dim==2) and 3D. Returns {center, radius}.
struct Ball {
    Vec3 center;
    double radius = 0.0;
};
Ball min_enclosing_ball(std::span<const Vec3> pts, int dim);

/// Distance from point to segment [a,b].
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

/// Distance from point to triangle (a,b,c) in 3D.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace polyagg
