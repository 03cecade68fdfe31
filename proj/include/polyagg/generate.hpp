#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polyagg/mesh.hpp"

namespace polyagg {

// Structured unit-square grids; the (nx, ny) forms are the general
// rectangles, the single-argument forms the n x n squares.
Mesh grid_quads(int nx, int ny);
Mesh grid_triangles(int nx, int ny);  // each quad split along a fixed diagonal
inline Mesh structured_quads(int n) { return grid_quads(n, n); }
inline Mesh structured_triangles(int n) { return grid_triangles(n, n); }

// Bowyer-Watson triangulation of n uniform points plus the 4 unit-square
// corners; deterministic for a fixed seed.
Mesh random_delaunay(int n_points, std::uint64_t seed);

// Voronoi cells of uniform seeds clipped to the unit square, with optional
// Lloyd relaxation toward a centroidal tessellation.
Mesh random_voronoi(int n_seeds, std::uint64_t seed, int lloyd_iters = 0);

struct Circle {
    Vec3 center;
    double radius = 0.0;
};

// Tag cells 1.0 whose centroid falls inside one of n non-overlapping equal
// circles jointly covering `coverage` of the unit area; others 0.0.
Mesh with_inclusions(Mesh base, int n_circles, double coverage, std::uint64_t seed);

// Remove cells whose centroid lies in any circle, then keep the largest
// face-connected component.
Mesh with_holes(const Mesh& base, const std::vector<Circle>& circles);

// Cells cell_ids of the mesh, with vertices reindexed.
Mesh mesh_subset(const Mesh& mesh, const std::vector<int>& cell_ids);

// n x n x n unit-cube grids: hexahedra, or six tetrahedra per hex (uniform
// split; shared-face diagonals agree between neighbors).
Mesh cube_hexes(int n);
Mesh cube_tets(int n);

// Cells of cube_tets(n) inside a random axis-aligned sub-box, largest
// component kept.
Mesh cube_portion(std::uint64_t seed, int n = 8);

struct DatasetSpec {
    // generator kind -> sample count; kinds: structured_quads,
    // structured_triangles, random_delaunay, random_voronoi, holes,
    // inclusions, cube_tets, cube_portion
    std::map<std::string, int> counts;
    std::uint64_t master_seed = 0;

    int structured_n = 14;
    int delaunay_points = 110;
    int voronoi_seeds = 200;
    int voronoi_lloyd = 2;
    int inclusion_circles = 4;
    double inclusion_coverage = 0.15;
    int cube_n = 4;
    int portion_n = 8;
};

struct DatasetEntry {
    std::string kind;
    std::uint64_t seed = 0;
    int cells = 0;
    std::string mesh_path;
    std::string graph_path;
};

// One mesh of the named kind, with the kind's derived seeding.
Mesh generate_kind(const std::string& kind, const DatasetSpec& spec, std::uint64_t seed);

// Generate every requested sample, write mesh + pre-extracted graph cache,
// and an index file (kind, seed, cell count, paths; tab-separated).
std::vector<DatasetEntry> build_dataset(const DatasetSpec& spec, const std::string& out_dir);

}  // namespace polyagg
