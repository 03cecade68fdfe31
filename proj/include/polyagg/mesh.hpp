#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyagg/geometry.hpp"

namespace polyagg {

class MeshError : public std::runtime_error {
  public:
    explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

enum class CellKind { Polygon, Tetrahedron, Hexahedron, Pyramid, Polyhedron };

const char* cell_kind_name(CellKind k);

/// A cell face: `loop` keeps the vertex order it was built with, `key` is the
/// sorted copy used as the canonical identity for hashing and adjacency.
struct Face {
    std::vector<int> loop;
    std::vector<int> key;

    static Face from_loop(std::vector<int> vertices);
    bool operator==(const Face& o) const { return key == o.key; }
};

struct FaceKeyHash {
    size_t operator()(const std::vector<int>& key) const {
        size_t h = 1469598103934665603ull;
        for (int v : key) {
            h ^= static_cast<size_t>(v) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

struct Cell {
    CellKind kind = CellKind::Polygon;
    std::vector<int> vertices;  // winding order for polygons, VTK order for 3D kinds
    std::vector<Face> faces;    // edges in 2D
    // Hole boundaries of 2D agglomerated elements, one loop each. Their edges
    // are already included in `faces`.
    std::vector<std::vector<int>> hole_loops;
};

struct CellGeometry {
    Vec3 centroid;
    double measure = 0.0;
    double diameter = 0.0;
};

struct Mesh {
    int dim = 2;
    std::vector<Vec3> vertices;
    std::vector<Cell> cells;
    /// Optional per-cell physical tag (empty when the mesh is homogeneous).
    std::vector<double> tags;
    /// For agglomerated meshes: fine-cell ids merged into each element.
    std::vector<std::vector<int>> members;
    /// Geometry cache filled by merge_cells (an agglomerated element's measure
    /// is the sum of its members', which the merged cell alone cannot express
    /// once holes are involved).
    std::vector<CellGeometry> cached_geometry;

    int n_cells() const { return static_cast<int>(cells.size()); }
    int n_vertices() const { return static_cast<int>(vertices.size()); }
    bool has_tags() const { return !tags.empty(); }

    int add_vertex(const Vec3& p) {
        vertices.push_back(p);
        return n_vertices() - 1;
    }
    void add_polygon(std::vector<int> loop);
    void add_tetrahedron(const std::array<int, 4>& v);
    void add_hexahedron(const std::array<int, 8>& v);
    void add_pyramid(const std::array<int, 5>& v);
    void add_polyhedron(std::vector<std::vector<int>> face_loops);
};

/// Checks index ranges, vertex counts and tag sizes; throws MeshError.
void validate(const Mesh& mesh);

/// Measure (area/volume), centroid and diameter per cell. Degenerate cells
/// (zero measure) raise MeshError naming the cell.
std::vector<CellGeometry> compute_geometry(const Mesh& mesh);
CellGeometry cell_geometry(const Mesh& mesh, int cell_id);

/// Face-sharing adjacency lists (sorted, symmetric, no self entries), built
/// with a single face->cells map pass. A face claimed by more than two cells
/// raises MeshError.
std::vector<std::vector<int>> build_adjacency(const Mesh& mesh);

/// Merge label classes into one polytopal element each. Labels must be dense
/// 0..M-1 and every class face-connected (see split_disconnected). The result
/// carries member lists and cached geometry.
Mesh merge_cells(const Mesh& mesh, const std::vector<int>& labels);

}  // namespace polyagg
