#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "polyagg/generate.hpp"
#include "polyagg/graph.hpp"
#include "polyagg/mesh.hpp"
#include "polyagg/partition.hpp"

using namespace polyagg;

TEST_CASE("validate accepts every generator output") {
    DatasetSpec spec;
    spec.structured_n = 6;
    spec.delaunay_points = 40;
    spec.voronoi_seeds = 30;
    spec.cube_n = 2;
    spec.portion_n = 4;
    for (const char* kind :
         {"structured_quads", "structured_triangles", "random_delaunay", "random_voronoi",
          "holes", "inclusions", "cube_tets", "cube_hexes", "cube_portion"}) {
        Mesh m = generate_kind(kind, spec, 3);
        CHECK_NOTHROW(validate(m));
        CHECK(m.n_cells() > 0);
    }
}

TEST_CASE("validate rejects broken meshes") {
    Mesh m;
    m.add_vertex({0, 0, 0});
    m.add_vertex({1, 0, 0});
    m.add_vertex({1, 1, 0});
    m.add_polygon({0, 1, 2});

    SUBCASE("vertex id out of range") {
        m.cells[0].vertices[0] = 7;
        CHECK_THROWS_AS(validate(m), MeshError);
    }
    SUBCASE("duplicate vertex in a loop") {
        m.cells[0].vertices = {0, 1, 1};
        CHECK_THROWS_AS(validate(m), MeshError);
    }
    SUBCASE("tag array of wrong length") {
        m.tags = {1.0, 2.0};
        CHECK_THROWS_AS(validate(m), MeshError);
    }
    SUBCASE("polygon with too few vertices") {
        m.cells[0].vertices = {0, 1};
        CHECK_THROWS_AS(validate(m), MeshError);
    }
}

TEST_CASE("merge conserves measure exactly") {
    Mesh m = random_delaunay(60, 17);
    // Label by centroid quadrant, then split disconnected classes.
    std::vector<CellGeometry> geo = compute_geometry(m);
    std::vector<int> labels(m.n_cells());
    for (int c = 0; c < m.n_cells(); ++c)
        labels[c] = (geo[c].centroid.x > 0.5 ? 1 : 0) + (geo[c].centroid.y > 0.5 ? 2 : 0);
    labels = split_disconnected(build_dual_graph(m), labels);

    Mesh merged = merge_cells(m, labels);
    double fine_total = 0.0, merged_total = 0.0;
    for (const CellGeometry& cg : geo) fine_total += cg.measure;
    REQUIRE(static_cast<int>(merged.cached_geometry.size()) == merged.n_cells());
    for (int e = 0; e < merged.n_cells(); ++e) {
        double member_sum = 0.0;
        for (int c : merged.members[e]) member_sum += geo[c].measure;
        CHECK(merged.cached_geometry[e].measure == doctest::Approx(member_sum).epsilon(1e-12));
        merged_total += merged.cached_geometry[e].measure;
    }
    CHECK(merged_total == doctest::Approx(fine_total).epsilon(1e-12));
}

TEST_CASE("two tetrahedra merge into a six-face polyhedron") {
    Mesh m;
    m.dim = 3;
    m.add_vertex({0, 0, 0});
    m.add_vertex({1, 0, 0});
    m.add_vertex({0, 1, 0});
    m.add_vertex({0, 0, 1});
    m.add_vertex({1, 1, 1});
    m.add_tetrahedron({0, 1, 2, 3});
    m.add_tetrahedron({1, 2, 3, 4});
    Mesh merged = merge_cells(m, {0, 0});
    REQUIRE(merged.n_cells() == 1);
    CHECK(merged.cells[0].kind == CellKind::Polyhedron);
    CHECK(merged.cells[0].faces.size() == 6);  // 8 triangles minus the shared one twice
    CHECK(merged.cached_geometry[0].measure ==
          doctest::Approx(cell_geometry(m, 0).measure + cell_geometry(m, 1).measure)
              .epsilon(1e-12));
}

TEST_CASE("ring agglomerate records its hole") {
    Mesh m = grid_quads(3, 3);
    // Center cell (index 4) alone; the eight surrounding cells form a ring.
    std::vector<int> labels{0, 0, 0, 0, 1, 0, 0, 0, 0};
    Mesh merged = merge_cells(m, labels);
    REQUIRE(merged.n_cells() == 2);
    CHECK(merged.cells[0].hole_loops.size() == 1);
    CHECK(merged.cells[0].hole_loops[0].size() == 4);
    CHECK(merged.cells[1].hole_loops.empty());
    CHECK(merged.cached_geometry[0].measure == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK_NOTHROW(validate(merged));
}

TEST_CASE("merged 3D block drops interior vertices") {
    Mesh m = cube_hexes(2);
    Mesh merged = merge_cells(m, std::vector<int>(8, 0));
    REQUIRE(merged.n_cells() == 1);
    // The 3x3x3 lattice has 27 vertices; the center one is interior.
    std::set<int> verts(merged.cells[0].vertices.begin(), merged.cells[0].vertices.end());
    CHECK(verts.size() == 26);
    CHECK(merged.cells[0].faces.size() == 24);  // 4 quads per cube side
    CHECK(merged.cached_geometry[0].measure == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(merged.cached_geometry[0].diameter == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("adjacency rejects over-shared faces") {
    Mesh m;
    m.add_vertex({0, 0, 0});
    m.add_vertex({1, 0, 0});
    m.add_vertex({0.5, 1, 0});
    m.add_vertex({0.5, -1, 0});
    m.add_vertex({0.5, 2, 0});
    m.add_polygon({0, 1, 2});
    m.add_polygon({0, 3, 1});
    m.add_polygon({0, 1, 4});  // third cell claiming edge (0,1)
    CHECK_THROWS_AS(build_adjacency(m), MeshError);
}

TEST_CASE("mesh subset keeps geometry of the kept cells") {
    Mesh m = grid_quads(4, 4);
    std::vector<int> keep{0, 1, 5, 6};
    Mesh sub = mesh_subset(m, keep);
    REQUIRE(sub.n_cells() == 4);
    for (int i = 0; i < 4; ++i) {
        CellGeometry a = cell_geometry(sub, i);
        CellGeometry b = cell_geometry(m, keep[i]);
        CHECK(a.measure == doctest::Approx(b.measure).epsilon(1e-12));
        CHECK(a.centroid.x == doctest::Approx(b.centroid.x).epsilon(1e-12));
        CHECK(a.centroid.y == doctest::Approx(b.centroid.y).epsilon(1e-12));
    }
    CHECK_NOTHROW(validate(sub));
}
