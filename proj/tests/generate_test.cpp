#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "polyagg/generate.hpp"
#include "polyagg/graph.hpp"
#include "polyagg/io.hpp"
#include "polyagg/mesh.hpp"

using namespace polyagg;
namespace fs = std::filesystem;

TEST_CASE("generators are deterministic per seed") {
    for (const char* kind : {"random_delaunay", "random_voronoi", "holes", "cube_portion"}) {
        DatasetSpec spec;
        spec.delaunay_points = 50;
        spec.voronoi_seeds = 40;
        spec.portion_n = 4;
        Mesh a = generate_kind(kind, spec, 77);
        Mesh b = generate_kind(kind, spec, 77);
        Mesh c = generate_kind(kind, spec, 78);
        REQUIRE(a.n_cells() == b.n_cells());
        REQUIRE(a.n_vertices() == b.n_vertices());
        bool same = true;
        for (int v = 0; v < a.n_vertices(); ++v)
            if (dist(a.vertices[v], b.vertices[v]) != 0.0) same = false;
        CHECK(same);
        bool differs = c.n_vertices() != a.n_vertices();
        for (int v = 0; !differs && v < a.n_vertices(); ++v)
            if (dist(a.vertices[v], c.vertices[v]) != 0.0) differs = true;
        CHECK(differs);
    }
}

TEST_CASE("structured grids have the expected cell counts") {
    CHECK(grid_quads(5, 7).n_cells() == 35);
    CHECK(grid_triangles(4, 4).n_cells() == 32);
    CHECK(cube_hexes(3).n_cells() == 27);
    CHECK(cube_tets(2).n_cells() == 8 * 6);
}

TEST_CASE("delaunay and voronoi tile the unit square") {
    for (int seed : {1, 2}) {
        Mesh d = random_delaunay(80, seed);
        double area = 0.0;
        for (const CellGeometry& cg : compute_geometry(d)) area += cg.measure;
        CHECK(area == doctest::Approx(1.0).epsilon(1e-9));

        Mesh v = random_voronoi(60, seed, 1);
        area = 0.0;
        for (const CellGeometry& cg : compute_geometry(v)) area += cg.measure;
        CHECK(area == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("hole meshes lose area and stay valid") {
    DatasetSpec spec;
    spec.voronoi_seeds = 80;
    Mesh m = generate_kind("holes", spec, 5);
    CHECK_NOTHROW(validate(m));
    double area = 0.0;
    for (const CellGeometry& cg : compute_geometry(m)) area += cg.measure;
    CHECK(area < 1.0 - 1e-4);
    int n_comp = 0;
    connected_components(build_dual_graph(m), &n_comp);
    CHECK(n_comp == 1);
}

TEST_CASE("inclusion meshes carry at least two tags") {
    DatasetSpec spec;
    spec.delaunay_points = 90;
    Mesh m = generate_kind("inclusions", spec, 4);
    REQUIRE(m.has_tags());
    std::set<double> tags(m.tags.begin(), m.tags.end());
    CHECK(tags.size() >= 2);
    CHECK_NOTHROW(validate(m));
}

TEST_CASE("cube portion is connected") {
    DatasetSpec spec;
    spec.portion_n = 5;
    Mesh m = generate_kind("cube_portion", spec, 13);
    CHECK(m.dim == 3);
    int n_comp = 0;
    connected_components(build_dual_graph(m), &n_comp);
    CHECK(n_comp == 1);
}

TEST_CASE("unknown kind is rejected") {
    DatasetSpec spec;
    CHECK_THROWS(generate_kind("icosahedra", spec, 1));
}

TEST_CASE("build_dataset writes meshes, graph caches, and a round-tripping index") {
    fs::path dir = fs::temp_directory_path() / "polyagg_dataset_test";
    fs::remove_all(dir);
    DatasetSpec spec;
    spec.counts["structured_quads"] = 2;
    spec.counts["random_delaunay"] = 1;
    spec.structured_n = 5;
    spec.delaunay_points = 30;
    spec.master_seed = 3;
    std::vector<DatasetEntry> entries = build_dataset(spec, dir.string());
    REQUIRE(entries.size() == 3);

    std::vector<DatasetEntry> reread = read_dataset_index((dir / "index.tsv").string());
    REQUIRE(reread.size() == entries.size());
    for (size_t i = 0; i < entries.size(); ++i) {
        CHECK(reread[i].kind == entries[i].kind);
        CHECK(reread[i].seed == entries[i].seed);
        CHECK(reread[i].cells == entries[i].cells);
        Mesh m = read_mesh(reread[i].mesh_path);
        CHECK(m.n_cells() == reread[i].cells);
        Graph cached = read_graph_cache(reread[i].graph_path);
        Graph fresh = build_dual_graph(m);
        REQUIRE(cached.n == fresh.n);
        for (int u = 0; u < cached.n; ++u) CHECK(cached.adj[u] == fresh.adj[u]);
    }
    fs::remove_all(dir);
}
