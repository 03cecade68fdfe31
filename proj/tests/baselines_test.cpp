#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "polyagg/baselines.hpp"
#include "polyagg/generate.hpp"
#include "polyagg/graph.hpp"

using namespace polyagg;

TEST_CASE("k-means separates well-spaced blobs") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> noise(0.0, 0.02);
    std::vector<Vec3> pts;
    for (int i = 0; i < 30; ++i) pts.push_back({0.2 + noise(rng), 0.2 + noise(rng), 0.0});
    for (int i = 0; i < 30; ++i) pts.push_back({0.8 + noise(rng), 0.8 + noise(rng), 0.0});
    std::vector<int> labels = kmeans(pts, 2, 1);
    std::set<int> first(labels.begin(), labels.begin() + 30);
    std::set<int> second(labels.begin() + 30, labels.end());
    CHECK(first.size() == 1);
    CHECK(second.size() == 1);
    CHECK(*first.begin() != *second.begin());
}

TEST_CASE("k-means is deterministic per seed and covers all clusters") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec3> pts(90);
    for (Vec3& p : pts) p = {u(rng), u(rng), 0.0};
    std::vector<int> a = kmeans(pts, 5, 42);
    std::vector<int> b = kmeans(pts, 5, 42);
    CHECK(a == b);
    std::set<int> used(a.begin(), a.end());
    CHECK(used.size() == 5);
    for (int l : a) CHECK((l >= 0 && l < 5));
}

TEST_CASE("classic bisection finds the optimal split of an 8x8 grid") {
    Mesh m = grid_quads(8, 8);
    Graph g = build_dual_graph(m);
    std::vector<int> labels = classic_bisect(g);
    // A straight half split cuts 8 edges; each side holds half the volume.
    CHECK(cut_value(g, labels) == doctest::Approx(8.0));
    CHECK(volume_imbalance(g, labels) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normalized_cut(g, labels) == doctest::Approx(2.0 * 8.0 / 112.0).epsilon(1e-12));
}

TEST_CASE("classic bisection parks extra components whole on the lighter side") {
    Mesh m = grid_quads(4, 4);
    Mesh sub = mesh_subset(m, {0, 1, 4, 5, 10, 11, 14, 15});  // two disjoint blocks
    Graph g = build_dual_graph(sub);
    std::vector<int> labels = classic_bisect(g);
    std::set<int> used(labels.begin(), labels.end());
    CHECK(used == std::set<int>{0, 1});
    // Only the heaviest component gets cut; the other is parked uncut, so all
    // its nodes share a label and the cut stays inside one component.
    std::vector<int> comp = connected_components(g);
    for (int u = 0; u < g.n; ++u)
        for (auto [v, w] : g.adj[u])
            if (labels[u] != labels[v]) CHECK(comp[u] == comp[0]);
    std::set<int> parked;
    for (int u = 0; u < g.n; ++u)
        if (comp[u] != comp[0]) parked.insert(labels[u]);
    CHECK(parked.size() == 1);
}

TEST_CASE("FM refinement never increases the cut") {
    std::mt19937_64 rng(7);
    Mesh m = random_delaunay(70, 5);
    Graph g = build_dual_graph(m);
    std::uniform_int_distribution<int> side(0, 1);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<int> sides(g.n);
        for (int& s : sides) s = side(rng);
        double before = cut_value(g, sides);
        std::vector<int> refined = fm_refine(g, sides);
        CHECK(cut_value(g, refined) <= before + 1e-12);
    }
}

TEST_CASE("FM incremental gains match from-scratch recomputation") {
    // fm_refine tracks the cut incrementally; sweeping over many random
    // starts, the returned labeling's recomputed cut must always agree with
    // monotone improvement, and a second pass must be idempotent or better.
    Mesh m = grid_triangles(6, 6);
    Graph g = build_dual_graph(m);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> side(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> sides(g.n);
        for (int& s : sides) s = side(rng);
        std::vector<int> once = fm_refine(g, sides);
        std::vector<int> twice = fm_refine(g, once);
        CHECK(cut_value(g, twice) <= cut_value(g, once) + 1e-12);
    }
}

TEST_CASE("greedy growth yields two connected balanced sides") {
    Mesh m = grid_quads(6, 6);
    Graph g = build_dual_graph(m);
    std::vector<int> sides = greedy_grow_bisect(g);
    double v0 = label_volume(g, sides, 0), v1 = label_volume(g, sides, 1);
    CHECK(v0 > 0.0);
    CHECK(v1 > 0.0);
    // Growth absorbs half the node weight; degree-volume split stays loose
    // but both sides must be substantial.
    CHECK(std::min(v0, v1) / (v0 + v1) > 0.3);
}
