#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "polyagg/generate.hpp"
#include "polyagg/graph.hpp"
#include "polyagg/nets.hpp"

using namespace polyagg;

namespace {

Graph permute_graph(const Graph& g, const std::vector<int>& perm) {
    // perm[old] = new id.
    Graph p;
    p.n = g.n;
    p.dim = g.dim;
    p.adj.resize(g.n);
    p.node_weight.resize(g.n);
    p.centroid.resize(g.n);
    if (g.has_tag()) p.tag.resize(g.n);
    for (int u = 0; u < g.n; ++u) {
        p.node_weight[perm[u]] = g.node_weight[u];
        p.centroid[perm[u]] = g.centroid[u];
        if (g.has_tag()) p.tag[perm[u]] = g.tag[u];
    }
    std::vector<std::tuple<int, int, double>> edges;
    for (int u = 0; u < g.n; ++u)
        for (auto [v, w] : g.adj[u])
            if (u < v) edges.emplace_back(std::min(perm[u], perm[v]),
                                          std::max(perm[u], perm[v]), w);
    std::sort(edges.begin(), edges.end());
    for (auto [u, v, w] : edges) p.add_edge(u, v, w);
    return p;
}

}  // namespace

TEST_CASE("SAGE network output is permutation equivariant") {
    Mesh mesh = random_delaunay(35, 3);
    Graph g = build_dual_graph(mesh);
    SageNet net(16, 8, 3, 2, /*seed=*/5);
    Matrix y = net.forward(g);

    std::vector<int> perm(g.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(9);
    std::shuffle(perm.begin(), perm.end(), rng);
    Graph pg = permute_graph(g, perm);
    Matrix py = net.forward(pg);

    REQUIRE(py.rows == y.rows);
    for (int u = 0; u < g.n; ++u)
        for (int c = 0; c < y.cols; ++c)
            CHECK(py(perm[u], c) == doctest::Approx(y(u, c)).epsilon(1e-9));
}

TEST_CASE("network probabilities form valid rows") {
    Mesh mesh = grid_quads(5, 5);
    Graph g = build_dual_graph(mesh);
    SageNet net(8, 8, 3, 2, 1);
    Matrix y = net.forward(g);
    REQUIRE(y.rows == g.n);
    REQUIRE(y.cols == 2);
    for (int i = 0; i < y.rows; ++i) {
        CHECK(y(i, 0) + y(i, 1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(y(i, 0) >= 0.0);
        CHECK(y(i, 1) >= 0.0);
    }
}

TEST_CASE("expected cut of a one-hot labeling equals the discrete cut") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        Mesh mesh = random_delaunay(30 + 5 * trial, 100 + trial);
        Graph g = build_dual_graph(mesh);
        std::uniform_int_distribution<int> side(0, 1);
        std::vector<int> labels(g.n);
        for (int& l : labels) l = side(rng);
        Matrix Y(g.n, 2);
        for (int u = 0; u < g.n; ++u) Y(u, labels[u]) = 1.0;

        Tape t;
        int loss = expected_nc_loss(t, t.input(Y), g);
        double expected = t.val(loss).a[0];
        double discrete = normalized_cut(g, labels);
        if (std::isfinite(discrete))
            CHECK(expected == doctest::Approx(discrete).epsilon(1e-12));
    }
}

TEST_CASE("matrix-form expected cut equals the double sum on soft labels") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Mesh mesh = random_delaunay(40, 200 + trial);
        Graph g = build_dual_graph(mesh);
        Matrix Y(g.n, 2);
        for (int i = 0; i < g.n; ++i) {
            double a = u(rng), b = u(rng);
            Y(i, 0) = a / (a + b);
            Y(i, 1) = b / (a + b);
        }
        Tape t;
        int loss = expected_nc_loss(t, t.input(Y), g);
        CHECK(t.val(loss).a[0] == doctest::Approx(expected_nc_direct(Y, g)).epsilon(1e-10));
    }
}

TEST_CASE("heterogeneity penalty vanishes when classes follow the tags") {
    Mesh mesh = with_inclusions(random_delaunay(60, 7), 2, 0.2, 3);
    Graph g = build_dual_graph(mesh);
    REQUIRE(g.has_tag());
    // Class = indicator of the majority tag: penalty is minimal when Y puts
    // tagged nodes in class 1 and the rest in class 0 (p_i = share of class-1
    // mass among tag i). Verify tape form against the direct formula instead
    // of a synthetic optimum.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix Y(g.n, 2);
    for (int i = 0; i < g.n; ++i) {
        double a = u(rng);
        Y(i, 0) = a;
        Y(i, 1) = 1.0 - a;
    }
    Tape t;
    int pen = hetero_penalty_loss(t, t.input(Y), g, 0.8);
    CHECK(t.val(pen).a[0] == doctest::Approx(hetero_penalty_direct(Y, g.tag, 0.8)).epsilon(1e-10));

    // One-hot on the tag itself: each P row pairs zero with the chosen class.
    Matrix onehot(g.n, 2);
    for (int i = 0; i < g.n; ++i) onehot(i, g.tag[i] > 0.5 ? 1 : 0) = 1.0;
    double aligned = hetero_penalty_direct(onehot, g.tag, 0.8);
    Matrix anti(g.n, 2);
    for (int i = 0; i < g.n; ++i) anti(i, g.tag[i] > 0.5 ? 0 : 1) = 1.0;
    CHECK(aligned < hetero_penalty_direct(anti, g.tag, 0.8));
}

TEST_CASE("bisect_from_probs populates both classes") {
    Matrix y(4, 2);
    y(0, 0) = 0.9;
    y(0, 1) = 0.1;
    y(1, 0) = 0.8;
    y(1, 1) = 0.2;
    y(2, 0) = 0.7;
    y(2, 1) = 0.3;
    y(3, 0) = 0.6;
    y(3, 1) = 0.4;
    std::vector<int> labels = bisect_from_probs(y);
    // All rows prefer class 0; the most confident class-1 candidate (row 3)
    // must be stolen so the bisection is non-trivial.
    CHECK(labels == std::vector<int>{0, 0, 0, 1});
}

TEST_CASE("feature matrix is normalized and tag-extended when requested") {
    Mesh mesh = with_inclusions(random_delaunay(50, 4), 2, 0.2, 9);
    Graph g = build_dual_graph(mesh);
    Matrix plain = gnn_features(g, false);
    CHECK(plain.cols == 3);
    Matrix tagged = gnn_features(g, true);
    CHECK(tagged.cols == 4);
    // Coordinates are centered and scaled to unit variance per axis.
    for (int col : {0, 1}) {
        double mean = 0.0, var = 0.0;
        for (int i = 0; i < g.n; ++i) mean += plain(i, col);
        mean /= g.n;
        for (int i = 0; i < g.n; ++i) var += (plain(i, col) - mean) * (plain(i, col) - mean);
        var /= g.n;
        CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
    }
    for (int i = 0; i < g.n; ++i) CHECK(tagged(i, 3) == doctest::Approx(g.tag[i]));
}

TEST_CASE("training reduces the loss on small meshes") {
    std::vector<Graph> dataset;
    for (int s = 0; s < 4; ++s) dataset.push_back(build_dual_graph(random_delaunay(40, 50 + s)));
    SageNet net(16, 8, 3, 2, 2);
    GnnTrainConfig cfg;
    cfg.epochs = 10;
    cfg.lr = 1e-4;
    cfg.batch = 2;
    cfg.val_fraction = 0.25;
    GnnHistory h = train_gnn(net, dataset, cfg);
    REQUIRE(h.train_loss.size() == 10);
    REQUIRE(h.val_loss.size() == 10);
    CHECK(h.train_loss.back() < h.train_loss.front());
}

TEST_CASE("rotation augmentation preserves graph structure") {
    Mesh mesh = random_delaunay(30, 6);
    Graph g = build_dual_graph(mesh);
    std::mt19937_64 rng(31);
    Graph r = rotate_graph(g, rng);
    REQUIRE(r.n == g.n);
    for (int u = 0; u < g.n; ++u) {
        CHECK(r.degree(u) == g.degree(u));
        CHECK(r.node_weight[u] == doctest::Approx(g.node_weight[u]));
    }
    // Pairwise centroid distances survive the rotation.
    for (int u = 0; u < 5; ++u)
        for (int v = u + 1; v < 5; ++v)
            CHECK(dist(r.centroid[u], r.centroid[v]) ==
                  doctest::Approx(dist(g.centroid[u], g.centroid[v])).epsilon(1e-9));
}

TEST_CASE("descriptor strings name the architecture") {
    SageNet base(64, 32, 3, 2, 0);
    CHECK(base.descriptor() == "sage-base 64 32 3 2");
    SageNet het(128, 64, 4, 2, 0, true);
    CHECK(het.descriptor() == "sage-hetero 128 64 4 2");
}
