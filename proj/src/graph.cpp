#include "polyagg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace polyagg {

double Graph::weighted_degree(int u) const {
    double d = 0.0;
    for (const auto& [v, w] : adj[u]) d += w;
    return d;
}

std::vector<double> Graph::weighted_degrees() const {
    std::vector<double> d(n);
    for (int u = 0; u < n; ++u) d[u] = weighted_degree(u);
    return d;
}

double Graph::total_volume() const {
    double s = 0.0;
    for (int u = 0; u < n; ++u) s += weighted_degree(u);
    return s;
}

void Graph::add_edge(int u, int v, double w) {
    adj[u].emplace_back(v, w);
    adj[v].emplace_back(u, w);
}

Graph build_dual_graph(const Mesh& mesh) {
    Graph g;
    g.n = mesh.n_cells();
    g.dim = mesh.dim;
    g.adj.resize(g.n);
    auto geo = compute_geometry(mesh);
    g.node_weight.resize(g.n);
    g.centroid.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        g.node_weight[i] = geo[i].measure;
        g.centroid[i] = geo[i].centroid;
    }
    if (mesh.has_tags()) g.tag = mesh.tags;
    auto adj = build_adjacency(mesh);
    for (int u = 0; u < g.n; ++u)
        for (int v : adj[u])
            if (v > u) g.add_edge(u, v, 1.0);
    for (auto& row : g.adj)
        std::sort(row.begin(), row.end());
    return g;
}

double cut_value(const Graph& g, std::span<const int> labels) {
    double cut = 0.0;
    for (int u = 0; u < g.n; ++u)
        for (const auto& [v, w] : g.adj[u])
            if (u < v && labels[u] != labels[v]) cut += w;
    return cut;
}

double label_volume(const Graph& g, std::span<const int> labels, int which) {
    double vol = 0.0;
    for (int u = 0; u < g.n; ++u)
        if (labels[u] == which) vol += g.weighted_degree(u);
    return vol;
}

double normalized_cut(const Graph& g, std::span<const int> labels, int n_classes) {
    std::vector<double> cut(n_classes, 0.0), vol(n_classes, 0.0);
    for (int u = 0; u < g.n; ++u) {
        for (const auto& [v, w] : g.adj[u]) {
            vol[labels[u]] += w;
            if (labels[v] != labels[u]) cut[labels[u]] += w;
        }
    }
    double nc = 0.0;
    for (int k = 0; k < n_classes; ++k) {
        if (vol[k] == 0.0) {
            if (cut[k] > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        nc += cut[k] / vol[k];
    }
    return nc;
}

double normalized_cut(const Graph& g, std::span<const int> labels) {
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    return normalized_cut(g, labels, k);
}

double volume_imbalance(const Graph& g, std::span<const int> sides) {
    double v0 = 0.0, v1 = 0.0, tot = 0.0;
    for (int u = 0; u < g.n; ++u) {
        double d = g.weighted_degree(u);
        tot += d;
        (sides[u] == 0 ? v0 : v1) += d;
    }
    return tot > 0 ? (v0 - v1) / tot : 0.0;
}

std::vector<int> connected_components(const Graph& g, int* n_components) {
    std::vector<int> comp(g.n, -1);
    int next = 0;
    std::vector<int> stack;
    for (int s = 0; s < g.n; ++s) {
        if (comp[s] != -1) continue;
        comp[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (const auto& [v, w] : g.adj[u])
                if (comp[v] == -1) {
                    comp[v] = next;
                    stack.push_back(v);
                }
        }
        ++next;
    }
    if (n_components) *n_components = next;
    return comp;
}

Subgraph induced_subgraph(const Graph& g, std::span<const int> nodes) {
    Subgraph s;
    s.to_parent.assign(nodes.begin(), nodes.end());
    std::vector<int> local(g.n, -1);
    for (size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<int>(i);
    Graph& sub = s.graph;
    sub.n = static_cast<int>(nodes.size());
    sub.dim = g.dim;
    sub.adj.resize(sub.n);
    sub.node_weight.resize(sub.n);
    sub.centroid.resize(sub.n);
    if (g.has_tag()) sub.tag.resize(sub.n);
    for (int i = 0; i < sub.n; ++i) {
        int u = nodes[i];
        sub.node_weight[i] = g.node_weight[u];
        sub.centroid[i] = g.centroid[u];
        if (g.has_tag()) sub.tag[i] = g.tag[u];
        for (const auto& [v, w] : g.adj[u])
            if (local[v] != -1) sub.adj[i].emplace_back(local[v], w);
    }
    return s;
}

std::vector<int> k_hop_nodes(const Graph& g, std::span<const int> seeds, int k) {
    std::vector<int> dist(g.n, -1);
    std::vector<int> frontier;
    for (int s : seeds)
        if (dist[s] == -1) {
            dist[s] = 0;
            frontier.push_back(s);
        }
    for (int level = 0; level < k && !frontier.empty(); ++level) {
        std::vector<int> next;
        for (int u : frontier)
            for (const auto& [v, w] : g.adj[u])
                if (dist[v] == -1) {
                    dist[v] = level + 1;
                    next.push_back(v);
                }
        frontier = std::move(next);
    }
    std::vector<int> out;
    for (int u = 0; u < g.n; ++u)
        if (dist[u] != -1) out.push_back(u);
    return out;
}

Graph coarsen_by_labels(const Graph& g, std::span<const int> labels, int n_coarse) {
    Graph c;
    c.n = n_coarse;
    c.dim = g.dim;
    c.adj.resize(n_coarse);
    c.node_weight.assign(n_coarse, 0.0);
    c.centroid.assign(n_coarse, Vec3{});
    if (g.has_tag()) c.tag.assign(n_coarse, 0.0);
    for (int u = 0; u < g.n; ++u) {
        int cu = labels[u];
        c.node_weight[cu] += g.node_weight[u];
        c.centroid[cu] += g.centroid[u] * g.node_weight[u];
        if (g.has_tag()) c.tag[cu] += g.tag[u] * g.node_weight[u];
    }
    for (int u = 0; u < n_coarse; ++u) {
        if (c.node_weight[u] > 0) {
            c.centroid[u] = c.centroid[u] / c.node_weight[u];
            if (g.has_tag()) c.tag[u] /= c.node_weight[u];
        }
    }
    std::unordered_map<long long, double> edge;
    for (int u = 0; u < g.n; ++u)
        for (const auto& [v, w] : g.adj[u]) {
            int cu = labels[u], cv = labels[v];
            if (cu >= cv) continue;  // each coarse pair once; drops self-edges
            edge[static_cast<long long>(cu) * n_coarse + cv] += w;
        }
    for (const auto& [key, w] : edge)
        c.add_edge(static_cast<int>(key / n_coarse), static_cast<int>(key % n_coarse), w);
    for (auto& row : c.adj) std::sort(row.begin(), row.end());
    return c;
}

Coarsening coarsen_hem(const Graph& g) {
    std::vector<int> order(g.n);
    std::iota(order.begin(), order.end(), 0);
    auto deg = g.weighted_degrees();
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return deg[a] < deg[b]; });
    std::vector<int> match(g.n, -1);
    Coarsening out;
    out.fine_to_coarse.assign(g.n, -1);
    int next = 0;
    for (int u : order) {
        if (match[u] != -1) continue;
        int best = -1;
        double best_w = -1.0;
        for (const auto& [v, w] : g.adj[u]) {
            if (v == u || match[v] != -1) continue;
            if (w > best_w || (w == best_w && (best == -1 || v < best))) {
                best = v;
                best_w = w;
            }
        }
        match[u] = u;
        out.fine_to_coarse[u] = next;
        if (best != -1) {
            match[best] = u;
            out.fine_to_coarse[best] = next;
        }
        ++next;
    }
    out.coarse = coarsen_by_labels(g, out.fine_to_coarse, next);
    return out;
}

std::vector<int> project_labels(std::span<const int> coarse_labels,
                                std::span<const int> fine_to_coarse) {
    std::vector<int> fine(fine_to_coarse.size());
    for (size_t i = 0; i < fine_to_coarse.size(); ++i)
        fine[i] = coarse_labels[fine_to_coarse[i]];
    return fine;
}

}  // namespace polyagg
