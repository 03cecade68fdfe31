#pragma once

#include <span>
#include <vector>

#include "polyagg/mesh.hpp"

namespace polyagg {

// Weighted undirected graph; for mesh duals one node per cell, one unit-weight
// edge per shared face. Node features mirror what the partitioners consume.
struct Graph {
    int n = 0;
    int dim = 2;
    std::vector<std::vector<std::pair<int, double>>> adj;  // (neighbor, edge weight)
    std::vector<double> node_weight;                       // cell measure; summed on coarsening
    std::vector<Vec3> centroid;
    std::vector<double> tag;  // empty when the mesh carries no physical tags

    int degree(int u) const { return static_cast<int>(adj[u].size()); }
    double weighted_degree(int u) const;
    std::vector<double> weighted_degrees() const;
    double total_volume() const;
    void add_edge(int u, int v, double w);
    bool has_tag() const { return !tag.empty(); }
};

Graph build_dual_graph(const Mesh& mesh);

// Sum of edge weights crossing between label classes, counted once per edge.
double cut_value(const Graph& g, std::span<const int> labels);

// Sum of weighted degrees over nodes with the given label.
double label_volume(const Graph& g, std::span<const int> labels, int which);

// Sum over classes of cut(S_k, complement)/vol(S_k). Empty classes are
// skipped; a zero-volume class with outgoing edges yields +inf.
double normalized_cut(const Graph& g, std::span<const int> labels, int n_classes);
double normalized_cut(const Graph& g, std::span<const int> labels);

// (vol(S_0) - vol(S_1)) / vol(V) for a 0/1 labeling.
double volume_imbalance(const Graph& g, std::span<const int> sides);

// Component id per node, ids dense and ordered by smallest member node.
std::vector<int> connected_components(const Graph& g, int* n_components = nullptr);

struct Subgraph {
    Graph graph;
    std::vector<int> to_parent;  // subgraph node -> parent node id
};

Subgraph induced_subgraph(const Graph& g, std::span<const int> nodes);

// Nodes within k edges of any seed (seeds included), ascending ids.
std::vector<int> k_hop_nodes(const Graph& g, std::span<const int> seeds, int k);

// Merge nodes sharing a label: weights and edge weights sum, centroids and
// tags average weighted by node weight, self-edges vanish.
Graph coarsen_by_labels(const Graph& g, std::span<const int> labels, int n_coarse);

struct Coarsening {
    Graph coarse;
    std::vector<int> fine_to_coarse;
};

// One round of heavy-edge matching: visit nodes by ascending weighted degree
// (ties by id), pair each unmatched node with its unmatched neighbor across
// the heaviest edge. Deterministic.
Coarsening coarsen_hem(const Graph& g);

// Pull a coarse labeling back through a coarsening map.
std::vector<int> project_labels(std::span<const int> coarse_labels,
                                std::span<const int> fine_to_coarse);

}  // namespace polyagg
