#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polyagg/graph.hpp"

namespace polyagg {

// Lloyd's algorithm with k-means++ seeding on point coordinates.
// Deterministic for a fixed seed; empty clusters are re-seeded with the point
// farthest from its current center. Requires 1 <= k <= n.
std::vector<int> kmeans(std::span<const Vec3> points, int k, std::uint64_t seed,
                        int max_iters = 100);

// Fiduccia-Mattheyses refinement of a 0/1 labeling. Moves are rolled back to
// the best prefix of each pass, so the returned cut never exceeds the input
// cut. Node-weight balance is kept within `balance_tol` of an even split
// (plus one node of slack).
std::vector<int> fm_refine(const Graph& g, std::vector<int> sides,
                           double balance_tol = 0.1, int max_passes = 10);

// Greedy bisection of a connected graph: breadth-first growth from the node
// of minimum weighted degree until half the total node weight is absorbed.
std::vector<int> greedy_grow_bisect(const Graph& g);

// Multilevel bisection: heavy-edge coarsening down to `coarse_target` nodes,
// greedy growth on the coarsest graph, FM refinement at every level on the
// way back up. Disconnected inputs bisect the largest component and park the
// remaining components on the lighter side.
std::vector<int> classic_bisect(const Graph& g, int coarse_target = 64,
                                double balance_tol = 0.1);

}  // namespace polyagg
