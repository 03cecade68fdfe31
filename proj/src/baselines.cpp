#include "polyagg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

namespace polyagg {

std::vector<int> kmeans(std::span<const Vec3> points, int k, std::uint64_t seed,
                        int max_iters) {
    const int n = static_cast<int>(points.size());
    if (k < 1 || k > n) throw std::invalid_argument("kmeans: need 1 <= k <= n");
    std::mt19937_64 rng(seed);

    // k-means++ seeding.
    std::vector<Vec3> centers;
    centers.reserve(k);
    std::uniform_int_distribution<int> first(0, n - 1);
    centers.push_back(points[first(rng)]);
    std::vector<double> d2(n);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            for (const Vec3& ctr : centers) best = std::min(best, dist2(points[i], ctr));
            d2[i] = best;
            total += best;
        }
        int pick = 0;
        if (total > 0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double r = u(rng), acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = first(rng);
        }
        centers.push_back(points[pick]);
    }

    std::vector<int> labels(n, 0);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bd = dist2(points[i], centers[0]);
            for (int c = 1; c < k; ++c) {
                double d = dist2(points[i], centers[c]);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        std::vector<Vec3> sum(k);
        std::vector<int> count(k, 0);
        for (int i = 0; i < n; ++i) {
            sum[labels[i]] += points[i];
            count[labels[i]]++;
        }
        for (int c = 0; c < k; ++c) {
            if (count[c] > 0) {
                centers[c] = sum[c] / static_cast<double>(count[c]);
                continue;
            }
            // Re-seed an empty cluster with the point farthest from its center.
            int far = 0;
            double fd = -1.0;
            for (int i = 0; i < n; ++i) {
                if (count[labels[i]] <= 1) continue;  // don't empty another cluster
                double d = dist2(points[i], centers[labels[i]]);
                if (d > fd) {
                    fd = d;
                    far = i;
                }
            }
            count[labels[far]]--;
            labels[far] = c;
            count[c] = 1;
            centers[c] = points[far];
            changed = true;
        }
        if (!changed) break;
    }
    return labels;
}

namespace {

struct HeapEntry {
    double gain;
    int node;
    bool operator<(const HeapEntry& o) const {
        if (gain != o.gain) return gain < o.gain;
        return node > o.node;  // prefer the lowest id among equal gains
    }
};

}  // namespace

std::vector<int> fm_refine(const Graph& g, std::vector<int> sides, double balance_tol,
                           int max_passes) {
    const int n = g.n;
    if (n == 0) return sides;
    double total_w = 0.0, max_w = 0.0;
    for (double w : g.node_weight) {
        total_w += w;
        max_w = std::max(max_w, w);
    }
    const double cap = (1.0 + balance_tol) * 0.5 * total_w + max_w;

    for (int pass = 0; pass < max_passes; ++pass) {
        std::vector<double> side_w = {0.0, 0.0};
        for (int u = 0; u < n; ++u) side_w[sides[u]] += g.node_weight[u];

        // gain(u): cut reduction if u switches sides.
        std::vector<double> gain(n, 0.0);
        for (int u = 0; u < n; ++u)
            for (const auto& [v, w] : g.adj[u]) gain[u] += (sides[v] != sides[u]) ? w : -w;

        std::priority_queue<HeapEntry> heap;
        for (int u = 0; u < n; ++u) heap.push({gain[u], u});
        std::vector<char> locked(n, 0);

        std::vector<int> move_order;
        move_order.reserve(n);
        double delta = 0.0, best_delta = 0.0;
        int best_prefix = 0;
        std::vector<int> skipped;  // balance-blocked entries to retry later

        while (!heap.empty()) {
            auto [gval, u] = heap.top();
            heap.pop();
            if (locked[u] || gval != gain[u]) continue;  // stale entry
            int from = sides[u], to = 1 - from;
            if (side_w[to] + g.node_weight[u] > cap) {
                skipped.push_back(u);
                continue;
            }
            locked[u] = 1;
            sides[u] = to;
            side_w[from] -= g.node_weight[u];
            side_w[to] += g.node_weight[u];
            delta += gain[u];
            move_order.push_back(u);
            if (delta > best_delta) {
                best_delta = delta;
                best_prefix = static_cast<int>(move_order.size());
            }
            for (const auto& [v, w] : g.adj[u]) {
                if (locked[v]) continue;
                // u joined v's side (or left it): flip the contribution.
                gain[v] += (sides[v] == to) ? -2.0 * w : 2.0 * w;
                heap.push({gain[v], v});
            }
            for (int s : skipped)
                if (!locked[s]) heap.push({gain[s], s});
            skipped.clear();
        }

        // Roll back everything after the best prefix.
        for (int i = static_cast<int>(move_order.size()) - 1; i >= best_prefix; --i)
            sides[move_order[i]] = 1 - sides[move_order[i]];
        if (best_delta <= 0.0) break;
    }
    return sides;
}

std::vector<int> greedy_grow_bisect(const Graph& g) {
    const int n = g.n;
    std::vector<int> sides(n, 1);
    if (n <= 1) {
        if (n == 1) sides[0] = 0;
        return sides;
    }
    double total_w = std::accumulate(g.node_weight.begin(), g.node_weight.end(), 0.0);

    int seed = 0;
    double best_deg = std::numeric_limits<double>::max();
    for (int u = 0; u < n; ++u) {
        double d = g.weighted_degree(u);
        if (d < best_deg) {
            best_deg = d;
            seed = u;
        }
    }

    // Grow side 0 by strongest attachment to the growing region.
    std::vector<double> attach(n, 0.0);
    std::vector<char> in(n, 0);
    auto absorb = [&](int u) {
        in[u] = 1;
        sides[u] = 0;
        for (const auto& [v, w] : g.adj[u])
            if (!in[v]) attach[v] += w;
    };
    absorb(seed);
    double grown = g.node_weight[seed];
    while (grown < 0.5 * total_w) {
        int best = -1;
        double best_a = -1.0;
        for (int u = 0; u < n; ++u)
            if (!in[u] && attach[u] > best_a) {
                best_a = attach[u];
                best = u;
            }
        if (best == -1 || best_a <= 0.0) break;  // frontier exhausted
        absorb(best);
        grown += g.node_weight[best];
        // keep at least one node on side 1
        int remaining = 0;
        for (int u = 0; u < n; ++u)
            if (!in[u]) ++remaining;
        if (remaining == 1) break;
    }
    return sides;
}

namespace {

std::vector<int> bisect_connected(const Graph& g, int coarse_target, double balance_tol) {
    if (g.n <= 2) {
        std::vector<int> sides(g.n, 0);
        if (g.n == 2) sides[1] = 1;
        return sides;
    }
    if (g.n <= coarse_target)
        return fm_refine(g, greedy_grow_bisect(g), balance_tol);

    Coarsening c = coarsen_hem(g);
    if (c.coarse.n == g.n)  // matching made no progress; fall back to direct
        return fm_refine(g, greedy_grow_bisect(g), balance_tol);
    std::vector<int> coarse_sides = bisect_connected(c.coarse, coarse_target, balance_tol);
    std::vector<int> sides = project_labels(coarse_sides, c.fine_to_coarse);
    return fm_refine(g, std::move(sides), balance_tol);
}

}  // namespace

std::vector<int> classic_bisect(const Graph& g, int coarse_target, double balance_tol) {
    int n_comp = 0;
    auto comp = connected_components(g, &n_comp);
    if (n_comp <= 1) return bisect_connected(g, coarse_target, balance_tol);

    // Bisect the heaviest component; distribute the rest to the lighter side.
    std::vector<double> comp_w(n_comp, 0.0);
    for (int u = 0; u < g.n; ++u) comp_w[comp[u]] += g.node_weight[u];
    int heaviest = static_cast<int>(
        std::max_element(comp_w.begin(), comp_w.end()) - comp_w.begin());

    std::vector<int> nodes;
    for (int u = 0; u < g.n; ++u)
        if (comp[u] == heaviest) nodes.push_back(u);
    Subgraph s = induced_subgraph(g, nodes);
    std::vector<int> sub_sides = bisect_connected(s.graph, coarse_target, balance_tol);

    std::vector<int> sides(g.n, -1);
    std::vector<double> side_w = {0.0, 0.0};
    for (size_t i = 0; i < nodes.size(); ++i) {
        sides[nodes[i]] = sub_sides[i];
        side_w[sub_sides[i]] += g.node_weight[nodes[i]];
    }
    std::vector<int> order(n_comp);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return comp_w[a] > comp_w[b]; });
    for (int ci : order) {
        if (ci == heaviest) continue;
        int lighter = side_w[0] <= side_w[1] ? 0 : 1;
        for (int u = 0; u < g.n; ++u)
            if (comp[u] == ci) sides[u] = lighter;
        side_w[lighter] += comp_w[ci];
    }
    return sides;
}

}  // namespace polyagg
