#include "polyagg/partition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <map>
#include <numeric>
#include <stdexcept>

namespace polyagg {

namespace {

// Eigen-decomposition of a small symmetric matrix (dim 2 closed form, dim 3
// cyclic Jacobi). Rows of `vecs` are eigenvectors, sorted by descending
// eigenvalue, sign-fixed so the largest-magnitude component is positive.
void eigen_sym(double A[3][3], int d, double vals[3], double vecs[3][3]) {
    if (d == 2) {
        double cxx = A[0][0], cyy = A[1][1], cxy = A[0][1];
        double theta = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);
        double c = std::cos(theta), s = std::sin(theta);
        double l1 = c * c * cxx + 2 * c * s * cxy + s * s * cyy;
        double l2 = s * s * cxx - 2 * c * s * cxy + c * c * cyy;
        vals[0] = l1;
        vals[1] = l2;
        vecs[0][0] = c;
        vecs[0][1] = s;
        vecs[1][0] = -s;
        vecs[1][1] = c;
    } else {
        double V[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        for (int sweep = 0; sweep < 64; ++sweep) {
            double off = std::abs(A[0][1]) + std::abs(A[0][2]) + std::abs(A[1][2]);
            if (off < 1e-15) break;
            for (int p = 0; p < 2; ++p)
                for (int q = p + 1; q < 3; ++q) {
                    if (std::abs(A[p][q]) < 1e-18) continue;
                    double phi = 0.5 * std::atan2(2.0 * A[p][q], A[q][q] - A[p][p]);
                    double c = std::cos(phi), s = std::sin(phi);
                    for (int k = 0; k < 3; ++k) {
                        double akp = A[k][p], akq = A[k][q];
                        A[k][p] = c * akp - s * akq;
                        A[k][q] = s * akp + c * akq;
                    }
                    for (int k = 0; k < 3; ++k) {
                        double apk = A[p][k], aqk = A[q][k];
                        A[p][k] = c * apk - s * aqk;
                        A[q][k] = s * apk + c * aqk;
                    }
                    for (int k = 0; k < 3; ++k) {
                        double vkp = V[k][p], vkq = V[k][q];
                        V[k][p] = c * vkp - s * vkq;
                        V[k][q] = s * vkp + c * vkq;
                    }
                }
        }
        int order[3] = {0, 1, 2};
        double diag[3] = {A[0][0], A[1][1], A[2][2]};
        std::sort(order, order + 3, [&](int a, int b) { return diag[a] > diag[b]; });
        for (int i = 0; i < 3; ++i) {
            vals[i] = diag[order[i]];
            for (int k = 0; k < 3; ++k) vecs[i][k] = V[k][order[i]];
        }
    }
    for (int i = 0; i < d; ++i) {
        int big = 0;
        for (int k = 1; k < d; ++k)
            if (std::abs(vecs[i][k]) > std::abs(vecs[i][big])) big = k;
        if (vecs[i][big] < 0)
            for (int k = 0; k < d; ++k) vecs[i][k] = -vecs[i][k];
    }
}

}  // namespace

Matrix normalize_features(const Graph& g) {
    const int n = g.n, d = g.dim;
    Matrix out(n, d + 1);
    double wsum = std::accumulate(g.node_weight.begin(), g.node_weight.end(), 0.0);
    for (int i = 0; i < n; ++i)
        out(i, d) = wsum > 0 ? g.node_weight[i] / wsum : 1.0 / n;

    Vec3 mean;
    for (const Vec3& p : g.centroid) mean += p;
    mean = mean / static_cast<double>(n);
    std::vector<Vec3> c(n);
    for (int i = 0; i < n; ++i) c[i] = g.centroid[i] - mean;
    if (n == 1) return out;  // centered only

    double C[3][3] = {};
    for (const Vec3& p : c)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) C[a][b] += p[a] * p[b];
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) C[a][b] /= n;

    double vals[3], vecs[3][3];
    eigen_sym(C, d, vals, vecs);

    for (int i = 0; i < n; ++i)
        for (int a = 0; a < d; ++a) {
            double v = 0.0;
            for (int b = 0; b < d; ++b) v += vecs[a][b] * c[i][b];
            out(i, a) = v;
        }
    for (int a = 0; a < d; ++a) {
        double var = 0.0;
        for (int i = 0; i < n; ++i) var += out(i, a) * out(i, a);
        var /= n;
        if (var > 1e-24) {
            double inv = 1.0 / std::sqrt(var);
            for (int i = 0; i < n; ++i) out(i, a) *= inv;
        }
    }
    return out;
}

std::vector<int> KmeansModel::bisect_graph(const Graph& g) const {
    if (g.n == 1) return {0};
    return kmeans(g.centroid, 2, seed_);
}

std::vector<int> KmeansModel::kway_graph(const Graph& g, int k) const {
    if (k > g.n) throw std::invalid_argument("kmeans: k exceeds node count");
    return kmeans(g.centroid, k, seed_);
}

std::vector<int> GnnModel::bisect_graph(const Graph& g) const {
    if (g.n == 1) return {0};
    if (net_->hetero) {
        bool uniform = true;
        if (g.has_tag()) {
            bool first = g.tag[0] >= 0.5;
            for (double p : g.tag)
                if ((p >= 0.5) != first) {
                    uniform = false;
                    break;
                }
        }
        // A part with a single physical group carries no tag signal; fall
        // back to k-means on centroids there.
        if (uniform) return kmeans(g.centroid, 2, kmeans_seed_);
    }
    return bisect_from_probs(net_->forward(g));
}

std::vector<int> FmRefiner::refine(const Graph& g, std::vector<int> sides) const {
    std::vector<int> out = fm_refine(g, sides, balance_tol_);
    if (refine_objective(g, out, b_) <= refine_objective(g, sides, b_)) return out;
    return sides;
}

double region_diameter(const Mesh& mesh, std::span<const int> cell_ids) {
    std::vector<char> seen(mesh.n_vertices(), 0);
    std::vector<Vec3> pts;
    for (int ci : cell_ids)
        for (int v : mesh.cells[ci].vertices)
            if (!seen[v]) {
                seen[v] = 1;
                pts.push_back(mesh.vertices[v]);
            }
    return farthest_pair_distance(pts, mesh.dim);
}

namespace {

std::vector<int> proper_bisect(const BisectionModel& model, const Graph& g, bool* proper) {
    std::vector<int> sides = model.bisect_graph(g);
    int c0 = 0, c1 = 0;
    for (int s : sides) (s == 0 ? c0 : c1)++;
    *proper = c0 > 0 && c1 > 0;
    return sides;
}

void warn_improper(const char* where) {
    std::cerr << "warning: " << where << ": model returned an empty side; part kept as-is\n";
}

std::vector<int> labels_from_parts(int n, const std::vector<std::vector<int>>& parts) {
    std::vector<int> labels(n, -1);
    for (size_t p = 0; p < parts.size(); ++p)
        for (int u : parts[p]) labels[u] = static_cast<int>(p);
    return labels;
}

}  // namespace

std::vector<int> bisect_nref(const Graph& g, const BisectionModel& model, int nref,
                             std::vector<std::vector<int>>* hierarchy) {
    if (nref < 1) throw std::invalid_argument("bisect_nref: nref must be >= 1");
    std::vector<std::vector<int>> parts(1);
    parts[0].resize(g.n);
    std::iota(parts[0].begin(), parts[0].end(), 0);

    for (int level = 0; level < nref; ++level) {
        std::vector<std::vector<int>> next;
        next.reserve(parts.size() * 2);
        for (auto& part : parts) {
            if (part.size() <= 1) {
                next.push_back(std::move(part));
                continue;
            }
            Subgraph sub = induced_subgraph(g, part);
            bool proper = false;
            std::vector<int> sides = proper_bisect(model, sub.graph, &proper);
            if (!proper) {
                warn_improper("bisect_nref");
                next.push_back(std::move(part));
                continue;
            }
            std::vector<int> half[2];
            for (size_t i = 0; i < part.size(); ++i) half[sides[i]].push_back(part[i]);
            next.push_back(std::move(half[0]));
            next.push_back(std::move(half[1]));
        }
        parts = std::move(next);
        if (hierarchy) hierarchy->push_back(labels_from_parts(g.n, parts));
    }
    return labels_from_parts(g.n, parts);
}

namespace {

// Shared worklist for mult_factor/target_size; cell_of maps graph nodes to
// mesh cell ids (identity when empty).
std::vector<int> bisect_to_diameter(const Mesh& mesh, const Graph& g,
                                    const BisectionModel& model, double hhat,
                                    std::span<const int> cell_of) {
    auto cells_of_part = [&](const std::vector<int>& part) {
        std::vector<int> cells;
        cells.reserve(part.size());
        for (int u : part) cells.push_back(cell_of.empty() ? u : cell_of[u]);
        return cells;
    };
    std::deque<std::vector<int>> work;
    std::vector<std::vector<int>> final_parts;
    {
        std::vector<int> all(g.n);
        std::iota(all.begin(), all.end(), 0);
        work.push_back(std::move(all));
    }
    while (!work.empty()) {
        std::vector<int> part = std::move(work.front());
        work.pop_front();
        if (part.size() <= 1) {
            final_parts.push_back(std::move(part));
            continue;
        }
        if (region_diameter(mesh, cells_of_part(part)) <= hhat) {
            final_parts.push_back(std::move(part));
            continue;
        }
        Subgraph sub = induced_subgraph(g, part);
        bool proper = false;
        std::vector<int> sides = proper_bisect(model, sub.graph, &proper);
        if (!proper) {
            warn_improper("bisect_mult_factor");
            final_parts.push_back(std::move(part));
            continue;
        }
        std::vector<int> half[2];
        for (size_t i = 0; i < part.size(); ++i) half[sides[i]].push_back(part[i]);
        work.push_back(std::move(half[0]));
        work.push_back(std::move(half[1]));
    }
    return labels_from_parts(g.n, final_parts);
}

}  // namespace

std::vector<int> bisect_mult_factor(const Mesh& mesh, const Graph& g,
                                    const BisectionModel& model, double mult_factor) {
    if (!(mult_factor > 0.0 && mult_factor < 1.0))
        throw std::invalid_argument("mult_factor must lie in (0,1)");
    std::vector<int> all(g.n);
    std::iota(all.begin(), all.end(), 0);
    double hhat = mult_factor * region_diameter(mesh, all);  // fixed once at entry
    return bisect_to_diameter(mesh, g, model, hhat, {});
}

std::vector<int> bisect_target_size(const Mesh& mesh, const Graph& g,
                                    const BisectionModel& model, double target) {
    if (target <= 0.0) throw std::invalid_argument("target size must be positive");
    return bisect_to_diameter(mesh, g, model, target, {});
}

std::vector<int> segregated(const Mesh& mesh, const BisectionModel& model,
                            double mult_factor) {
    if (!mesh.has_tags()) throw MeshError("segregated mode requires physical tags");
    if (!(mult_factor > 0.0 && mult_factor < 1.0))
        throw std::invalid_argument("mult_factor must lie in (0,1)");
    Graph g = model.get_graph(mesh);

    std::map<double, std::vector<int>> groups;  // tag value -> cells, ordered
    for (int i = 0; i < mesh.n_cells(); ++i) groups[mesh.tags[i]].push_back(i);

    std::vector<int> labels(mesh.n_cells(), -1);
    int offset = 0;
    for (const auto& [tag, cells] : groups) {
        Subgraph sub = induced_subgraph(g, cells);
        double hhat = mult_factor * region_diameter(mesh, cells);
        std::vector<int> part =
            bisect_to_diameter(mesh, sub.graph, model, hhat, sub.to_parent);
        int max_label = 0;
        for (size_t i = 0; i < cells.size(); ++i) {
            labels[cells[i]] = offset + part[i];
            max_label = std::max(max_label, part[i]);
        }
        offset += max_label + 1;
    }
    return labels;
}

std::vector<int> multilevel_bisect(const Graph& g, const BisectionModel& coarse_model,
                                   const Refiner& refiner, int threshold) {
    if (threshold < 2) throw std::invalid_argument("multilevel threshold must be >= 2");
    std::deque<Coarsening> levels;
    const Graph* cur = &g;
    while (cur->n > threshold) {
        Coarsening c = coarsen_hem(*cur);
        if (c.coarse.n == cur->n) break;  // no edges left to contract
        levels.push_back(std::move(c));
        cur = &levels.back().coarse;
    }
    std::vector<int> sides = coarse_model.bisect_graph(*cur);
    for (int i = static_cast<int>(levels.size()) - 1; i >= 0; --i) {
        sides = project_labels(sides, levels[i].fine_to_coarse);
        const Graph& fine = i == 0 ? g : levels[i - 1].coarse;
        double projected_nc = normalized_cut(fine, sides, 2);
        std::vector<int> refined = refiner.refine(fine, sides);
        if (normalized_cut(fine, refined, 2) <= projected_nc) sides = std::move(refined);
    }
    return sides;
}

std::vector<int> split_disconnected(const Graph& g, std::vector<int> labels) {
    int M = 0;
    for (int l : labels) M = std::max(M, l + 1);
    std::vector<std::vector<int>> classes(M);
    for (int u = 0; u < g.n; ++u) classes[labels[u]].push_back(u);

    std::vector<int> out(g.n, -1);
    int next = 0;
    std::vector<int> stack;
    for (int l = 0; l < M; ++l) {
        for (int s : classes[l]) {
            if (out[s] != -1) continue;
            out[s] = next;
            stack.push_back(s);
            while (!stack.empty()) {
                int u = stack.back();
                stack.pop_back();
                for (const auto& [v, w] : g.adj[u])
                    if (labels[v] == l && out[v] == -1) {
                        out[v] = next;
                        stack.push_back(v);
                    }
            }
            ++next;
        }
    }
    return out;
}

namespace {

std::vector<int> kway_labels(const Graph& g, const BisectionModel& model, int k) {
    if (k < 1) throw std::invalid_argument("kway: k must be >= 1");
    if (k > g.n) throw std::invalid_argument("kway: k exceeds cell count");
    std::vector<int> direct = model.kway_graph(g, k);
    if (!direct.empty()) return direct;

    std::vector<std::vector<int>> parts(1);
    parts[0].resize(g.n);
    std::iota(parts[0].begin(), parts[0].end(), 0);
    while (static_cast<int>(parts.size()) < k) {
        size_t biggest = 0;
        for (size_t p = 1; p < parts.size(); ++p)
            if (parts[p].size() > parts[biggest].size()) biggest = p;
        if (parts[biggest].size() <= 1) break;  // cannot split further
        std::vector<int> part = std::move(parts[biggest]);
        Subgraph sub = induced_subgraph(g, part);
        bool proper = false;
        std::vector<int> sides = proper_bisect(model, sub.graph, &proper);
        if (!proper) {
            warn_improper("kway");
            parts[biggest] = std::move(part);
            break;
        }
        std::vector<int> half[2];
        for (size_t i = 0; i < part.size(); ++i) half[sides[i]].push_back(part[i]);
        parts[biggest] = std::move(half[0]);
        parts.insert(parts.begin() + biggest + 1, std::move(half[1]));
    }
    return labels_from_parts(g.n, parts);
}

// Multilevel adapter so nref recursion can use coarsen+refine per bisection.
class MultilevelAdapter : public BisectionModel {
  public:
    MultilevelAdapter(const BisectionModel* base, const Refiner* r, int threshold)
        : base_(base), refiner_(r), threshold_(threshold) {}
    std::vector<int> bisect_graph(const Graph& g) const override {
        return multilevel_bisect(g, *base_, *refiner_, threshold_);
    }
    std::string name() const override { return "multilevel(" + base_->name() + ")"; }

  private:
    const BisectionModel* base_;
    const Refiner* refiner_;
    int threshold_;
};

}  // namespace

std::vector<int> coarsen_subset(const Mesh& mesh, const BisectionModel& model,
                                const AggloRequest& request, std::span<const int> cell_ids) {
    const int n = mesh.n_cells();
    std::vector<int> ids(cell_ids.begin(), cell_ids.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (!ids.empty() && (ids.front() < 0 || ids.back() >= n))
        throw std::invalid_argument("coarsen: cell index out of range");

    std::vector<int> labels(n, -1);
    if (ids.empty()) {
        std::iota(labels.begin(), labels.end(), 0);
        return labels;
    }

    Graph g = model.get_graph(mesh);
    Subgraph sub = induced_subgraph(g, ids);
    std::vector<int> part;
    switch (request.inner_mode) {
        case AggloMode::Nref: part = bisect_nref(sub.graph, model, request.nref); break;
        case AggloMode::Kway: part = kway_labels(sub.graph, model, request.k); break;
        case AggloMode::MultFactor: {
            double hhat = request.mult_factor * region_diameter(mesh, ids);
            part = bisect_to_diameter(mesh, sub.graph, model, hhat, sub.to_parent);
            break;
        }
        case AggloMode::TargetSize:
            part = bisect_to_diameter(mesh, sub.graph, model, request.target_size,
                                      sub.to_parent);
            break;
        default:
            throw std::invalid_argument("coarsen: unsupported inner mode");
    }
    int m = 0;
    for (size_t i = 0; i < ids.size(); ++i) {
        labels[ids[i]] = part[i];
        m = std::max(m, part[i] + 1);
    }
    for (int u = 0; u < n; ++u)
        if (labels[u] == -1) labels[u] = m++;
    return labels;
}

AggloResult agglomerate(const Mesh& mesh, const BisectionModel& model,
                        const AggloRequest& request) {
    validate(mesh);
    AggloResult res;
    Graph g = model.get_graph(mesh);

    switch (request.mode) {
        case AggloMode::Kway: res.labels = kway_labels(g, model, request.k); break;
        case AggloMode::Nref:
            res.labels = bisect_nref(g, model, request.nref, &res.hierarchy);
            break;
        case AggloMode::TargetSize:
            res.labels = bisect_target_size(mesh, g, model, request.target_size);
            break;
        case AggloMode::MultFactor:
            res.labels = bisect_mult_factor(mesh, g, model, request.mult_factor);
            break;
        case AggloMode::Segregated:
            res.labels = segregated(mesh, model, request.mult_factor);
            break;
        case AggloMode::Coarsen:
            res.labels = coarsen_subset(mesh, model, request, request.cells);
            break;
        case AggloMode::Multilevel: {
            FmRefiner fallback;
            const Refiner& r = request.refiner ? *request.refiner : fallback;
            MultilevelAdapter adapter(&model, &r, request.threshold);
            res.labels = bisect_nref(g, adapter, request.nref, &res.hierarchy);
            break;
        }
    }
    res.labels = split_disconnected(g, res.labels);
    res.merged = merge_cells(mesh, res.labels);
    return res;
}

}  // namespace polyagg
