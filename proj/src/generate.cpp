#include "polyagg/generate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "polyagg/graph.hpp"
#include "polyagg/io.hpp"

namespace polyagg {

Mesh grid_quads(int nx, int ny) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid_quads: need nx, ny >= 1");
    Mesh m;
    m.dim = 2;
    auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.add_vertex({static_cast<double>(i) / nx, static_cast<double>(j) / ny, 0.0});
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            m.add_polygon({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    return m;
}

Mesh grid_triangles(int nx, int ny) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid_triangles: need nx, ny >= 1");
    Mesh m;
    m.dim = 2;
    auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.add_vertex({static_cast<double>(i) / nx, static_cast<double>(j) / ny, 0.0});
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            m.add_polygon({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            m.add_polygon({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    return m;
}

namespace {

struct Tri {
    int a, b, c;
};

// Strict in-circumcircle test by the translated 3x3 determinant, which stays
// well conditioned where the explicit circumcenter/radius form cancels badly
// for slim triangles. Cocircular points do not invalidate; degenerate
// (collinear) triangles count as invalidated so they cannot survive.
bool in_circumcircle(const std::vector<Vec3>& pts, const Tri& t, const Vec3& p) {
    const Vec3 &A = pts[t.a], &B = pts[t.b], &C = pts[t.c];
    double orient = (B.x - A.x) * (C.y - A.y) - (B.y - A.y) * (C.x - A.x);
    if (orient == 0.0) return true;
    double ax = A.x - p.x, ay = A.y - p.y;
    double bx = B.x - p.x, by = B.y - p.y;
    double cx = C.x - p.x, cy = C.y - p.y;
    double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                 (bx * bx + by * by) * (ax * cy - cx * ay) +
                 (cx * cx + cy * cy) * (ax * by - bx * ay);
    return orient > 0 ? det > 0 : det < 0;
}

}  // namespace

Mesh random_delaunay(int n_points, std::uint64_t seed) {
    if (n_points < 3) throw std::invalid_argument("random_delaunay: need at least 3 points");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    while (static_cast<int>(pts.size()) < n_points + 4) {
        Vec3 p{u(rng), u(rng), 0.0};
        bool dup = false;
        for (const Vec3& q : pts)
            if (dist2(p, q) < 1e-18) {
                dup = true;
                break;
            }
        if (!dup) pts.push_back(p);
    }
    const int n = static_cast<int>(pts.size());

    // Seed with the two halves of the square itself: every later point lies
    // inside the current tiling, so no far-away helper vertices are needed
    // (those leave boundary gaps when a point falls inside a helper
    // triangle's huge circumcircle), and the union stays exactly the unit
    // square after every insertion.
    std::vector<Tri> tris = {{0, 1, 2}, {0, 2, 3}};
    for (int p = 4; p < n; ++p) {
        std::vector<Tri> keep;
        // Boundary edges of the cavity appear in exactly one bad triangle.
        std::map<std::pair<int, int>, int> edge_count;
        std::vector<std::pair<int, int>> edges;
        for (const Tri& t : tris) {
            if (in_circumcircle(pts, t, pts[p])) {
                int e[3][2] = {{t.a, t.b}, {t.b, t.c}, {t.c, t.a}};
                for (auto& ed : e) {
                    std::pair<int, int> key = std::minmax(ed[0], ed[1]);
                    if (++edge_count[key] == 1) edges.emplace_back(ed[0], ed[1]);
                }
            } else {
                keep.push_back(t);
            }
        }
        tris = std::move(keep);
        for (const auto& [a, b] : edges)
            if (edge_count[std::pair<int, int>(std::minmax(a, b))] == 1)
                tris.push_back({a, b, p});
    }

    Mesh m;
    m.dim = 2;
    for (int i = 0; i < n; ++i) m.add_vertex(pts[i]);
    for (const Tri& t : tris) {
        int a = t.a, b = t.b, c = t.c;
        double area2 = (pts[b].x - pts[a].x) * (pts[c].y - pts[a].y) -
                       (pts[b].y - pts[a].y) * (pts[c].x - pts[a].x);
        if (area2 == 0.0) continue;  // covers nothing; neighbors tile past it
        if (area2 < 0) std::swap(b, c);
        m.add_polygon({a, b, c});
    }
    return m;
}

namespace {

using Poly = std::vector<Vec3>;

// Keep the part of `poly` with (x - m) . d <= 0.
Poly clip_halfplane(const Poly& poly, const Vec3& m, const Vec3& d) {
    Poly out;
    const int k = static_cast<int>(poly.size());
    for (int i = 0; i < k; ++i) {
        const Vec3& p = poly[i];
        const Vec3& q = poly[(i + 1) % k];
        double fp = dot(p - m, d), fq = dot(q - m, d);
        if (fp <= 0) out.push_back(p);
        if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
            double t = fp / (fp - fq);
            out.push_back(p + (q - p) * t);
        }
    }
    return out;
}

Vec3 poly_centroid(const Poly& poly) {
    double area = 0.0;
    Vec3 c;
    const int k = static_cast<int>(poly.size());
    for (int i = 0; i < k; ++i) {
        const Vec3& p = poly[i];
        const Vec3& q = poly[(i + 1) % k];
        double w = p.x * q.y - q.x * p.y;
        area += w;
        c.x += (p.x + q.x) * w;
        c.y += (p.y + q.y) * w;
    }
    if (std::abs(area) < 1e-30) return poly.empty() ? Vec3{} : poly[0];
    return c / (3.0 * area);
}

std::vector<Poly> voronoi_cells(const std::vector<Vec3>& seeds) {
    const Poly square = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    std::vector<Poly> cells(seeds.size());
    for (size_t i = 0; i < seeds.size(); ++i) {
        Poly cell = square;
        for (size_t j = 0; j < seeds.size() && !cell.empty(); ++j) {
            if (j == i) continue;
            Vec3 mid = (seeds[i] + seeds[j]) * 0.5;
            Vec3 dir = seeds[j] - seeds[i];
            cell = clip_halfplane(cell, mid, dir);
        }
        cells[i] = std::move(cell);
    }
    return cells;
}

// Snap-weld shared polygon vertices: reuse any previously seen point within
// `tol`, searching the neighboring hash buckets.
class VertexWelder {
  public:
    explicit VertexWelder(double tol) : tol_(tol) {}

    int id_for(Mesh& m, const Vec3& p) {
        long long gx = cell(p.x), gy = cell(p.y), gz = cell(p.z);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy)
                for (long long dz = -1; dz <= 1; ++dz) {
                    auto it = buckets_.find(key(gx + dx, gy + dy, gz + dz));
                    if (it == buckets_.end()) continue;
                    for (int id : it->second)
                        if (dist(m.vertices[id], p) <= tol_) return id;
                }
        int id = m.add_vertex(p);
        buckets_[key(gx, gy, gz)].push_back(id);
        return id;
    }

  private:
    long long cell(double x) const { return static_cast<long long>(std::floor(x / (2 * tol_))); }
    static std::uint64_t key(long long x, long long y, long long z) {
        std::uint64_t h = 1469598103934665603ull;
        for (long long v : {x, y, z}) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ull;
        }
        return h;
    }
    double tol_;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

}  // namespace

Mesh random_voronoi(int n_seeds, std::uint64_t seed, int lloyd_iters) {
    if (n_seeds < 2) throw std::invalid_argument("random_voronoi: need at least 2 seeds");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec3> seeds(n_seeds);
    for (Vec3& s : seeds) s = {u(rng), u(rng), 0.0};

    std::vector<Poly> cells = voronoi_cells(seeds);
    for (int it = 0; it < lloyd_iters; ++it) {
        for (int i = 0; i < n_seeds; ++i)
            if (!cells[i].empty()) seeds[i] = poly_centroid(cells[i]);
        cells = voronoi_cells(seeds);
    }

    Mesh m;
    m.dim = 2;
    VertexWelder weld(1e-9);
    for (const Poly& cell : cells) {
        if (cell.size() < 3) throw MeshError("random_voronoi: degenerate cell");
        std::vector<int> loop;
        loop.reserve(cell.size());
        for (const Vec3& p : cell) {
            int id = weld.id_for(m, p);
            if (loop.empty() || loop.back() != id) loop.push_back(id);
        }
        while (loop.size() > 1 && loop.back() == loop.front()) loop.pop_back();
        if (loop.size() < 3) throw MeshError("random_voronoi: degenerate cell after welding");
        m.add_polygon(std::move(loop));
    }
    return m;
}

Mesh with_inclusions(Mesh base, int n_circles, double coverage, std::uint64_t seed) {
    if (n_circles == 0) {  // homogeneous: tag everything 0
        base.tags.assign(base.n_cells(), 0.0);
        return base;
    }
    if (n_circles < 0 || coverage <= 0.0 || coverage >= 1.0)
        throw std::invalid_argument("with_inclusions: need n>=0 and coverage in (0,1)");
    double r = std::sqrt(coverage / (n_circles * 3.14159265358979323846));
    if (2 * r > 1.0)
        throw std::invalid_argument("with_inclusions: coverage too high for circle placement");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(r, 1.0 - r);
    std::vector<Circle> circles;
    int tries = 0;
    const int max_tries = 10000 * n_circles;
    while (static_cast<int>(circles.size()) < n_circles) {
        if (++tries > max_tries)
            throw std::runtime_error(
                "with_inclusions: could not place non-overlapping circles; lower the coverage");
        Circle c{{u(rng), u(rng), 0.0}, r};
        bool ok = true;
        for (const Circle& o : circles)
            if (dist(c.center, o.center) < 2 * r) {
                ok = false;
                break;
            }
        if (ok) circles.push_back(c);
    }
    auto geo = compute_geometry(base);
    base.tags.resize(base.n_cells());
    for (int i = 0; i < base.n_cells(); ++i) {
        bool in = false;
        for (const Circle& c : circles)
            if (dist(geo[i].centroid, c.center) <= c.radius) {
                in = true;
                break;
            }
        base.tags[i] = in ? 1.0 : 0.0;
    }
    return base;
}

Mesh mesh_subset(const Mesh& mesh, const std::vector<int>& cell_ids) {
    Mesh out;
    out.dim = mesh.dim;
    std::vector<int> vmap(mesh.n_vertices(), -1);
    for (int ci : cell_ids) {
        Cell cell = mesh.cells[ci];
        for (int& v : cell.vertices) {
            if (vmap[v] == -1) vmap[v] = out.add_vertex(mesh.vertices[v]);
            v = vmap[v];
        }
        for (Face& f : cell.faces) {
            for (int& v : f.loop) v = vmap[v];
            f.key = f.loop;
            std::sort(f.key.begin(), f.key.end());
        }
        for (auto& hole : cell.hole_loops)
            for (int& v : hole) v = vmap[v];
        out.cells.push_back(std::move(cell));
        if (mesh.has_tags()) out.tags.push_back(mesh.tags[ci]);
    }
    return out;
}

Mesh with_holes(const Mesh& base, const std::vector<Circle>& circles) {
    auto geo = compute_geometry(base);
    std::vector<int> keep;
    for (int i = 0; i < base.n_cells(); ++i) {
        bool inside = false;
        for (const Circle& c : circles)
            if (dist(geo[i].centroid, c.center) <= c.radius) {
                inside = true;
                break;
            }
        if (!inside) keep.push_back(i);
    }
    if (keep.empty()) throw MeshError("with_holes: holes removed every cell");
    Mesh trimmed = mesh_subset(base, keep);
    Graph g = build_dual_graph(trimmed);
    int n_comp = 0;
    auto comp = connected_components(g, &n_comp);
    if (n_comp == 1) return trimmed;
    std::vector<int> count(n_comp, 0);
    for (int c : comp) count[c]++;
    int best = static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
    std::vector<int> final_keep;
    for (int i = 0; i < trimmed.n_cells(); ++i)
        if (comp[i] == best) final_keep.push_back(i);
    return mesh_subset(trimmed, final_keep);
}

Mesh cube_hexes(int n) {
    if (n < 1) throw std::invalid_argument("cube_hexes: need n >= 1");
    Mesh m;
    m.dim = 3;
    auto vid = [&](int i, int j, int k) { return i + (n + 1) * (j + (n + 1) * k); };
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i)
                m.add_vertex({static_cast<double>(i) / n, static_cast<double>(j) / n,
                              static_cast<double>(k) / n});
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                m.add_hexahedron({vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k),
                                  vid(i, j + 1, k), vid(i, j, k + 1), vid(i + 1, j, k + 1),
                                  vid(i + 1, j + 1, k + 1), vid(i, j + 1, k + 1)});
    return m;
}

Mesh cube_tets(int n) {
    if (n < 1) throw std::invalid_argument("cube_tets: need n >= 1");
    Mesh m;
    m.dim = 3;
    auto vid = [&](int i, int j, int k) { return i + (n + 1) * (j + (n + 1) * k); };
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i)
                m.add_vertex({static_cast<double>(i) / n, static_cast<double>(j) / n,
                              static_cast<double>(k) / n});
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                int v000 = vid(i, j, k), v100 = vid(i + 1, j, k);
                int v010 = vid(i, j + 1, k), v110 = vid(i + 1, j + 1, k);
                int v001 = vid(i, j, k + 1), v101 = vid(i + 1, j, k + 1);
                int v011 = vid(i, j + 1, k + 1), v111 = vid(i + 1, j + 1, k + 1);
                // Six tetrahedra along the main diagonal v000-v111; every
                // face diagonal runs min-corner to max-corner, so neighbors
                // agree on shared faces.
                m.add_tetrahedron({v000, v100, v110, v111});
                m.add_tetrahedron({v000, v100, v101, v111});
                m.add_tetrahedron({v000, v010, v110, v111});
                m.add_tetrahedron({v000, v010, v011, v111});
                m.add_tetrahedron({v000, v001, v101, v111});
                m.add_tetrahedron({v000, v001, v011, v111});
            }
    return m;
}

Mesh cube_portion(std::uint64_t seed, int n) {
    Mesh base = cube_tets(n);
    auto geo = compute_geometry(base);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Vec3 lo, hi;
        for (int a = 0; a < 3; ++a) {
            double x0 = u(rng), x1 = u(rng);
            lo[a] = std::min(x0, x1);
            hi[a] = std::max(x0, x1);
            if (hi[a] - lo[a] < 0.3) {
                double grow = (0.3 - (hi[a] - lo[a])) / 2;
                lo[a] = std::max(0.0, lo[a] - grow);
                hi[a] = std::min(1.0, hi[a] + grow);
            }
        }
        std::vector<int> keep;
        for (int i = 0; i < base.n_cells(); ++i) {
            const Vec3& c = geo[i].centroid;
            if (c.x >= lo.x && c.x <= hi.x && c.y >= lo.y && c.y <= hi.y && c.z >= lo.z &&
                c.z <= hi.z)
                keep.push_back(i);
        }
        if (keep.empty()) continue;
        Mesh trimmed = mesh_subset(base, keep);
        Graph g = build_dual_graph(trimmed);
        int n_comp = 0;
        auto comp = connected_components(g, &n_comp);
        if (n_comp == 1) return trimmed;
        std::vector<int> count(n_comp, 0);
        for (int c : comp) count[c]++;
        int best =
            static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
        std::vector<int> final_keep;
        for (int i = 0; i < trimmed.n_cells(); ++i)
            if (comp[i] == best) final_keep.push_back(i);
        return mesh_subset(trimmed, final_keep);
    }
    throw std::runtime_error("cube_portion: failed to sample a non-empty sub-box");
}

namespace {

std::uint64_t fnv64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

Mesh generate_kind(const std::string& kind, const DatasetSpec& spec, std::uint64_t seed) {
    if (kind == "structured_quads") return structured_quads(spec.structured_n);
    if (kind == "structured_triangles") return structured_triangles(spec.structured_n);
    if (kind == "random_delaunay") return random_delaunay(spec.delaunay_points, seed);
    if (kind == "random_voronoi")
        return random_voronoi(spec.voronoi_seeds, seed, spec.voronoi_lloyd);
    if (kind == "holes") {
        Mesh base = random_voronoi(spec.voronoi_seeds, seed, spec.voronoi_lloyd);
        std::mt19937_64 rng(seed ^ 0x5D2E1ull);
        std::uniform_real_distribution<double> pos(0.2, 0.8), rad(0.08, 0.16);
        std::uniform_int_distribution<int> cnt(1, 3);
        std::vector<Circle> circles;
        int n = cnt(rng);
        for (int i = 0; i < n; ++i) circles.push_back({{pos(rng), pos(rng), 0.0}, rad(rng)});
        return with_holes(base, circles);
    }
    if (kind == "inclusions") {
        Mesh base = random_delaunay(spec.delaunay_points, seed);
        return with_inclusions(std::move(base), spec.inclusion_circles,
                               spec.inclusion_coverage, seed ^ 0xA11CEull);
    }
    if (kind == "cube_tets") return cube_tets(spec.cube_n);
    if (kind == "cube_hexes") return cube_hexes(spec.cube_n);
    if (kind == "cube_portion") return cube_portion(seed, spec.portion_n);
    throw std::invalid_argument("build_dataset: unknown generator kind '" + kind + "'");
}

std::vector<DatasetEntry> build_dataset(const DatasetSpec& spec, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "meshes");
    fs::create_directories(fs::path(out_dir) / "graphs");

    std::vector<DatasetEntry> index;
    for (const auto& [kind, count] : spec.counts) {
        if (count < 0) throw std::invalid_argument("build_dataset: negative count");
        for (int i = 0; i < count; ++i) {
            DatasetEntry e;
            e.kind = kind;
            e.seed = spec.master_seed ^ (fnv64(kind) + 0x9E3779B97F4A7C15ull * (i + 1));
            Mesh mesh = generate_kind(kind, spec, e.seed);
            validate(mesh);
            Graph g = build_dual_graph(mesh);
            e.cells = mesh.n_cells();
            std::string stem = kind + "_" + std::to_string(i);
            e.mesh_path = (fs::path(out_dir) / "meshes" / (stem + ".vtk")).string();
            e.graph_path = (fs::path(out_dir) / "graphs" / (stem + ".graph")).string();
            write_mesh(mesh, e.mesh_path);
            write_graph_cache(g, e.graph_path);
            index.push_back(std::move(e));
        }
    }
    write_dataset_index(index, (fs::path(out_dir) / "index.tsv").string());
    return index;
}

}  // namespace polyagg
