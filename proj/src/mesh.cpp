#include "polyagg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace polyagg {

const char* cell_kind_name(CellKind k) {
    switch (k) {
        case CellKind::Polygon: return "polygon";
        case CellKind::Tetrahedron: return "tetrahedron";
        case CellKind::Hexahedron: return "hexahedron";
        case CellKind::Pyramid: return "pyramid";
        case CellKind::Polyhedron: return "polyhedron";
    }
    return "?";
}

Face Face::from_loop(std::vector<int> vertices) {
    Face f;
    f.key = vertices;
    std::sort(f.key.begin(), f.key.end());
    f.loop = std::move(vertices);
    return f;
}

void Mesh::add_polygon(std::vector<int> loop) {
    Cell c;
    c.kind = CellKind::Polygon;
    const int k = static_cast<int>(loop.size());
    c.faces.reserve(k);
    // Edges are stored orientation-free and sorted so that a polygon cell has a
    // single canonical representation however it was constructed.
    for (int i = 0; i < k; ++i) c.faces.push_back(Face::from_loop({loop[i], loop[(i + 1) % k]}));
    for (auto& f : c.faces) f.loop = f.key;
    std::sort(c.faces.begin(), c.faces.end(),
              [](const Face& a, const Face& b) { return a.key < b.key; });
    c.vertices = std::move(loop);
    cells.push_back(std::move(c));
}

namespace {
Cell cell_from_face_table(CellKind kind, std::span<const int> v,
                          std::span<const std::vector<int>> table) {
    Cell c;
    c.kind = kind;
    c.vertices.assign(v.begin(), v.end());
    for (const auto& f : table) {
        std::vector<int> loop;
        loop.reserve(f.size());
        for (int idx : f) loop.push_back(v[idx]);
        c.faces.push_back(Face::from_loop(std::move(loop)));
    }
    return c;
}
}  // namespace

void Mesh::add_tetrahedron(const std::array<int, 4>& v) {
    static const std::vector<std::vector<int>> faces = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
    cells.push_back(cell_from_face_table(CellKind::Tetrahedron, v, faces));
}

void Mesh::add_hexahedron(const std::array<int, 8>& v) {
    static const std::vector<std::vector<int>> faces = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                                        {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
    cells.push_back(cell_from_face_table(CellKind::Hexahedron, v, faces));
}

void Mesh::add_pyramid(const std::array<int, 5>& v) {
    static const std::vector<std::vector<int>> faces = {
        {0, 3, 2, 1}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
    cells.push_back(cell_from_face_table(CellKind::Pyramid, v, faces));
}

void Mesh::add_polyhedron(std::vector<std::vector<int>> face_loops) {
    Cell c;
    c.kind = CellKind::Polyhedron;
    std::set<int> vs;
    for (auto& loop : face_loops) {
        vs.insert(loop.begin(), loop.end());
        c.faces.push_back(Face::from_loop(std::move(loop)));
    }
    c.vertices.assign(vs.begin(), vs.end());
    cells.push_back(std::move(c));
}

void validate(const Mesh& mesh) {
    if (mesh.dim != 2 && mesh.dim != 3) throw MeshError("mesh dimension must be 2 or 3");
    if (!mesh.tags.empty() && mesh.tags.size() != mesh.cells.size())
        throw MeshError("physical tag array size does not match cell count");
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        const Cell& c = mesh.cells[ci];
        if (static_cast<int>(c.vertices.size()) < mesh.dim + 1)
            throw MeshError("cell " + std::to_string(ci) + " has fewer than dim+1 vertices");
        if (mesh.dim == 2 && c.kind != CellKind::Polygon)
            throw MeshError("cell " + std::to_string(ci) + " is a 3D kind in a 2D mesh");
        if (mesh.dim == 3 && c.kind == CellKind::Polygon)
            throw MeshError("cell " + std::to_string(ci) + " is a polygon in a 3D mesh");
        std::set<int> cv(c.vertices.begin(), c.vertices.end());
        for (const auto& hole : c.hole_loops) cv.insert(hole.begin(), hole.end());
        for (int v : cv)
            if (v < 0 || v >= mesh.n_vertices())
                throw MeshError("cell " + std::to_string(ci) + " references vertex " +
                                std::to_string(v) + " out of range");
        for (const Face& f : c.faces)
            for (int v : f.key)
                if (!cv.count(v))
                    throw MeshError("cell " + std::to_string(ci) +
                                    " has a face vertex outside the cell vertex set");
    }
}

namespace {

double polygon_loop_area(const Mesh& mesh, std::span<const int> loop) {
    double a = 0.0;
    const int k = static_cast<int>(loop.size());
    for (int i = 0; i < k; ++i) {
        const Vec3& p = mesh.vertices[loop[i]];
        const Vec3& q = mesh.vertices[loop[(i + 1) % k]];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

Vec3 polygon_loop_centroid(const Mesh& mesh, std::span<const int> loop, double signed_area) {
    Vec3 c;
    const int k = static_cast<int>(loop.size());
    for (int i = 0; i < k; ++i) {
        const Vec3& p = mesh.vertices[loop[i]];
        const Vec3& q = mesh.vertices[loop[(i + 1) % k]];
        double w = p.x * q.y - q.x * p.y;
        c.x += (p.x + q.x) * w;
        c.y += (p.y + q.y) * w;
    }
    return c / (6.0 * signed_area);
}

double max_pairwise_distance(const Mesh& mesh, std::span<const int> vertex_ids, int dim) {
    std::vector<Vec3> pts;
    pts.reserve(vertex_ids.size());
    for (int v : vertex_ids) pts.push_back(mesh.vertices[v]);
    return farthest_pair_distance(pts, dim);
}

CellGeometry polygon_geometry(const Mesh& mesh, const Cell& c) {
    CellGeometry g;
    double outer = polygon_loop_area(mesh, c.vertices);
    double sa = std::abs(outer);
    Vec3 centroid = sa > 0 ? polygon_loop_centroid(mesh, c.vertices, outer) * sa : Vec3{};
    double area = sa;
    for (const auto& hole : c.hole_loops) {
        double ha = polygon_loop_area(mesh, hole);
        double has = std::abs(ha);
        area -= has;
        if (has > 0) centroid = centroid - polygon_loop_centroid(mesh, hole, ha) * has;
    }
    g.measure = area;
    if (area > 0) g.centroid = centroid / area;
    g.diameter = max_pairwise_distance(mesh, c.vertices, 2);
    return g;
}

// Volume and centroid by summing cones from the vertex centroid over
// fan-triangulated faces. Exact for cells star-shaped w.r.t. that point,
// which covers every kind built here regardless of face orientation.
CellGeometry cone_geometry(const Mesh& mesh, const Cell& c) {
    CellGeometry g;
    Vec3 o;
    for (int v : c.vertices) o += mesh.vertices[v];
    o = o / static_cast<double>(c.vertices.size());

    double vol = 0.0;
    Vec3 moment;
    for (const Face& f : c.faces) {
        double fvol = 0.0;
        Vec3 fmoment;
        const auto& loop = f.loop;
        for (size_t i = 1; i + 1 < loop.size(); ++i) {
            const Vec3& a = mesh.vertices[loop[0]];
            const Vec3& b = mesh.vertices[loop[i]];
            const Vec3& d = mesh.vertices[loop[i + 1]];
            double s = tet_volume(o, a, b, d);
            fvol += s;
            fmoment += (o + a + b + d) * (0.25 * s);
        }
        if (fvol < 0) {
            fvol = -fvol;
            fmoment = fmoment * -1.0;
        }
        vol += fvol;
        moment += fmoment;
    }
    g.measure = vol;
    if (vol > 0) g.centroid = moment / vol;
    g.diameter = max_pairwise_distance(mesh, c.vertices, 3);
    return g;
}

}  // namespace

CellGeometry cell_geometry(const Mesh& mesh, int cell_id) {
    if (!mesh.cached_geometry.empty() &&
        mesh.cached_geometry.size() == static_cast<size_t>(mesh.n_cells()))
        return mesh.cached_geometry[cell_id];
    const Cell& c = mesh.cells[cell_id];
    CellGeometry g;
    switch (c.kind) {
        case CellKind::Polygon: g = polygon_geometry(mesh, c); break;
        case CellKind::Tetrahedron: {
            const auto& v = c.vertices;
            g.measure = std::abs(tet_volume(mesh.vertices[v[0]], mesh.vertices[v[1]],
                                            mesh.vertices[v[2]], mesh.vertices[v[3]]));
            g.centroid =
                (mesh.vertices[v[0]] + mesh.vertices[v[1]] + mesh.vertices[v[2]] + mesh.vertices[v[3]]) /
                4.0;
            g.diameter = max_pairwise_distance(mesh, v, 3);
            break;
        }
        default: g = cone_geometry(mesh, c); break;
    }
    double scale = std::pow(g.diameter, mesh.dim);
    if (g.diameter <= 0.0 || g.measure <= 1e-12 * scale)
        throw MeshError("degenerate cell " + std::to_string(cell_id) + " (" +
                        cell_kind_name(c.kind) + "): zero measure");
    return g;
}

std::vector<CellGeometry> compute_geometry(const Mesh& mesh) {
    if (!mesh.cached_geometry.empty() &&
        mesh.cached_geometry.size() == static_cast<size_t>(mesh.n_cells()))
        return mesh.cached_geometry;
    std::vector<CellGeometry> out(mesh.n_cells());
    for (int i = 0; i < mesh.n_cells(); ++i) out[i] = cell_geometry(mesh, i);
    return out;
}

std::vector<std::vector<int>> build_adjacency(const Mesh& mesh) {
    // Alg. 1: one pass filling face -> cells, then one pass emitting pairs.
    std::unordered_map<std::vector<int>, std::array<int, 2>, FaceKeyHash> face_to_cells;
    face_to_cells.reserve(mesh.cells.size() * 4);
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        for (const Face& f : mesh.cells[ci].faces) {
            auto [it, inserted] = face_to_cells.try_emplace(f.key, std::array<int, 2>{ci, -1});
            if (!inserted) {
                if (it->second[1] != -1) {
                    std::string fs;
                    for (int v : f.key) fs += std::to_string(v) + " ";
                    throw MeshError("non-manifold mesh: face [" + fs + "] shared by more than two cells");
                }
                if (it->second[0] != ci) it->second[1] = ci;
            }
        }
    }
    std::vector<std::vector<int>> adj(mesh.n_cells());
    for (const auto& [key, cc] : face_to_cells) {
        if (cc[1] == -1) continue;
        adj[cc[0]].push_back(cc[1]);
        adj[cc[1]].push_back(cc[0]);
    }
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return adj;
}

namespace {

// Walk retained boundary edges of a 2D element into closed loops.
std::vector<std::vector<int>> walk_edge_loops(const std::vector<std::array<int, 2>>& edges) {
    std::map<int, std::vector<int>> incident;  // vertex -> edge indices
    for (size_t e = 0; e < edges.size(); ++e) {
        incident[edges[e][0]].push_back(static_cast<int>(e));
        incident[edges[e][1]].push_back(static_cast<int>(e));
    }
    std::vector<bool> used(edges.size(), false);
    std::vector<std::vector<int>> loops;
    for (size_t start = 0; start < edges.size(); ++start) {
        if (used[start]) continue;
        std::vector<int> loop;
        int v0 = edges[start][0];
        int cur = v0;
        int edge = static_cast<int>(start);
        while (true) {
            used[edge] = true;
            loop.push_back(cur);
            int next = edges[edge][0] == cur ? edges[edge][1] : edges[edge][0];
            if (next == v0) break;
            // Deterministic continuation: unused incident edge with the
            // smallest far endpoint.
            int best = -1, best_far = -1;
            for (int e2 : incident[next]) {
                if (used[e2]) continue;
                int far = edges[e2][0] == next ? edges[e2][1] : edges[e2][0];
                if (best == -1 || far < best_far) {
                    best = e2;
                    best_far = far;
                }
            }
            if (best == -1) break;  // open chain; emit what we have
            cur = next;
            edge = best;
        }
        loops.push_back(std::move(loop));
    }
    return loops;
}

double loop_signed_area(const Mesh& mesh, const std::vector<int>& loop) {
    double a = 0.0;
    const int k = static_cast<int>(loop.size());
    for (int i = 0; i < k; ++i) {
        const Vec3& p = mesh.vertices[loop[i]];
        const Vec3& q = mesh.vertices[loop[(i + 1) % k]];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

}  // namespace

Mesh merge_cells(const Mesh& mesh, const std::vector<int>& labels) {
    if (labels.size() != static_cast<size_t>(mesh.n_cells()))
        throw MeshError("label array size does not match cell count");
    int M = 0;
    for (int l : labels) {
        if (l < 0) throw MeshError("negative label");
        M = std::max(M, l + 1);
    }
    std::vector<std::vector<int>> classes(M);
    for (int i = 0; i < mesh.n_cells(); ++i) classes[labels[i]].push_back(i);
    for (int l = 0; l < M; ++l)
        if (classes[l].empty()) throw MeshError("label class " + std::to_string(l) + " is empty");

    // Face-connectedness of every class (callers run split_disconnected first).
    auto adj = build_adjacency(mesh);
    for (int l = 0; l < M; ++l) {
        const auto& cls = classes[l];
        std::vector<char> seen(mesh.n_cells(), 0);
        std::vector<int> stack = {cls[0]};
        seen[cls[0]] = 1;
        int count = 0;
        while (!stack.empty()) {
            int c = stack.back();
            stack.pop_back();
            ++count;
            for (int nb : adj[c])
                if (labels[nb] == l && !seen[nb]) {
                    seen[nb] = 1;
                    stack.push_back(nb);
                }
        }
        if (count != static_cast<int>(cls.size()))
            throw MeshError("label class " + std::to_string(l) +
                            " is not face-connected; split it before merging");
    }

    auto geo = compute_geometry(mesh);

    Mesh out;
    out.dim = mesh.dim;
    out.vertices = mesh.vertices;
    out.members = classes;
    out.cells.reserve(M);
    out.cached_geometry.reserve(M);
    if (mesh.has_tags()) out.tags.reserve(M);

    for (int l = 0; l < M; ++l) {
        const auto& cls = classes[l];
        // Retained faces: those not shared between two member cells.
        std::unordered_map<std::vector<int>, std::pair<const Face*, int>, FaceKeyHash> count;
        for (int ci : cls)
            for (const Face& f : mesh.cells[ci].faces) {
                auto [it, inserted] = count.try_emplace(f.key, std::make_pair(&f, 0));
                it->second.second++;
            }
        std::vector<const Face*> retained;
        for (auto& [key, v] : count)
            if (v.second == 1) retained.push_back(v.first);
        std::sort(retained.begin(), retained.end(),
                  [](const Face* a, const Face* b) { return a->key < b->key; });

        Cell cell;
        CellGeometry g;
        std::set<int> vset;
        for (int ci : cls) {
            g.measure += geo[ci].measure;
            g.centroid += geo[ci].centroid * geo[ci].measure;
            vset.insert(mesh.cells[ci].vertices.begin(), mesh.cells[ci].vertices.end());
        }
        g.centroid = g.centroid / g.measure;
        std::vector<int> all_verts(vset.begin(), vset.end());
        g.diameter = max_pairwise_distance(mesh, all_verts, mesh.dim);

        if (mesh.dim == 2) {
            cell.kind = CellKind::Polygon;
            std::vector<std::array<int, 2>> edges;
            edges.reserve(retained.size());
            for (const Face* f : retained) edges.push_back({f->key[0], f->key[1]});
            auto loops = walk_edge_loops(edges);
            // Outer boundary is the loop of largest area; the rest are holes.
            size_t outer = 0;
            double best = -1.0;
            std::vector<double> areas(loops.size());
            for (size_t i = 0; i < loops.size(); ++i) {
                areas[i] = loop_signed_area(mesh, loops[i]);
                if (std::abs(areas[i]) > best) {
                    best = std::abs(areas[i]);
                    outer = i;
                }
            }
            if (areas[outer] < 0) std::reverse(loops[outer].begin(), loops[outer].end());
            cell.vertices = loops[outer];
            for (size_t i = 0; i < loops.size(); ++i) {
                if (i == outer) continue;
                if (areas[i] > 0) std::reverse(loops[i].begin(), loops[i].end());
                cell.hole_loops.push_back(loops[i]);
            }
            // Canonical edge form, matching add_polygon: loop == key, sorted.
            for (const Face* f : retained) cell.faces.push_back(Face{f->key, f->key});
        } else {
            cell.kind = CellKind::Polyhedron;
            // Cell vertices are the ones on retained faces; vertices interior
            // to the merged element are no longer part of its boundary.
            std::set<int> fverts;
            for (const Face* f : retained) {
                fverts.insert(f->loop.begin(), f->loop.end());
                cell.faces.push_back(*f);
            }
            cell.vertices.assign(fverts.begin(), fverts.end());
        }
        out.cells.push_back(std::move(cell));
        out.cached_geometry.push_back(g);
        if (mesh.has_tags()) {
            double mean = 0.0;
            for (int ci : cls) mean += mesh.tags[ci];
            out.tags.push_back(mean / cls.size());
        }
    }
    return out;
}

}  // namespace polyagg
