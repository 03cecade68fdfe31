#include "polyagg/io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace polyagg {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw MeshError("cannot open '" + path + "' for writing");
    return f;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream f(path, mode);
    if (!f) throw MeshError("cannot open '" + path + "' for reading");
    return f;
}

// ---------------------------------------------------------------------------
// VTK writer
// ---------------------------------------------------------------------------

int vtk_type_for(const Cell& c) {
    switch (c.kind) {
        case CellKind::Polygon:
            if (c.vertices.size() == 3) return 5;
            if (c.vertices.size() == 4) return 9;
            return 7;
        case CellKind::Tetrahedron: return 10;
        case CellKind::Hexahedron: return 12;
        case CellKind::Pyramid: return 14;
        case CellKind::Polyhedron: return 42;
    }
    throw MeshError("unknown cell kind");
}

void write_mesh_impl(const Mesh& mesh, const std::vector<int>* labels, const std::string& path) {
    if (labels && static_cast<int>(labels->size()) != mesh.n_cells())
        throw MeshError("write_mesh: labels size " + std::to_string(labels->size()) +
                        " does not match cell count " + std::to_string(mesh.n_cells()));

    // Assemble connectivity rows up front; hole loops of 2D agglomerates
    // become trailing polygon rows tied to their owner via "hole_parent".
    std::vector<std::vector<int>> rows;
    std::vector<int> types;
    std::vector<int> hole_parent;
    std::vector<int> source_cell;  // mesh cell a row describes (for cell data)
    bool any_holes = false;

    for (int i = 0; i < mesh.n_cells(); ++i) {
        const Cell& c = mesh.cells[i];
        if (c.kind == CellKind::Polyhedron) {
            std::vector<int> row;
            row.push_back(static_cast<int>(c.faces.size()));
            for (const Face& f : c.faces) {
                row.push_back(static_cast<int>(f.loop.size()));
                row.insert(row.end(), f.loop.begin(), f.loop.end());
            }
            rows.push_back(std::move(row));
        } else {
            rows.push_back(c.vertices);
        }
        types.push_back(vtk_type_for(c));
        hole_parent.push_back(-1);
        source_cell.push_back(i);
        if (!c.hole_loops.empty()) any_holes = true;
    }
    for (int i = 0; i < mesh.n_cells(); ++i) {
        for (const auto& hole : mesh.cells[i].hole_loops) {
            rows.push_back(hole);
            types.push_back(hole.size() == 3 ? 5 : hole.size() == 4 ? 9 : 7);
            hole_parent.push_back(i);
            source_cell.push_back(i);
        }
    }

    std::ofstream f = open_out(path);
    f << "# vtk DataFile Version 3.0\n";
    f << "polyagg mesh\n";
    f << "ASCII\n";
    f << "DATASET UNSTRUCTURED_GRID\n";
    f << "POINTS " << mesh.n_vertices() << " double\n";
    for (const Vec3& p : mesh.vertices)
        f << g17(p.x) << ' ' << g17(p.y) << ' ' << g17(p.z) << '\n';

    size_t total = 0;
    for (const auto& row : rows) total += row.size() + 1;
    f << "CELLS " << rows.size() << ' ' << total << '\n';
    for (const auto& row : rows) {
        f << row.size();
        for (int v : row) f << ' ' << v;
        f << '\n';
    }
    f << "CELL_TYPES " << types.size() << '\n';
    for (int t : types) f << t << '\n';

    const bool want_tags = mesh.has_tags();
    const bool want_labels = labels != nullptr;
    if (want_tags || want_labels || any_holes) {
        f << "CELL_DATA " << rows.size() << '\n';
        if (want_labels) {
            f << "SCALARS agglomerate int 1\nLOOKUP_TABLE default\n";
            for (size_t r = 0; r < rows.size(); ++r) f << (*labels)[source_cell[r]] << '\n';
        }
        if (want_tags) {
            f << "SCALARS physical_tag double 1\nLOOKUP_TABLE default\n";
            for (size_t r = 0; r < rows.size(); ++r) f << g17(mesh.tags[source_cell[r]]) << '\n';
        }
        if (any_holes) {
            f << "SCALARS hole_parent int 1\nLOOKUP_TABLE default\n";
            for (size_t r = 0; r < rows.size(); ++r) f << hole_parent[r] << '\n';
        }
    }
    if (!f) throw MeshError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// VTK reader
// ---------------------------------------------------------------------------

struct Lexer {
    std::vector<std::string> toks;
    std::vector<int> tok_line;
    size_t pos = 0;

    int line_here() const {
        if (toks.empty()) return 0;
        return tok_line[std::min(pos, toks.size() - 1)];
    }
    std::string next(const std::string& what) {
        if (pos >= toks.size())
            throw MeshError("vtk: unexpected end of file while reading " + what);
        return toks[pos++];
    }
    bool done() const { return pos >= toks.size(); }
    const std::string* peek() const { return pos < toks.size() ? &toks[pos] : nullptr; }

    long long next_int(const std::string& what) {
        int ln = line_here();
        std::string t = next(what);
        try {
            size_t used = 0;
            long long v = std::stoll(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (...) {
            throw MeshError("vtk: expected an integer for " + what + " at line " +
                            std::to_string(ln) + ", got '" + t + "'");
        }
    }
    double next_double(const std::string& what) {
        int ln = line_here();
        std::string t = next(what);
        try {
            size_t used = 0;
            double v = std::stod(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (...) {
            throw MeshError("vtk: expected a number for " + what + " at line " +
                            std::to_string(ln) + ", got '" + t + "'");
        }
    }
    void expect(const std::string& keyword) {
        int ln = line_here();
        std::string t = next("keyword " + keyword);
        if (t != keyword)
            throw MeshError("vtk: expected '" + keyword + "' at line " + std::to_string(ln) +
                            ", got '" + t + "'");
    }
};

Face canonical_edge(int a, int b) {
    Face f = Face::from_loop({a, b});
    f.loop = f.key;
    return f;
}

Mesh read_mesh_impl(const std::string& path, std::vector<int>* labels_out) {
    std::ifstream f = open_in(path);
    std::vector<std::string> file_lines;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        file_lines.push_back(line);
    }
    if (file_lines.size() < 4 || file_lines[0].rfind("# vtk DataFile", 0) != 0)
        throw MeshError("vtk: '" + path + "' is not a legacy VTK file (bad header line 1)");

    Lexer lex;
    for (size_t ln = 2; ln < file_lines.size(); ++ln) {  // skip header + title
        std::istringstream ss(file_lines[ln]);
        std::string tok;
        while (ss >> tok) {
            lex.toks.push_back(tok);
            lex.tok_line.push_back(static_cast<int>(ln + 1));
        }
    }

    lex.expect("ASCII");
    lex.expect("DATASET");
    lex.expect("UNSTRUCTURED_GRID");

    lex.expect("POINTS");
    long long n_points = lex.next_int("point count");
    if (n_points < 0) throw MeshError("vtk: negative point count");
    lex.next("point data type");
    std::vector<Vec3> points(static_cast<size_t>(n_points));
    for (auto& p : points) {
        p.x = lex.next_double("point x");
        p.y = lex.next_double("point y");
        p.z = lex.next_double("point z");
    }

    lex.expect("CELLS");
    long long n_rows = lex.next_int("cell count");
    long long n_ints = lex.next_int("cell index count");
    std::vector<std::vector<int>> rows(static_cast<size_t>(n_rows));
    long long consumed = 0;
    for (auto& row : rows) {
        long long k = lex.next_int("cell size");
        if (k < 0) throw MeshError("vtk: negative cell size at line " +
                                   std::to_string(lex.line_here()));
        row.resize(static_cast<size_t>(k));
        for (auto& v : row) v = static_cast<int>(lex.next_int("cell vertex id"));
        consumed += k + 1;
    }
    if (consumed != n_ints)
        throw MeshError("vtk: CELLS header announces " + std::to_string(n_ints) +
                        " integers but the section holds " + std::to_string(consumed));

    lex.expect("CELL_TYPES");
    long long n_types = lex.next_int("cell type count");
    if (n_types != n_rows)
        throw MeshError("vtk: CELL_TYPES count " + std::to_string(n_types) +
                        " does not match CELLS count " + std::to_string(n_rows));
    std::vector<int> types(static_cast<size_t>(n_types));
    for (auto& t : types) t = static_cast<int>(lex.next_int("cell type"));

    // Optional cell data.
    std::vector<double> tags;
    std::vector<int> labels, hole_parent;
    bool have_tags = false, have_labels = false, have_holes = false;
    if (!lex.done()) {
        lex.expect("CELL_DATA");
        long long n_data = lex.next_int("cell data count");
        if (n_data != n_rows)
            throw MeshError("vtk: CELL_DATA count " + std::to_string(n_data) +
                            " does not match cell count " + std::to_string(n_rows));
        while (!lex.done()) {
            lex.expect("SCALARS");
            std::string name = lex.next("scalar name");
            lex.next("scalar data type");
            if (lex.peek() && *lex.peek() != "LOOKUP_TABLE") {
                long long comps = lex.next_int("scalar component count");
                if (comps != 1)
                    throw MeshError("vtk: scalar '" + name + "' has " + std::to_string(comps) +
                                    " components; only 1 is supported");
            }
            lex.expect("LOOKUP_TABLE");
            lex.next("lookup table name");
            if (name == "physical_tag") {
                tags.resize(static_cast<size_t>(n_rows));
                for (auto& v : tags) v = lex.next_double("physical_tag value");
                have_tags = true;
            } else if (name == "agglomerate") {
                labels.resize(static_cast<size_t>(n_rows));
                for (auto& v : labels) v = static_cast<int>(lex.next_int("agglomerate value"));
                have_labels = true;
            } else if (name == "hole_parent") {
                hole_parent.resize(static_cast<size_t>(n_rows));
                for (auto& v : hole_parent) v = static_cast<int>(lex.next_int("hole_parent value"));
                have_holes = true;
            } else {
                for (long long i = 0; i < n_rows; ++i) lex.next_double("cell data value");
            }
        }
    }

    // Build the mesh in file order so hole_parent indices line up.
    Mesh mesh;
    mesh.dim = 2;
    for (int t : types)
        if (t == 10 || t == 12 || t == 14 || t == 42) mesh.dim = 3;
    mesh.vertices = points;

    for (size_t r = 0; r < rows.size(); ++r) {
        const std::vector<int>& row = rows[r];
        auto need = [&](size_t k, const char* kind) {
            if (row.size() != k)
                throw MeshError(std::string("vtk: ") + kind + " cell " + std::to_string(r) +
                                " has " + std::to_string(row.size()) + " vertices, expected " +
                                std::to_string(k));
        };
        switch (types[r]) {
            case 5: need(3, "triangle"); mesh.add_polygon(row); break;
            case 9: need(4, "quad"); mesh.add_polygon(row); break;
            case 7:
                if (row.size() < 3)
                    throw MeshError("vtk: polygon cell " + std::to_string(r) +
                                    " has fewer than 3 vertices");
                mesh.add_polygon(row);
                break;
            case 10: need(4, "tetrahedron");
                mesh.add_tetrahedron({row[0], row[1], row[2], row[3]});
                break;
            case 12: need(8, "hexahedron");
                mesh.add_hexahedron({row[0], row[1], row[2], row[3],
                                     row[4], row[5], row[6], row[7]});
                break;
            case 14: need(5, "pyramid");
                mesh.add_pyramid({row[0], row[1], row[2], row[3], row[4]});
                break;
            case 42: {
                size_t p = 0;
                auto take = [&](const char* what) {
                    if (p >= row.size())
                        throw MeshError("vtk: polyhedron cell " + std::to_string(r) +
                                        ": face stream truncated while reading " + what);
                    return row[p++];
                };
                int n_faces = take("face count");
                std::vector<std::vector<int>> face_loops;
                face_loops.reserve(static_cast<size_t>(n_faces));
                for (int q = 0; q < n_faces; ++q) {
                    int nv = take("face vertex count");
                    std::vector<int> loop(static_cast<size_t>(nv));
                    for (auto& v : loop) v = take("face vertex id");
                    face_loops.push_back(std::move(loop));
                }
                if (p != row.size())
                    throw MeshError("vtk: polyhedron cell " + std::to_string(r) + " has " +
                                    std::to_string(row.size() - p) +
                                    " unused integers after its face stream");
                mesh.add_polyhedron(std::move(face_loops));
                break;
            }
            default:
                throw MeshError("vtk: unsupported cell type " + std::to_string(types[r]) +
                                " (cell " + std::to_string(r) + ")");
        }
    }

    // Fold hole rows back into their owners.
    if (have_holes) {
        std::vector<bool> is_hole(rows.size(), false);
        for (size_t r = 0; r < rows.size(); ++r) {
            int parent = hole_parent[r];
            if (parent < 0) continue;
            if (parent >= static_cast<int>(r) || hole_parent[parent] != -1)
                throw MeshError("vtk: hole cell " + std::to_string(r) +
                                " points at invalid parent " + std::to_string(parent));
            Cell& owner = mesh.cells[parent];
            const std::vector<int>& loop = mesh.cells[r].vertices;
            owner.hole_loops.push_back(loop);
            const int k = static_cast<int>(loop.size());
            for (int i = 0; i < k; ++i)
                owner.faces.push_back(canonical_edge(loop[i], loop[(i + 1) % k]));
            std::sort(owner.faces.begin(), owner.faces.end(),
                      [](const Face& a, const Face& b) { return a.key < b.key; });
            is_hole[r] = true;
        }
        std::vector<Cell> kept;
        std::vector<double> kept_tags;
        std::vector<int> kept_labels;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (is_hole[r]) continue;
            kept.push_back(std::move(mesh.cells[r]));
            if (have_tags) kept_tags.push_back(tags[r]);
            if (have_labels) kept_labels.push_back(labels[r]);
        }
        mesh.cells = std::move(kept);
        tags = std::move(kept_tags);
        labels = std::move(kept_labels);
    }

    if (have_tags) mesh.tags = std::move(tags);
    if (labels_out) {
        labels_out->clear();
        if (have_labels) *labels_out = std::move(labels);
    }
    validate(mesh);
    return mesh;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

constexpr char kMagic[4] = {'P', 'A', 'G', 'N'};
constexpr std::uint32_t kVersion = 1;

void wbytes(std::ofstream& f, const void* p, size_t n) {
    f.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}
void wu32(std::ofstream& f, std::uint32_t v) { wbytes(f, &v, 4); }
void wu64(std::ofstream& f, std::uint64_t v) { wbytes(f, &v, 8); }
void wstr(std::ofstream& f, const std::string& s) {
    wu64(f, s.size());
    wbytes(f, s.data(), s.size());
}

void rbytes(std::ifstream& f, void* p, size_t n) {
    f.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(f.gcount()) != n) throw MeshError("checkpoint: truncated file");
}
std::uint32_t ru32(std::ifstream& f) { std::uint32_t v; rbytes(f, &v, 4); return v; }
std::uint64_t ru64(std::ifstream& f) { std::uint64_t v; rbytes(f, &v, 8); return v; }
std::string rstr(std::ifstream& f) {
    std::uint64_t n = ru64(f);
    if (n > (1u << 20)) throw MeshError("checkpoint: implausible string length");
    std::string s(static_cast<size_t>(n), '\0');
    rbytes(f, s.data(), s.size());
    return s;
}

template <typename Net>
Checkpoint checkpoint_of_net(Net& net) {
    Checkpoint ck;
    ck.arch = net.descriptor();
    ck.seed = net.seed;
    for (Param* p : net.params()) ck.params.emplace_back(p->name, p->value);
    return ck;
}

template <typename Net>
void restore_net(Net& net, const Checkpoint& ck) {
    const std::string mine = net.descriptor();
    if (ck.arch != mine)
        throw MeshError("checkpoint architecture mismatch:\n  file: " + ck.arch +
                        "\n  net:  " + mine);
    auto ps = net.params();
    if (ps.size() != ck.params.size())
        throw MeshError("checkpoint holds " + std::to_string(ck.params.size()) +
                        " parameters, net '" + mine + "' has " + std::to_string(ps.size()));
    for (size_t i = 0; i < ps.size(); ++i) {
        const auto& [name, value] = ck.params[i];
        if (ps[i]->name != name)
            throw MeshError("checkpoint parameter " + std::to_string(i) + " is '" + name +
                            "', net expects '" + ps[i]->name + "'");
        if (!ps[i]->value.same_shape(value))
            throw MeshError("checkpoint parameter '" + name + "' has shape " +
                            std::to_string(value.rows) + "x" + std::to_string(value.cols) +
                            ", net expects " + std::to_string(ps[i]->value.rows) + "x" +
                            std::to_string(ps[i]->value.cols));
        ps[i]->value = value;
    }
    net.seed = ck.seed;
}

// ---------------------------------------------------------------------------
// Dataset index
// ---------------------------------------------------------------------------

std::vector<std::string> split_tabs(const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t tab = s.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, tab - start));
        start = tab + 1;
    }
}

}  // namespace

Mesh read_mesh(const std::string& path, std::vector<int>* labels_out) {
    return read_mesh_impl(path, labels_out);
}

void write_mesh(const Mesh& mesh, const std::string& path) {
    write_mesh_impl(mesh, nullptr, path);
}

void write_mesh(const Mesh& mesh, const std::vector<int>& labels, const std::string& path) {
    write_mesh_impl(mesh, &labels, path);
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    std::ofstream f = open_out(path, std::ios::binary);
    wbytes(f, kMagic, 4);
    wu32(f, kVersion);
    wstr(f, ck.arch);
    wu64(f, ck.seed);
    wu32(f, static_cast<std::uint32_t>(ck.params.size()));
    for (const auto& [name, mat] : ck.params) {
        wstr(f, name);
        wu32(f, static_cast<std::uint32_t>(mat.rows));
        wu32(f, static_cast<std::uint32_t>(mat.cols));
        wbytes(f, mat.a.data(), mat.a.size() * sizeof(double));
    }
    if (!f) throw MeshError("write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f = open_in(path, std::ios::binary);
    char magic[4];
    rbytes(f, magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw MeshError("checkpoint: '" + path + "' has the wrong magic bytes");
    std::uint32_t version = ru32(f);
    if (version != kVersion)
        throw MeshError("checkpoint: unsupported version " + std::to_string(version));
    Checkpoint ck;
    ck.arch = rstr(f);
    ck.seed = ru64(f);
    std::uint32_t n = ru32(f);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::string name = rstr(f);
        int rows = static_cast<int>(ru32(f));
        int cols = static_cast<int>(ru32(f));
        if (rows < 0 || cols < 0 || static_cast<long long>(rows) * cols > (1ll << 28))
            throw MeshError("checkpoint: implausible shape for parameter '" + name + "'");
        Matrix m(rows, cols);
        rbytes(f, m.a.data(), m.a.size() * sizeof(double));
        ck.params.emplace_back(std::move(name), std::move(m));
    }
    return ck;
}

Checkpoint checkpoint_of(const SageNet& net) {
    return checkpoint_of_net(const_cast<SageNet&>(net));
}
Checkpoint checkpoint_of(const ActorCriticNet& net) {
    return checkpoint_of_net(const_cast<ActorCriticNet&>(net));
}
Checkpoint checkpoint_of(const RefinerNet& net) {
    return checkpoint_of_net(const_cast<RefinerNet&>(net));
}

void restore(SageNet& net, const Checkpoint& ck) { restore_net(net, ck); }
void restore(ActorCriticNet& net, const Checkpoint& ck) { restore_net(net, ck); }
void restore(RefinerNet& net, const Checkpoint& ck) { restore_net(net, ck); }

namespace {
std::vector<int> descriptor_dims(const Checkpoint& ck, const std::string& family, size_t count) {
    std::istringstream ss(ck.arch);
    std::string name;
    ss >> name;
    if (name != family)
        throw MeshError("checkpoint '" + ck.arch + "' is not a " + family + " model");
    std::vector<int> dims(count);
    for (auto& d : dims)
        if (!(ss >> d)) throw MeshError("checkpoint descriptor '" + ck.arch + "' is malformed");
    return dims;
}
}  // namespace

SageNet sage_from_checkpoint(const Checkpoint& ck) {
    std::istringstream ss(ck.arch);
    std::string family;
    ss >> family;
    if (family != "sage-base" && family != "sage-hetero")
        throw MeshError("checkpoint '" + ck.arch + "' is not a sage model");
    int h_sage = 0, h_dense = 0, in = 0, out = 0;
    if (!(ss >> h_sage >> h_dense >> in >> out))
        throw MeshError("checkpoint descriptor '" + ck.arch + "' is malformed");
    SageNet net(h_sage, h_dense, in, out, ck.seed, family == "sage-hetero");
    restore_net(net, ck);
    return net;
}

ActorCriticNet actor_critic_from_checkpoint(const Checkpoint& ck) {
    auto d = descriptor_dims(ck, "actor-critic", 2);
    ActorCriticNet net(d[0], d[1], ck.seed);
    restore_net(net, ck);
    return net;
}

RefinerNet refiner_from_checkpoint(const Checkpoint& ck) {
    auto d = descriptor_dims(ck, "refiner", 2);
    RefinerNet net(d[0], d[1], ck.seed);
    restore_net(net, ck);
    return net;
}

void write_graph_cache(const Graph& g, const std::string& path) {
    std::ofstream f = open_out(path);
    f << "polyagg-graph 1\n";
    f << g.n << ' ' << g.dim << ' ' << (g.has_tag() ? 1 : 0) << '\n';
    for (int i = 0; i < g.n; ++i) {
        f << g17(g.node_weight[i]) << ' ' << g17(g.centroid[i].x) << ' ' << g17(g.centroid[i].y)
          << ' ' << g17(g.centroid[i].z);
        if (g.has_tag()) f << ' ' << g17(g.tag[i]);
        f << '\n';
    }
    std::vector<std::array<double, 3>> edges;  // u, v, w with u < v
    for (int u = 0; u < g.n; ++u)
        for (const auto& [v, w] : g.adj[u])
            if (u < v) edges.push_back({static_cast<double>(u), static_cast<double>(v), w});
    std::sort(edges.begin(), edges.end());
    f << edges.size() << '\n';
    for (const auto& e : edges)
        f << static_cast<int>(e[0]) << ' ' << static_cast<int>(e[1]) << ' ' << g17(e[2]) << '\n';
    if (!f) throw MeshError("write failed for '" + path + "'");
}

Graph read_graph_cache(const std::string& path) {
    std::ifstream f = open_in(path);
    std::string tag;
    int version = 0;
    if (!(f >> tag >> version) || tag != "polyagg-graph" || version != 1)
        throw MeshError("graph cache: '" + path + "' has an unrecognized header");
    Graph g;
    int tagged = 0;
    if (!(f >> g.n >> g.dim >> tagged) || g.n < 0)
        throw MeshError("graph cache: malformed size line");
    g.adj.assign(g.n, {});
    g.node_weight.resize(g.n);
    g.centroid.resize(g.n);
    if (tagged) g.tag.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        if (!(f >> g.node_weight[i] >> g.centroid[i].x >> g.centroid[i].y >> g.centroid[i].z))
            throw MeshError("graph cache: malformed node record " + std::to_string(i));
        if (tagged && !(f >> g.tag[i]))
            throw MeshError("graph cache: malformed node record " + std::to_string(i));
    }
    long long m = 0;
    if (!(f >> m) || m < 0) throw MeshError("graph cache: malformed edge count");
    for (long long e = 0; e < m; ++e) {
        int u = 0, v = 0;
        double w = 0;
        if (!(f >> u >> v >> w) || u < 0 || v < 0 || u >= g.n || v >= g.n)
            throw MeshError("graph cache: malformed edge record " + std::to_string(e));
        g.add_edge(u, v, w);
    }
    return g;
}

void write_metrics_csv(const QualityReport& report, const std::string& path) {
    if (report.n_elements() == 0) throw MeshError("write_metrics_csv: empty report");
    std::ofstream f = open_out(path);
    const bool hetero = !report.heterogeneity.empty();
    f << "element,circle_ratio," << (report.dim == 2 ? "area_perimeter_ratio" : "sphericity")
      << ",uniformity_factor,volumes_difference";
    if (hetero) f << ",heterogeneity_preservation";
    f << '\n';
    for (int i = 0; i < report.n_elements(); ++i) {
        f << i << ',' << g9(report.circle_ratio[i]) << ',' << g9(report.shape[i]) << ','
          << g9(report.uniformity[i]) << ',' << g9(report.volume_deviation[i]);
        if (hetero) f << ',' << g9(report.heterogeneity[i]);
        f << '\n';
    }
    if (!f) throw MeshError("write failed for '" + path + "'");
}

void write_history_csv(const GnnHistory& history, const std::string& path) {
    if (history.train_loss.empty()) throw MeshError("write_history_csv: empty history");
    std::ofstream f = open_out(path);
    f << "epoch,train_loss,val_loss\n";
    for (size_t e = 0; e < history.train_loss.size(); ++e)
        f << (e + 1) << ',' << g9(history.train_loss[e]) << ',' << g9(history.val_loss[e]) << '\n';
    if (!f) throw MeshError("write failed for '" + path + "'");
}

void write_history_csv(const RlHistory& history, const std::string& path) {
    if (history.returns.empty()) throw MeshError("write_history_csv: empty history");
    std::ofstream f = open_out(path);
    f << "episode,return,final_nc\n";
    for (size_t e = 0; e < history.returns.size(); ++e)
        f << (e + 1) << ',' << g9(history.returns[e]) << ',' << g9(history.final_nc[e]) << '\n';
    if (!f) throw MeshError("write failed for '" + path + "'");
}

void write_dataset_index(const std::vector<DatasetEntry>& entries, const std::string& path) {
    std::ofstream f = open_out(path);
    for (const DatasetEntry& e : entries)
        f << e.kind << '\t' << e.seed << '\t' << e.cells << '\t' << e.mesh_path << '\t'
          << e.graph_path << '\n';
    if (!f) throw MeshError("write failed for '" + path + "'");
}

std::vector<DatasetEntry> read_dataset_index(const std::string& path) {
    std::ifstream f = open_in(path);
    std::vector<DatasetEntry> out;
    std::string line;
    int ln = 0;
    while (std::getline(f, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_tabs(line);
        if (fields.size() != 5)
            throw MeshError("dataset index: line " + std::to_string(ln) + " has " +
                            std::to_string(fields.size()) + " fields, expected 5");
        DatasetEntry e;
        e.kind = fields[0];
        try {
            e.seed = std::stoull(fields[1]);
            e.cells = std::stoi(fields[2]);
        } catch (...) {
            throw MeshError("dataset index: malformed numbers at line " + std::to_string(ln));
        }
        e.mesh_path = fields[3];
        e.graph_path = fields[4];
        out.push_back(e);
    }
    return out;
}

}  // namespace polyagg
