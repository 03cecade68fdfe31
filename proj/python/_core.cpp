// Python bindings for the agglomeration library: mesh generation and I/O,
// dual graphs, partitioning models, training, and quality metrics.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "polyagg/baselines.hpp"
#include "polyagg/generate.hpp"
#include "polyagg/io.hpp"
#include "polyagg/metrics.hpp"
#include "polyagg/nets.hpp"
#include "polyagg/partition.hpp"
#include "polyagg/rl.hpp"

namespace py = pybind11;
using namespace polyagg;

namespace {

std::unique_ptr<BisectionModel> make_model(const std::string& name, const std::string& checkpoint,
                                           std::uint64_t seed,
                                           std::optional<SageNet>& sage,
                                           std::optional<ActorCriticNet>& actor) {
    if (name == "classic") return std::make_unique<ClassicModel>();
    if (name == "kmeans") return std::make_unique<KmeansModel>(seed);
    if (name == "sage" || name == "sage-hetero") {
        if (checkpoint.empty()) throw MeshError("model '" + name + "' requires a checkpoint");
        sage = sage_from_checkpoint(load_checkpoint(checkpoint));
        return std::make_unique<GnnModel>(&*sage, seed);
    }
    if (name == "rl") {
        if (checkpoint.empty()) throw MeshError("model 'rl' requires a checkpoint");
        actor = actor_critic_from_checkpoint(load_checkpoint(checkpoint));
        return std::make_unique<RlModel>(&*actor);
    }
    throw MeshError("unknown model '" + name + "'");
}

AggloMode mode_from_name(const std::string& name) {
    if (name == "kway") return AggloMode::Kway;
    if (name == "nref") return AggloMode::Nref;
    if (name == "target") return AggloMode::TargetSize;
    if (name == "multfactor") return AggloMode::MultFactor;
    if (name == "segregated") return AggloMode::Segregated;
    if (name == "coarsen") return AggloMode::Coarsen;
    if (name == "multilevel") return AggloMode::Multilevel;
    throw MeshError("unknown mode '" + name + "'");
}

py::dict summary_dict(const QualitySummary& s) {
    py::dict d;
    d["min"] = s.min;
    d["q1"] = s.q1;
    d["median"] = s.median;
    d["q3"] = s.q3;
    d["max"] = s.max;
    d["mean"] = s.mean;
    return d;
}

py::dict report_dict(const QualityReport& r) {
    py::dict d;
    d["dim"] = r.dim;
    d["elements"] = r.n_elements();
    d["circle_ratio"] = summary_dict(r.circle_ratio_summary);
    d[r.dim == 2 ? "area_perimeter_ratio" : "sphericity"] = summary_dict(r.shape_summary);
    d["uniformity_factor"] = summary_dict(r.uniformity_summary);
    d["volumes_difference"] = summary_dict(r.volume_deviation_summary);
    if (!r.heterogeneity.empty())
        d["heterogeneity_preservation"] = summary_dict(r.heterogeneity_summary);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Polytopal mesh agglomeration by recursive graph bisection";

    py::register_exception<MeshError>(m, "MeshError");

    py::class_<Mesh>(m, "Mesh")
        .def_property_readonly("dim", [](const Mesh& mesh) { return mesh.dim; })
        .def_property_readonly("n_cells", &Mesh::n_cells)
        .def_property_readonly("n_vertices", &Mesh::n_vertices)
        .def_property_readonly("tags", [](const Mesh& mesh) { return mesh.tags; })
        .def_property_readonly("members", [](const Mesh& mesh) { return mesh.members; })
        .def("__repr__", [](const Mesh& mesh) {
            return "<polyagg.Mesh " + std::to_string(mesh.dim) + "D, " +
                   std::to_string(mesh.n_cells()) + " cells, " +
                   std::to_string(mesh.n_vertices()) + " vertices>";
        });

    py::class_<Graph>(m, "Graph")
        .def_property_readonly("n", [](const Graph& g) { return g.n; })
        .def_property_readonly("dim", [](const Graph& g) { return g.dim; })
        .def_property_readonly("weights", [](const Graph& g) { return g.node_weight; })
        .def("neighbors", [](const Graph& g, int u) { return g.adj.at(u); }, py::arg("u"))
        .def("__repr__", [](const Graph& g) {
            return "<polyagg.Graph " + std::to_string(g.n) + " nodes>";
        });

    m.def(
        "generate_mesh",
        [](const std::string& kind, std::uint64_t seed, int structured_n, int delaunay_points,
           int voronoi_seeds, int cube_n) {
            DatasetSpec spec;
            spec.structured_n = structured_n;
            spec.delaunay_points = delaunay_points;
            spec.voronoi_seeds = voronoi_seeds;
            spec.cube_n = cube_n;
            return generate_kind(kind, spec, seed);
        },
        py::arg("kind"), py::arg("seed") = 0, py::arg("structured_n") = 14,
        py::arg("delaunay_points") = 110, py::arg("voronoi_seeds") = 200, py::arg("cube_n") = 4,
        "Generate one mesh of the named kind (structured_quads, random_delaunay, ...)");

    m.def(
        "read_mesh",
        [](const std::string& path) {
            std::vector<int> labels;
            Mesh mesh = read_mesh(path, &labels);
            return py::make_tuple(mesh, labels.empty() ? py::object(py::none())
                                                       : py::object(py::cast(labels)));
        },
        py::arg("path"), "Read a legacy VTK mesh; returns (mesh, labels_or_None)");

    m.def(
        "write_mesh",
        [](const Mesh& mesh, const std::string& path,
           const std::optional<std::vector<int>>& labels) {
            if (labels) write_mesh(mesh, *labels, path);
            else write_mesh(mesh, path);
        },
        py::arg("mesh"), py::arg("path"), py::arg("labels") = py::none(),
        "Write a mesh as legacy VTK, optionally with per-cell agglomerate labels");

    m.def("dual_graph", &build_dual_graph, py::arg("mesh"),
          "Facet-connectivity dual graph with volume weights and centroid coordinates");

    m.def(
        "normalized_cut",
        [](const Graph& g, const std::vector<int>& labels) { return normalized_cut(g, labels); },
        py::arg("graph"), py::arg("labels"));

    m.def(
        "classic_bisect",
        [](const Graph& g) { return classic_bisect(g); },
        py::arg("graph"), "Greedy coordinate-split bisection with local refinement");

    m.def("merge", &merge_cells, py::arg("mesh"), py::arg("labels"),
          "Merge labeled cells into polytopal elements");

    m.def(
        "agglomerate",
        [](const Mesh& mesh, const std::string& model, const std::string& mode, double param,
           const std::string& checkpoint, const std::string& refiner,
           const std::string& refiner_checkpoint, int threshold, const std::vector<int>& cells,
           std::uint64_t seed) {
            std::optional<SageNet> sage;
            std::optional<ActorCriticNet> actor;
            std::optional<RefinerNet> rnet;
            auto m_ptr = make_model(model, checkpoint, seed, sage, actor);

            AggloRequest req;
            req.mode = mode_from_name(mode);
            switch (req.mode) {
                case AggloMode::Kway: req.k = static_cast<int>(param); break;
                case AggloMode::Nref: req.nref = static_cast<int>(param); break;
                case AggloMode::TargetSize: req.target_size = param; break;
                case AggloMode::MultFactor:
                case AggloMode::Segregated: req.mult_factor = param; break;
                case AggloMode::Coarsen:
                    req.inner_mode = AggloMode::Nref;
                    req.nref = static_cast<int>(param);
                    req.cells = cells;
                    break;
                case AggloMode::Multilevel:
                    req.nref = static_cast<int>(param);
                    req.threshold = threshold;
                    break;
            }
            std::unique_ptr<Refiner> ref;
            if (refiner == "fm") ref = std::make_unique<FmRefiner>();
            else if (refiner == "rl") {
                if (refiner_checkpoint.empty())
                    throw MeshError("refiner 'rl' requires refiner_checkpoint");
                rnet = refiner_from_checkpoint(load_checkpoint(refiner_checkpoint));
                ref = std::make_unique<RlRefiner>(&*rnet);
            }
            req.refiner = ref.get();

            AggloResult result = agglomerate(mesh, *m_ptr, req);
            Graph g = m_ptr->get_graph(mesh);
            py::dict out;
            out["labels"] = result.labels;
            out["merged"] = result.merged;
            out["hierarchy"] = result.hierarchy;
            out["nc"] = result.hierarchy.empty()
                            ? normalized_cut(g, result.labels)
                            : normalized_cut(g, result.hierarchy.front());
            return out;
        },
        py::arg("mesh"), py::arg("model") = "classic", py::arg("mode") = "nref",
        py::arg("param") = 1.0, py::arg("checkpoint") = "", py::arg("refiner") = "none",
        py::arg("refiner_checkpoint") = "", py::arg("threshold") = 500,
        py::arg("cells") = std::vector<int>{}, py::arg("seed") = 0,
        "Agglomerate a mesh; returns dict with labels, merged mesh, hierarchy, and nc");

    m.def(
        "quality",
        [](const Mesh& merged, const std::vector<double>& fine_tags) {
            return report_dict(quality_report(merged, fine_tags));
        },
        py::arg("mesh"), py::arg("fine_tags") = std::vector<double>{},
        "Per-element quality metric summaries of an agglomerated mesh");

    m.def(
        "train_gnn",
        [](const std::vector<std::string>& mesh_paths, const std::string& out, bool hetero,
           int h_sage, int h_dense, int epochs, double lr, double wd, int batch,
           std::uint64_t seed) {
            std::vector<Graph> graphs;
            int dim = 0;
            for (const std::string& p : mesh_paths) {
                Mesh mesh = read_mesh(p);
                dim = mesh.dim;
                graphs.push_back(build_dual_graph(mesh));
            }
            if (graphs.empty()) throw MeshError("no training meshes given");
            GnnTrainConfig cfg;
            cfg.epochs = epochs;
            cfg.lr = lr;
            cfg.weight_decay = wd;
            cfg.batch = batch;
            cfg.seed = seed;
            SageNet net(h_sage, h_dense, dim + 1 + (hetero ? 1 : 0), 2, seed, hetero);
            GnnHistory history = train_gnn(net, graphs, cfg);
            save_checkpoint(checkpoint_of(net), out);
            py::dict d;
            d["train_loss"] = history.train_loss;
            d["val_loss"] = history.val_loss;
            return d;
        },
        py::arg("mesh_paths"), py::arg("out"), py::arg("hetero") = false,
        py::arg("h_sage") = 64, py::arg("h_dense") = 32, py::arg("epochs") = 300,
        py::arg("lr") = 1e-5, py::arg("wd") = 1e-5, py::arg("batch") = 4, py::arg("seed") = 0,
        "Train a graph-network bisection model on meshes; writes a checkpoint");

    m.def(
        "train_rl",
        [](const std::vector<std::string>& mesh_paths, const std::string& out,
           const std::string& role, int episodes, int hidden, std::uint64_t seed) {
            std::vector<Graph> graphs;
            int dim = 0;
            for (const std::string& p : mesh_paths) {
                Mesh mesh = read_mesh(p);
                dim = mesh.dim;
                graphs.push_back(build_dual_graph(mesh));
            }
            if (graphs.empty()) throw MeshError("no training meshes given");
            A2CConfig cfg;
            RlHistory history;
            if (role == "partitioner") {
                ActorCriticNet net(dim + 2, hidden, seed);
                history = a2c_train_partitioner(net, graphs, cfg, episodes, seed);
                save_checkpoint(checkpoint_of(net), out);
            } else if (role == "refiner") {
                RefinerNet net(4, hidden, seed);
                history = a2c_train_refiner(net, graphs, cfg, episodes, seed);
                save_checkpoint(checkpoint_of(net), out);
            } else {
                throw MeshError("role must be 'partitioner' or 'refiner'");
            }
            py::dict d;
            d["returns"] = history.returns;
            d["final_nc"] = history.final_nc;
            return d;
        },
        py::arg("mesh_paths"), py::arg("out"), py::arg("role") = "partitioner",
        py::arg("episodes") = 500, py::arg("hidden") = 64, py::arg("seed") = 0,
        "Train an A2C partitioner or refiner on meshes; writes a checkpoint");
}
