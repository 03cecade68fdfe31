// Command-line front end: mesh/dataset generation, GNN and RL training,
// agglomeration, quality metrics, and benchmarking.
//
// Exit codes: 0 success, 1 invalid flags, 2 I/O failure, 3 agglomeration
// failure. Progress and timing go to stderr; results to stdout and files.
// Output files are written to a temporary name and renamed on success.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "polyagg/baselines.hpp"
#include "polyagg/generate.hpp"
#include "polyagg/io.hpp"
#include "polyagg/metrics.hpp"
#include "polyagg/nets.hpp"
#include "polyagg/partition.hpp"
#include "polyagg/rl.hpp"

namespace fs = std::filesystem;
using namespace polyagg;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kExitFlags = 1;
constexpr int kExitIo = 2;
constexpr int kExitAgglo = 3;

bool g_verbose = false;

void vlog(const std::string& msg) {
    if (g_verbose) std::cerr << "[polyagg] " << msg << "\n";
}

class FlagError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Writes through a temporary file so failures never leave partial output.
template <typename Fn>
void write_atomic(const std::string& path, Fn&& writer) {
    const std::string tmp = path + ".tmp";
    writer(tmp);
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw MeshError("cannot move temporary file onto '" + path + "': " + ec.message());
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

// "name:value" pair lists used by --kinds and --modes.
std::pair<std::string, std::string> split_pair(const std::string& s) {
    size_t colon = s.find(':');
    if (colon == std::string::npos) return {s, ""};
    return {s.substr(0, colon), s.substr(colon + 1)};
}

std::vector<Graph> load_graphs(const std::string& dataset_dir, int dims, bool tagged_only) {
    std::string index = (fs::path(dataset_dir) / "index.tsv").string();
    std::vector<Graph> graphs;
    for (const DatasetEntry& e : read_dataset_index(index)) {
        Graph g = read_graph_cache(e.graph_path);
        if (g.dim != dims) continue;
        if (tagged_only && !g.has_tag()) continue;
        graphs.push_back(std::move(g));
    }
    if (graphs.empty())
        throw MeshError("dataset '" + dataset_dir + "' holds no usable " +
                        std::to_string(dims) + "D graphs");
    return graphs;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string out;
    std::vector<std::string> kinds;
    std::uint64_t seed = 0;
    DatasetSpec spec;
};

int run_generate(const GenerateArgs& a) {
    DatasetSpec spec = a.spec;
    spec.master_seed = a.seed;
    for (const std::string& item : a.kinds) {
        auto [kind, count] = split_pair(item);
        int n = 1;
        if (!count.empty()) {
            try {
                n = std::stoi(count);
            } catch (...) {
                throw FlagError("--kinds entry '" + item + "' has a non-numeric count");
            }
        }
        if (n <= 0) throw FlagError("--kinds entry '" + item + "' has a non-positive count");
        spec.counts[kind] += n;
    }
    if (spec.counts.empty()) throw FlagError("--kinds selected no generators");

    auto t0 = Clock::now();
    std::vector<DatasetEntry> entries;
    try {
        entries = build_dataset(spec, a.out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    vlog("generated " + std::to_string(entries.size()) + " meshes in " +
         std::to_string(elapsed(t0)) + "s");
    std::cout << "meshes=" << entries.size() << " index=" << (fs::path(a.out) / "index.tsv").string()
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string dataset, arch = "sage", out, history;
    int dims = 2;
    int epochs = -1, batch = 4, h_sage = -1, h_dense = -1;
    double lr = -1.0, wd = 1e-5, val_fraction = 0.1, hetero_a = 1.0;
    bool no_augment = false;
    std::uint64_t seed = 0;
};

int run_train(const TrainArgs& a) {
    const bool hetero = a.arch == "sage-hetero";
    GnnTrainConfig cfg;
    cfg.epochs = a.epochs > 0 ? a.epochs : (a.dims == 2 ? 300 : 400);
    cfg.lr = a.lr >= 0 ? a.lr : (a.dims == 2 ? 1e-5 : 1e-4);
    cfg.weight_decay = a.wd;
    cfg.batch = a.batch;
    cfg.seed = a.seed;
    cfg.hetero_a = a.hetero_a;
    cfg.val_fraction = a.val_fraction;
    cfg.augment_rotations = !a.no_augment;

    std::vector<Graph> graphs;
    try {
        graphs = load_graphs(a.dataset, a.dims, hetero);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    vlog("training on " + std::to_string(graphs.size()) + " graphs");

    const int h_sage = a.h_sage > 0 ? a.h_sage : (a.dims == 2 ? 64 : 128);
    const int h_dense = a.h_dense > 0 ? a.h_dense : (a.dims == 2 ? 32 : 64);
    const int in_features = a.dims + 1 + (hetero ? 1 : 0);
    SageNet net(h_sage, h_dense, in_features, 2, a.seed, hetero);

    auto t0 = Clock::now();
    GnnHistory history = train_gnn(net, graphs, cfg);
    vlog("trained " + std::to_string(cfg.epochs) + " epochs in " +
         std::to_string(elapsed(t0)) + "s");

    try {
        write_atomic(a.out, [&](const std::string& p) { save_checkpoint(checkpoint_of(net), p); });
        if (!a.history.empty())
            write_atomic(a.history, [&](const std::string& p) { write_history_csv(history, p); });
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << "epochs=" << cfg.epochs << " train_loss=" << history.train_loss.back()
              << " val_loss=" << history.val_loss.back() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train-rl
// ---------------------------------------------------------------------------

struct TrainRlArgs {
    std::string dataset, role = "partitioner", out, history;
    int dims = 2, episodes = 500, hidden = 64;
    A2CConfig cfg;
    std::uint64_t seed = 0;
};

int run_train_rl(const TrainRlArgs& a) {
    std::vector<Graph> graphs;
    try {
        graphs = load_graphs(a.dataset, a.dims, false);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    vlog("training " + a.role + " on " + std::to_string(graphs.size()) + " graphs");

    auto t0 = Clock::now();
    RlHistory history;
    Checkpoint ck;
    if (a.role == "partitioner") {
        ActorCriticNet net(a.dims + 2, a.hidden, a.seed);
        history = a2c_train_partitioner(net, graphs, a.cfg, a.episodes, a.seed);
        ck = checkpoint_of(net);
    } else {
        RefinerNet net(4, a.hidden, a.seed);
        history = a2c_train_refiner(net, graphs, a.cfg, a.episodes, a.seed);
        ck = checkpoint_of(net);
    }
    vlog("trained " + std::to_string(a.episodes) + " episodes in " +
         std::to_string(elapsed(t0)) + "s");

    try {
        write_atomic(a.out, [&](const std::string& p) { save_checkpoint(ck, p); });
        if (!a.history.empty())
            write_atomic(a.history, [&](const std::string& p) { write_history_csv(history, p); });
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << "episodes=" << a.episodes << " mean_return=" << [&] {
        double s = 0;
        for (double r : history.returns) s += r;
        return s / static_cast<double>(history.returns.size());
    }() << " final_nc=" << history.final_nc.back() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// agglomerate
// ---------------------------------------------------------------------------

struct AggloArgs {
    std::string mesh, model = "classic", checkpoint, mode = "nref", refiner = "none";
    std::string refiner_checkpoint, out, merged_out, metrics, cells;
    double param = 1.0;
    int threshold = 500;
    std::uint64_t seed = 0;
};

int positive_int_param(double v, const std::string& mode) {
    int k = static_cast<int>(v);
    if (v != static_cast<double>(k) || k <= 0)
        throw FlagError("--param must be a positive integer for mode '" + mode + "'");
    return k;
}

int run_agglomerate(const AggloArgs& a) {
    const bool learned = a.model == "sage" || a.model == "sage-hetero" || a.model == "rl";
    if (learned && a.checkpoint.empty())
        throw FlagError("--model " + a.model + " requires --checkpoint");
    if (a.refiner == "rl" && a.refiner_checkpoint.empty())
        throw FlagError("--refiner rl requires --refiner-checkpoint");

    AggloRequest req;
    if (a.mode == "kway") {
        req.mode = AggloMode::Kway;
        req.k = positive_int_param(a.param, a.mode);
    } else if (a.mode == "nref") {
        req.mode = AggloMode::Nref;
        req.nref = positive_int_param(a.param, a.mode);
    } else if (a.mode == "target") {
        req.mode = AggloMode::TargetSize;
        req.target_size = a.param;
        if (a.param <= 0) throw FlagError("--param must be a positive diameter for mode target");
    } else if (a.mode == "multfactor" || a.mode == "segregated") {
        req.mode = a.mode == "segregated" ? AggloMode::Segregated : AggloMode::MultFactor;
        req.mult_factor = a.param;
        if (a.param <= 0 || a.param >= 1)
            throw FlagError("--param must lie in (0,1) for mode " + a.mode);
    } else if (a.mode == "coarsen") {
        req.mode = AggloMode::Coarsen;
        req.inner_mode = AggloMode::Nref;
        req.nref = positive_int_param(a.param, a.mode);
        for (const std::string& tok : split(a.cells, ',')) {
            try {
                req.cells.push_back(std::stoi(tok));
            } catch (...) {
                throw FlagError("--cells entry '" + tok + "' is not an integer");
            }
        }
        if (req.cells.empty()) throw FlagError("mode coarsen requires --cells");
    } else {  // multilevel
        req.mode = AggloMode::Multilevel;
        req.nref = positive_int_param(a.param, a.mode);
        req.threshold = a.threshold;
    }

    // Load inputs.
    Mesh mesh;
    std::optional<SageNet> sage;
    std::optional<ActorCriticNet> actor;
    std::optional<RefinerNet> refiner_net;
    try {
        mesh = read_mesh(a.mesh);
        if (a.model == "sage" || a.model == "sage-hetero") {
            sage = sage_from_checkpoint(load_checkpoint(a.checkpoint));
            if (sage->hetero != (a.model == "sage-hetero"))
                throw MeshError("checkpoint '" + sage->descriptor() +
                                "' does not match --model " + a.model);
        } else if (a.model == "rl") {
            actor = actor_critic_from_checkpoint(load_checkpoint(a.checkpoint));
        }
        if (a.refiner == "rl")
            refiner_net = refiner_from_checkpoint(load_checkpoint(a.refiner_checkpoint));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    vlog("mesh: " + std::to_string(mesh.n_cells()) + " cells, " +
         std::to_string(mesh.n_vertices()) + " vertices");

    std::unique_ptr<BisectionModel> model;
    if (a.model == "classic") model = std::make_unique<ClassicModel>();
    else if (a.model == "kmeans") model = std::make_unique<KmeansModel>(a.seed);
    else if (a.model == "rl") model = std::make_unique<RlModel>(&*actor);
    else model = std::make_unique<GnnModel>(&*sage, a.seed);

    std::unique_ptr<Refiner> ref;
    if (a.refiner == "fm") ref = std::make_unique<FmRefiner>();
    else if (a.refiner == "rl") ref = std::make_unique<RlRefiner>(&*refiner_net);
    req.refiner = ref.get();

    auto t0 = Clock::now();
    AggloResult result;
    try {
        result = agglomerate(mesh, *model, req);
    } catch (const std::exception& e) {
        std::cerr << "error: agglomeration failed: " << e.what() << "\n";
        return kExitAgglo;
    }
    double wall = elapsed(t0);

    Graph g = model->get_graph(mesh);
    double top_nc = result.hierarchy.empty() ? normalized_cut(g, result.labels)
                                             : normalized_cut(g, result.hierarchy.front());

    try {
        write_atomic(a.out, [&](const std::string& p) { write_mesh(mesh, result.labels, p); });
        if (!a.merged_out.empty())
            write_atomic(a.merged_out,
                         [&](const std::string& p) { write_mesh(result.merged, p); });
        if (!a.metrics.empty()) {
            QualityReport report = quality_report(result.merged, mesh.tags);
            write_atomic(a.metrics,
                         [&](const std::string& p) { write_metrics_csv(report, p); });
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << "elements=" << result.merged.n_cells() << " nc=" << top_nc
              << " seconds=" << wall << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

struct MetricsArgs {
    std::string mesh, out, summary;
};

int run_metrics(const MetricsArgs& a) {
    Mesh merged;
    std::vector<double> fine_tags;
    try {
        std::vector<int> labels;
        Mesh fine = read_mesh(a.mesh, &labels);
        if (labels.empty())
            throw MeshError("'" + a.mesh + "' carries no agglomerate labels");
        labels = split_disconnected(build_dual_graph(fine), labels);
        merged = merge_cells(fine, labels);
        fine_tags = fine.tags;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    QualityReport report = quality_report(merged, fine_tags);
    try {
        if (!a.out.empty())
            write_atomic(a.out, [&](const std::string& p) { write_metrics_csv(report, p); });
        if (!a.summary.empty())
            write_atomic(a.summary, [&](const std::string& p) {
                std::ofstream f(p);
                if (!f) throw MeshError("cannot open '" + p + "' for writing");
                f << summary_text(report);
            });
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << summary_text(report);
    return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string corpus, out;
    std::vector<std::string> models{"classic"};
    std::vector<std::string> modes{"nref:3"};
    bool parallel = false;
    std::uint64_t seed = 0;
};

struct BenchCase {
    DatasetEntry entry;
    std::string model, mode;
    double param = 0;
};

struct BenchRow {
    bool failed = false;
    std::string line, error;
};

BenchRow run_bench_case(const BenchCase& c, std::uint64_t seed) {
    BenchRow row;
    try {
        Mesh mesh = read_mesh(c.entry.mesh_path);
        std::optional<SageNet> sage;
        std::optional<ActorCriticNet> actor;
        auto [model_name, ck_path] = split_pair(c.model);
        std::unique_ptr<BisectionModel> model;
        if (model_name == "classic") model = std::make_unique<ClassicModel>();
        else if (model_name == "kmeans") model = std::make_unique<KmeansModel>(seed);
        else if (model_name == "sage" || model_name == "sage-hetero") {
            if (ck_path.empty()) throw MeshError("model '" + c.model + "' needs sage:CHECKPOINT");
            sage = sage_from_checkpoint(load_checkpoint(ck_path));
            model = std::make_unique<GnnModel>(&*sage, seed);
        } else if (model_name == "rl") {
            if (ck_path.empty()) throw MeshError("model '" + c.model + "' needs rl:CHECKPOINT");
            actor = actor_critic_from_checkpoint(load_checkpoint(ck_path));
            model = std::make_unique<RlModel>(&*actor);
        } else {
            throw MeshError("unknown model '" + c.model + "'");
        }

        AggloRequest req;
        if (c.mode == "nref") {
            req.mode = AggloMode::Nref;
            req.nref = static_cast<int>(c.param);
        } else if (c.mode == "kway") {
            req.mode = AggloMode::Kway;
            req.k = static_cast<int>(c.param);
        } else if (c.mode == "multfactor") {
            req.mode = AggloMode::MultFactor;
            req.mult_factor = c.param;
        } else if (c.mode == "target") {
            req.mode = AggloMode::TargetSize;
            req.target_size = c.param;
        } else if (c.mode == "multilevel") {
            req.mode = AggloMode::Multilevel;
            req.nref = static_cast<int>(c.param);
        } else {
            throw MeshError("unknown mode '" + c.mode + "'");
        }

        auto t0 = Clock::now();
        AggloResult result = agglomerate(mesh, *model, req);
        double wall = elapsed(t0);

        Graph g = build_dual_graph(mesh);
        QualityReport rep = quality_report(result.merged, mesh.tags);
        std::ostringstream os;
        os << c.entry.kind << '_' << c.entry.seed << ',' << c.entry.cells << ',' << model_name
           << ',' << c.mode << ',' << c.param << ',' << wall << ','
           << result.merged.n_cells() << ',' << normalized_cut(g, result.labels) << ','
           << rep.circle_ratio_summary.mean << ',' << rep.shape_summary.mean << ','
           << rep.uniformity_summary.mean << ',' << rep.volume_deviation_summary.mean;
        row.line = os.str();
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

int run_bench(const BenchArgs& a) {
    std::vector<DatasetEntry> entries;
    try {
        entries = read_dataset_index((fs::path(a.corpus) / "index.tsv").string());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    std::vector<BenchCase> cases;
    for (const DatasetEntry& e : entries)
        for (const std::string& model : a.models)
            for (const std::string& mode_item : a.modes) {
                auto [mode, param] = split_pair(mode_item);
                BenchCase c;
                c.entry = e;
                c.model = model;
                c.mode = mode;
                try {
                    c.param = param.empty() ? 3.0 : std::stod(param);
                } catch (...) {
                    throw FlagError("--modes entry '" + mode_item + "' has a bad parameter");
                }
                cases.push_back(std::move(c));
            }
    vlog("bench: " + std::to_string(cases.size()) + " cases");

    std::vector<BenchRow> rows(cases.size());
    if (a.parallel) {
        std::vector<std::future<BenchRow>> futures;
        futures.reserve(cases.size());
        for (const BenchCase& c : cases)
            futures.push_back(std::async(std::launch::async,
                                         [&c, seed = a.seed] { return run_bench_case(c, seed); }));
        for (size_t i = 0; i < futures.size(); ++i) rows[i] = futures[i].get();
    } else {
        for (size_t i = 0; i < cases.size(); ++i) rows[i] = run_bench_case(cases[i], a.seed);
    }

    int failed = 0;
    try {
        write_atomic(a.out, [&](const std::string& p) {
            std::ofstream f(p);
            if (!f) throw MeshError("cannot open '" + p + "' for writing");
            f << "mesh,cells,model,mode,param,wall_seconds,elements,nc,"
                 "cr_mean,shape_mean,uf_mean,vd_mean\n";
            for (size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].failed) {
                    ++failed;
                    std::cerr << "bench case failed (" << cases[i].entry.mesh_path << ", "
                              << cases[i].model << ", " << cases[i].mode
                              << "): " << rows[i].error << "\n";
                    continue;
                }
                f << rows[i].line << "\n";
            }
        });
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    if (a.parallel) std::cerr << "note: --parallel timing columns are not reliable\n";
    std::cout << "cases=" << cases.size() << " failed=" << failed << "\n";
    return failed > 0 ? kExitAgglo : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polytopal mesh agglomeration toolkit"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "Global random seed")->capture_default_str();
    app.add_flag("--verbose", g_verbose, "Progress and timing on stderr");

    GenerateArgs gen;
    CLI::App* c_gen = app.add_subcommand("generate", "Build a mesh dataset with graph caches");
    c_gen->add_option("--out", gen.out, "Output directory")->required();
    c_gen->add_option("--kinds", gen.kinds,
                      "Comma-separated kind:count list (structured_quads, structured_triangles, "
                      "random_delaunay, random_voronoi, holes, inclusions, cube_tets, cube_hexes, "
                      "cube_portion)")
        ->required()
        ->delimiter(',');
    c_gen->add_option("--structured-n", gen.spec.structured_n, "Structured grid resolution");
    c_gen->add_option("--delaunay-points", gen.spec.delaunay_points, "Delaunay interior points");
    c_gen->add_option("--voronoi-seeds", gen.spec.voronoi_seeds, "Voronoi seed count");
    c_gen->add_option("--voronoi-lloyd", gen.spec.voronoi_lloyd, "Lloyd smoothing iterations");
    c_gen->add_option("--inclusion-circles", gen.spec.inclusion_circles,
                      "Inclusion circles per mesh");
    c_gen->add_option("--inclusion-coverage", gen.spec.inclusion_coverage,
                      "Total inclusion area fraction");
    c_gen->add_option("--cube-n", gen.spec.cube_n, "Cube mesh resolution");
    c_gen->add_option("--portion-n", gen.spec.portion_n, "Cube portion base resolution");

    TrainArgs tr;
    CLI::App* c_tr = app.add_subcommand("train", "Train a graph network bisection model");
    c_tr->add_option("--dataset", tr.dataset, "Dataset directory (index.tsv)")->required();
    c_tr->add_option("--arch", tr.arch, "sage | sage-hetero")
        ->check(CLI::IsMember({"sage", "sage-hetero"}));
    c_tr->add_option("--dims", tr.dims, "Mesh dimension to train on")
        ->check(CLI::IsMember({2, 3}));
    c_tr->add_option("--epochs", tr.epochs, "Training epochs (default 300 in 2D, 400 in 3D)");
    c_tr->add_option("--lr", tr.lr, "Learning rate (default 1e-5 in 2D, 1e-4 in 3D)");
    c_tr->add_option("--wd", tr.wd, "Weight decay")->capture_default_str();
    c_tr->add_option("--batch", tr.batch, "Batch size")->capture_default_str();
    c_tr->add_option("--h-sage", tr.h_sage, "Convolution width override");
    c_tr->add_option("--h-dense", tr.h_dense, "Dense width override");
    c_tr->add_option("--val-fraction", tr.val_fraction, "Validation split")
        ->capture_default_str();
    c_tr->add_option("--hetero-a", tr.hetero_a, "Heterogeneity penalty weight")
        ->capture_default_str();
    c_tr->add_flag("--no-augment", tr.no_augment, "Disable random rotation augmentation");
    c_tr->add_option("--out", tr.out, "Checkpoint path")->required();
    c_tr->add_option("--history", tr.history, "Loss history CSV path");

    TrainRlArgs trl;
    CLI::App* c_trl = app.add_subcommand("train-rl", "Train an A2C partitioner or refiner");
    c_trl->add_option("--dataset", trl.dataset, "Dataset directory (index.tsv)")->required();
    c_trl->add_option("--role", trl.role, "partitioner | refiner")
        ->check(CLI::IsMember({"partitioner", "refiner"}));
    c_trl->add_option("--dims", trl.dims, "Mesh dimension to train on")
        ->check(CLI::IsMember({2, 3}));
    c_trl->add_option("--episodes", trl.episodes, "Training episodes")->capture_default_str();
    c_trl->add_option("--hidden", trl.hidden, "Hidden width")->capture_default_str();
    c_trl->add_option("--gamma", trl.cfg.gamma, "Discount factor")->capture_default_str();
    c_trl->add_option("--alpha", trl.cfg.alpha, "Critic loss weight")->capture_default_str();
    c_trl->add_option("--lr", trl.cfg.lr, "Learning rate")->capture_default_str();
    c_trl->add_option("--update-every", trl.cfg.update_every, "Refiner update window")
        ->capture_default_str();
    c_trl->add_option("--b", trl.cfg.b, "Refiner imbalance weight")->capture_default_str();
    c_trl->add_option("--k-hop", trl.cfg.k_hop, "Refiner subgraph radius")
        ->check(CLI::IsMember({2, 3, 4}));
    c_trl->add_option("--out", trl.out, "Checkpoint path")->required();
    c_trl->add_option("--history", trl.history, "Episode history CSV path");

    AggloArgs ag;
    CLI::App* c_ag = app.add_subcommand("agglomerate", "Agglomerate a mesh");
    c_ag->add_option("--mesh", ag.mesh, "Input mesh (legacy VTK)")->required();
    c_ag->add_option("--model", ag.model, "kmeans | classic | sage | sage-hetero | rl")
        ->check(CLI::IsMember({"kmeans", "classic", "sage", "sage-hetero", "rl"}));
    c_ag->add_option("--checkpoint", ag.checkpoint, "Model checkpoint (learned models)");
    c_ag->add_option("--mode", ag.mode,
                     "kway | nref | target | multfactor | segregated | coarsen | multilevel")
        ->check(CLI::IsMember(
            {"kway", "nref", "target", "multfactor", "segregated", "coarsen", "multilevel"}));
    c_ag->add_option("--param", ag.param,
                     "Mode parameter: k, nref, target diameter, or diameter factor")
        ->required();
    c_ag->add_option("--cells", ag.cells, "Comma-separated cell ids (mode coarsen)");
    c_ag->add_option("--refiner", ag.refiner, "none | fm | rl")
        ->check(CLI::IsMember({"none", "fm", "rl"}));
    c_ag->add_option("--refiner-checkpoint", ag.refiner_checkpoint, "Refiner checkpoint");
    c_ag->add_option("--threshold", ag.threshold, "Multilevel coarsening stop")
        ->capture_default_str();
    c_ag->add_option("--out", ag.out, "Output mesh with agglomerate labels")->required();
    c_ag->add_option("--merged-out", ag.merged_out, "Optional merged polytopal mesh");
    c_ag->add_option("--metrics", ag.metrics, "Optional quality metrics CSV");

    MetricsArgs me;
    CLI::App* c_me = app.add_subcommand("metrics", "Quality metrics of a labeled mesh");
    c_me->add_option("--mesh", me.mesh, "Mesh with agglomerate labels")->required();
    c_me->add_option("--out", me.out, "Metrics CSV path");
    c_me->add_option("--summary", me.summary, "Summary JSON path");

    BenchArgs be;
    CLI::App* c_be = app.add_subcommand("bench", "Benchmark models over a dataset");
    c_be->add_option("--corpus", be.corpus, "Dataset directory (index.tsv)")->required();
    c_be->add_option("--models", be.models,
                     "Comma-separated: classic, kmeans, sage:CKPT, sage-hetero:CKPT, rl:CKPT")
        ->delimiter(',')
        ->capture_default_str();
    c_be->add_option("--modes", be.modes, "Comma-separated mode:param list")
        ->delimiter(',')
        ->capture_default_str();
    c_be->add_flag("--parallel", be.parallel, "Run cases concurrently (timings unreliable)");
    c_be->add_option("--out", be.out, "Result CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return kExitFlags;
    }

    gen.seed = tr.seed = trl.seed = ag.seed = be.seed = seed;
    try {
        if (c_gen->parsed()) return run_generate(gen);
        if (c_tr->parsed()) return run_train(tr);
        if (c_trl->parsed()) return run_train_rl(trl);
        if (c_ag->parsed()) return run_agglomerate(ag);
        if (c_me->parsed()) return run_metrics(me);
        if (c_be->parsed()) return run_bench(be);
    } catch (const FlagError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFlags;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAgglo;
    }
    return kExitFlags;
}
