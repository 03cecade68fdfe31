// End-to-end checks of the command-line tool: subcommand plumbing, exit
// codes, and the files it leaves behind.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "polyagg/generate.hpp"
#include "polyagg/io.hpp"
#include "polyagg/nets.hpp"

using namespace polyagg;
namespace fs = std::filesystem;

namespace {

const std::string kCli = POLYAGG_CLI_PATH;

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "polyagg_cli_test";
    fs::create_directories(dir);
    return dir;
}

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    fs::path out_file = work_dir() / "stdout.txt";
    std::string cmd = kCli + " " + args + " > " + out_file.string() + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream f(out_file);
    std::ostringstream ss;
    ss << f.rdbuf();
    r.out = ss.str();
    return r;
}

}  // namespace

TEST_CASE("generate builds a dataset the other subcommands can consume") {
    fs::path dir = work_dir();
    fs::remove_all(dir / "ds");
    RunResult gen = run("--seed 5 generate --out " + (dir / "ds").string() +
                        " --kinds structured_quads:2,random_delaunay:1 --structured-n 8 "
                        "--delaunay-points 50");
    REQUIRE(gen.code == 0);
    CHECK(gen.out.find("meshes=3") != std::string::npos);
    REQUIRE(fs::exists(dir / "ds" / "index.tsv"));
    std::vector<DatasetEntry> entries = read_dataset_index((dir / "ds" / "index.tsv").string());
    REQUIRE(entries.size() == 3);

    SUBCASE("agglomerate writes a labeled mesh and reports the element count") {
        RunResult agg = run("agglomerate --mesh " + entries[0].mesh_path +
                            " --model classic --mode nref --param 3 --out " +
                            (dir / "agg.vtk").string() + " --merged-out " +
                            (dir / "merged.vtk").string() + " --metrics " +
                            (dir / "m.csv").string());
        REQUIRE(agg.code == 0);
        CHECK(agg.out.find("elements=8") != std::string::npos);
        CHECK(agg.out.find("nc=") != std::string::npos);
        CHECK(agg.out.find("seconds=") != std::string::npos);

        std::vector<int> labels;
        Mesh fine = read_mesh((dir / "agg.vtk").string(), &labels);
        CHECK(static_cast<int>(labels.size()) == fine.n_cells());
        Mesh merged = read_mesh((dir / "merged.vtk").string());
        CHECK(merged.n_cells() == 8);

        std::ifstream csv(dir / "m.csv");
        std::string header;
        std::getline(csv, header);
        CHECK(header.find("circle_ratio") != std::string::npos);

        RunResult met = run("metrics --mesh " + (dir / "agg.vtk").string() + " --out " +
                            (dir / "m2.csv").string());
        REQUIRE(met.code == 0);
        CHECK(met.out.find("\"circle_ratio\"") != std::string::npos);
    }

    SUBCASE("training with zero learning rate keeps the initial weights") {
        RunResult tr = run("--seed 4 train --dataset " + (dir / "ds").string() +
                           " --epochs 1 --lr 0 --wd 0 --h-sage 16 --h-dense 8 --out " +
                           (dir / "frozen.ckpt").string());
        REQUIRE(tr.code == 0);
        Checkpoint ck = load_checkpoint((dir / "frozen.ckpt").string());
        SageNet reference(16, 8, 3, 2, 4);
        Checkpoint init = checkpoint_of(reference);
        REQUIRE(ck.params.size() == init.params.size());
        CHECK(ck.arch == init.arch);
        for (size_t i = 0; i < ck.params.size(); ++i) {
            CHECK(ck.params[i].first == init.params[i].first);
            CHECK(ck.params[i].second.a == init.params[i].second.a);
        }
    }

    SUBCASE("trained checkpoints drive the learned models") {
        RunResult tr = run("--seed 2 train --dataset " + (dir / "ds").string() +
                           " --epochs 2 --lr 1e-4 --h-sage 16 --h-dense 8 --out " +
                           (dir / "gnn.ckpt").string() + " --history " +
                           (dir / "hist.csv").string());
        REQUIRE(tr.code == 0);
        std::ifstream hist(dir / "hist.csv");
        std::string line;
        int lines = 0;
        while (std::getline(hist, line))
            if (!line.empty()) ++lines;
        CHECK(lines == 3);  // header + one line per epoch

        RunResult agg = run("agglomerate --mesh " + entries[0].mesh_path +
                            " --model sage --checkpoint " + (dir / "gnn.ckpt").string() +
                            " --mode nref --param 2 --out " + (dir / "sage.vtk").string());
        CHECK(agg.code == 0);

        RunResult rl = run("--seed 2 train-rl --dataset " + (dir / "ds").string() +
                           " --episodes 10 --hidden 12 --out " + (dir / "rl.ckpt").string());
        REQUIRE(rl.code == 0);
        RunResult ragg = run("agglomerate --mesh " + entries[0].mesh_path +
                             " --model rl --checkpoint " + (dir / "rl.ckpt").string() +
                             " --mode nref --param 1 --out " + (dir / "rl.vtk").string());
        CHECK(ragg.code == 0);
    }

    SUBCASE("bench sweeps models and modes into a CSV") {
        RunResult be = run("bench --corpus " + (dir / "ds").string() +
                           " --models classic,kmeans --modes nref:2 --out " +
                           (dir / "bench.csv").string());
        REQUIRE(be.code == 0);
        std::ifstream csv(dir / "bench.csv");
        std::string header;
        std::getline(csv, header);
        CHECK(header ==
              "mesh,cells,model,mode,param,wall_seconds,elements,nc,"
              "cr_mean,shape_mean,uf_mean,vd_mean");
        int rows = 0;
        std::string line;
        while (std::getline(csv, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 6);  // 3 meshes x 2 models x 1 mode
    }
}

TEST_CASE("exit codes separate flag, I/O, and run failures") {
    fs::path dir = work_dir();

    CHECK(run("agglomerate --mesh a.vtk --model sage --mode nref --param 2 --out b.vtk").code ==
          1);  // learned model without checkpoint
    CHECK(run("agglomerate --mesh a.vtk --model classic --mode nref --param 0 --out b.vtk").code ==
          1);  // nonsensical parameter
    CHECK(run("agglomerate --mesh " + (dir / "missing.vtk").string() +
              " --model classic --mode nref --param 2 --out b.vtk")
              .code == 2);  // unreadable mesh
    CHECK(run("nonsense-subcommand").code == 1);
    CHECK(run("metrics --mesh " + (dir / "missing.vtk").string()).code == 2);
    CHECK(run("--help").code == 0);

    // A mesh without labels cannot feed the metrics subcommand.
    Mesh plain = grid_quads(2, 2);
    write_mesh(plain, (dir / "plain.vtk").string());
    CHECK(run("metrics --mesh " + (dir / "plain.vtk").string()).code == 2);
}

TEST_CASE("failed runs leave no partial output files") {
    fs::path dir = work_dir();
    fs::remove(dir / "never.vtk");
    RunResult r = run("agglomerate --mesh " + (dir / "missing.vtk").string() +
                      " --model classic --mode nref --param 2 --out " +
                      (dir / "never.vtk").string());
    CHECK(r.code == 2);
    CHECK(!fs::exists(dir / "never.vtk"));
}
