#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "polyagg/baselines.hpp"
#include "polyagg/nets.hpp"
#include "polyagg/rl.hpp"

namespace polyagg {

// Node feature matrix (n x dim+1): centroids shifted to zero mean, rotated so
// the principal covariance axis lies along x, scaled to unit variance per
// coordinate; last column is the measure share (sums to 1). Single-node
// graphs are centered only.
Matrix normalize_features(const Graph& g);

// Behavioral contract every bisection backend implements.
struct BisectionModel {
    virtual ~BisectionModel() = default;
    virtual Graph get_graph(const Mesh& mesh) const { return build_dual_graph(mesh); }
    virtual std::vector<int> bisect_graph(const Graph& g) const = 0;
    // Direct k-way split when the backend supports one (k-means does);
    // others return empty and the driver recursively bisects.
    virtual std::vector<int> kway_graph(const Graph&, int) const { return {}; }
    virtual std::string name() const = 0;
};

struct Refiner {
    virtual ~Refiner() = default;
    virtual std::vector<int> refine(const Graph& g, std::vector<int> sides) const = 0;
    virtual std::string name() const = 0;
};

class ClassicModel : public BisectionModel {
  public:
    std::vector<int> bisect_graph(const Graph& g) const override { return classic_bisect(g); }
    std::string name() const override { return "classic"; }
};

class KmeansModel : public BisectionModel {
  public:
    explicit KmeansModel(std::uint64_t seed = 0) : seed_(seed) {}
    std::vector<int> bisect_graph(const Graph& g) const override;
    std::vector<int> kway_graph(const Graph& g, int k) const override;
    std::string name() const override { return "kmeans"; }

  private:
    std::uint64_t seed_;
};

class GnnModel : public BisectionModel {
  public:
    explicit GnnModel(const SageNet* net, std::uint64_t kmeans_seed = 0)
        : net_(net), kmeans_seed_(kmeans_seed) {}
    std::vector<int> bisect_graph(const Graph& g) const override;
    std::string name() const override { return net_->hetero ? "sage-hetero" : "sage-base"; }

  private:
    const SageNet* net_;
    std::uint64_t kmeans_seed_;  // fallback for uniform-tag parts of a hetero model
};

class RlModel : public BisectionModel {
  public:
    explicit RlModel(const ActorCriticNet* net) : net_(net) {}
    std::vector<int> bisect_graph(const Graph& g) const override { return rl_bisect(*net_, g); }
    std::string name() const override { return "rl"; }

  private:
    const ActorCriticNet* net_;
};

// Deterministic refinement backend; never worsens cut, NC, or the combined
// NC + b*imbalance objective (best-of-input-and-output rule).
class FmRefiner : public Refiner {
  public:
    explicit FmRefiner(double b = 0.35, double balance_tol = 0.1)
        : b_(b), balance_tol_(balance_tol) {}
    std::vector<int> refine(const Graph& g, std::vector<int> sides) const override;
    std::string name() const override { return "fm"; }

  private:
    double b_, balance_tol_;
};

class RlRefiner : public Refiner {
  public:
    RlRefiner(const RefinerNet* net, A2CConfig cfg = {}) : net_(net), cfg_(cfg) {}
    std::vector<int> refine(const Graph& g, std::vector<int> sides) const override {
        return rl_refine(*net_, g, std::move(sides), cfg_);
    }
    std::string name() const override { return "rl"; }

  private:
    const RefinerNet* net_;
    A2CConfig cfg_;
};

enum class AggloMode { Kway, Nref, TargetSize, MultFactor, Segregated, Coarsen, Multilevel };

struct AggloRequest {
    AggloMode mode = AggloMode::Nref;
    int k = 2;                 // kway
    int nref = 1;              // nref, multilevel
    double target_size = 0.0;  // target diameter
    double mult_factor = 0.5;  // (0,1); also segregated
    std::vector<int> cells;    // coarsen: subset to agglomerate
    AggloMode inner_mode = AggloMode::Nref;  // coarsen: mode applied to the subset
    int threshold = 500;                     // multilevel coarsening stop
    const Refiner* refiner = nullptr;        // multilevel; FM when null
};

struct AggloResult {
    std::vector<int> labels;
    Mesh merged;
    // Label snapshot after each bisection sweep (coarse to fine), for
    // nested-grid use; empty for non-recursive modes.
    std::vector<std::vector<int>> hierarchy;
};

AggloResult agglomerate(const Mesh& mesh, const BisectionModel& model,
                        const AggloRequest& request);

// Recursive bisection, worklist-driven; parts with one node stop splitting.
std::vector<int> bisect_nref(const Graph& g, const BisectionModel& model, int nref,
                             std::vector<std::vector<int>>* hierarchy = nullptr);

// Keep bisecting parts whose vertex diameter exceeds hhat = mult_factor *
// diam(region); hhat is fixed once from the whole input region.
std::vector<int> bisect_mult_factor(const Mesh& mesh, const Graph& g,
                                    const BisectionModel& model, double mult_factor);
std::vector<int> bisect_target_size(const Mesh& mesh, const Graph& g,
                                    const BisectionModel& model, double target);

// Per-tag-group independent mult_factor agglomeration with globally unique
// labels.
std::vector<int> segregated(const Mesh& mesh, const BisectionModel& model,
                            double mult_factor);

// Coarsen to <= threshold nodes, bisect there, then project + refine level by
// level. A level's refinement is kept only when it does not raise NC.
std::vector<int> multilevel_bisect(const Graph& g, const BisectionModel& coarse_model,
                                   const Refiner& refiner, int threshold);

// One label per connected component per class; dense ids ordered by
// (original label, smallest node).
std::vector<int> split_disconnected(const Graph& g, std::vector<int> labels);

// Agglomerate only cell_ids (per request.inner_mode); other cells stay
// singletons.
std::vector<int> coarsen_subset(const Mesh& mesh, const BisectionModel& model,
                                const AggloRequest& request, std::span<const int> cell_ids);

// Largest pairwise distance among the mesh vertices of the given cells.
double region_diameter(const Mesh& mesh, std::span<const int> cell_ids);

}  // namespace polyagg
