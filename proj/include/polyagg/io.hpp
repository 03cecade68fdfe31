#pragma once

#include "polyagg/generate.hpp"
#include "polyagg/graph.hpp"
#include "polyagg/mesh.hpp"
#include "polyagg/metrics.hpp"
#include "polyagg/nets.hpp"
#include "polyagg/rl.hpp"
#include "polyagg/tensor.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace polyagg {

// ---------------------------------------------------------------------------
// Legacy ASCII VTK unstructured grids.
//
// Cell types: 5 triangle, 9 quad, 7 polygon, 10 tetrahedron, 12 hexahedron,
// 14 pyramid, 42 polyhedron (face stream: n_faces, then per-face n_verts +
// ids). Cell data: "agglomerate" (int labels), "physical_tag" (double),
// "hole_parent" (int; interior hole loops of 2D agglomerates are stored as
// extra polygon cells pointing at their owner and folded back on read).
// ---------------------------------------------------------------------------

// Parses a mesh; physical tags are restored from cell data when present, and
// agglomerate labels are written to *labels_out when requested and present.
// Unsupported cell types and malformed sections raise MeshError naming the
// offending type code or line.
Mesh read_mesh(const std::string& path, std::vector<int>* labels_out = nullptr);

void write_mesh(const Mesh& mesh, const std::string& path);
void write_mesh(const Mesh& mesh, const std::vector<int>& labels, const std::string& path);

// ---------------------------------------------------------------------------
// Model checkpoints: versioned binary with magic, architecture descriptor,
// per-parameter names and shapes, 64-bit little-endian payload, and the
// construction seed.
// ---------------------------------------------------------------------------

struct Checkpoint {
    std::string arch;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, Matrix>> params;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint checkpoint_of(const SageNet& net);
Checkpoint checkpoint_of(const ActorCriticNet& net);
Checkpoint checkpoint_of(const RefinerNet& net);

// Restores parameters into an already-constructed net. The checkpoint
// descriptor must match the net's; mismatches raise MeshError quoting both
// descriptors.
void restore(SageNet& net, const Checkpoint& ck);
void restore(ActorCriticNet& net, const Checkpoint& ck);
void restore(RefinerNet& net, const Checkpoint& ck);

// Builds the architecture named by the checkpoint descriptor and restores
// into it. Wrong-family descriptors raise MeshError.
SageNet sage_from_checkpoint(const Checkpoint& ck);
ActorCriticNet actor_critic_from_checkpoint(const Checkpoint& ck);
RefinerNet refiner_from_checkpoint(const Checkpoint& ck);

// ---------------------------------------------------------------------------
// Graph caches: plain-text dump of the weighted dual graph so datasets can be
// re-loaded without re-extracting connectivity.
// ---------------------------------------------------------------------------

void write_graph_cache(const Graph& g, const std::string& path);
Graph read_graph_cache(const std::string& path);

// ---------------------------------------------------------------------------
// CSV / dataset-index emission. Floats carry 9 significant digits; row order
// is element index / epoch / episode.
// ---------------------------------------------------------------------------

void write_metrics_csv(const QualityReport& report, const std::string& path);
void write_history_csv(const GnnHistory& history, const std::string& path);
void write_history_csv(const RlHistory& history, const std::string& path);

void write_dataset_index(const std::vector<DatasetEntry>& entries, const std::string& path);
std::vector<DatasetEntry> read_dataset_index(const std::string& path);

}  // namespace polyagg
