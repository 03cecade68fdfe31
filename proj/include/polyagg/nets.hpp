#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polyagg/tensor.hpp"

namespace polyagg {

// Bisection GNN: 4 SAGE layers of width h_sage, then 4 dense layers tapering
// h_dense -> h_dense -> h_dense/2 -> out_classes, tanh between layers, row
// softmax at the end. The heterogeneous variant only differs by an extra
// physical-group input feature and the training penalty.
class SageNet {
  public:
    SageNet() = default;
    SageNet(int h_sage, int h_dense, int in_features, int out_classes, std::uint64_t seed,
            bool hetero = false);

    // Y as a tape node (n x out_classes, rows sum to 1). X must have
    // in_features columns.
    int forward_tape(Tape& t, const Matrix& X, const Graph& g) const;
    Matrix forward(const Matrix& X, const Graph& g) const;
    // Convenience: builds the feature matrix internally (normalized
    // coordinates + measure share, plus the tag column when hetero).
    Matrix forward(const Graph& g) const;

    std::vector<Param*> params();
    std::string descriptor() const;

    int h_sage = 0, h_dense = 0, in_features = 0, out_classes = 0;
    bool hetero = false;
    std::uint64_t seed = 0;
    std::array<SageConv, 4> sage;
    std::array<Dense, 4> dense;
};

// Feature matrix the SageNet consumes: normalize_features output, with the
// physical tag appended as an extra column when requested.
Matrix gnn_features(const Graph& g, bool hetero);

// Expected normalized cut: sum_k [sum_i sum_{(i,j) in E} Y_ik (1-Y_jk)] /
// [sum_i Y_ik deg_i], as tape ops (matrix form).
int expected_nc_loss(Tape& t, int y, const Graph& g);

// Same quantity by the explicit double sum; oracle for the matrix form.
double expected_nc_direct(const Matrix& Y, const Graph& g);

// Heterogeneity penalty (a/n) sum_i sum_j (P . Y)_ij with P_i = [p_i, 1-p_i].
int hetero_penalty_loss(Tape& t, int y, const Graph& g, double a);
double hetero_penalty_direct(const Matrix& Y, std::span<const double> p, double a);

// argmax per row; ties go to class 0; an empty class steals its most
// confident candidate so both classes are populated.
std::vector<int> bisect_from_probs(const Matrix& Y);

struct GnnTrainConfig {
    int epochs = 300;
    double lr = 1e-5;
    double weight_decay = 1e-5;
    int batch = 4;
    std::uint64_t seed = 0;
    double hetero_a = 1.0;
    double val_fraction = 0.1;
    bool augment_rotations = true;
};

struct GnnHistory {
    std::vector<double> train_loss;  // epoch means
    std::vector<double> val_loss;
};

// Per-sample random rotation of graph centroids (augmentation helper).
Graph rotate_graph(const Graph& g, std::mt19937_64& rng);

GnnHistory train_gnn(SageNet& net, const std::vector<Graph>& dataset,
                     const GnnTrainConfig& cfg);

}  // namespace polyagg
