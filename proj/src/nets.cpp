#include "polyagg/nets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "polyagg/partition.hpp"

namespace polyagg {

SageNet::SageNet(int hs, int hd, int in, int out, std::uint64_t sd, bool het)
    : h_sage(hs), h_dense(hd), in_features(in), out_classes(out), hetero(het), seed(sd) {
    if (hd / 2 < 1) throw std::invalid_argument("SageNet: h_dense must be >= 2");
    std::mt19937_64 rng(sd);
    sage[0] = SageConv("sage1", in, hs, rng);
    sage[1] = SageConv("sage2", hs, hs, rng);
    sage[2] = SageConv("sage3", hs, hs, rng);
    sage[3] = SageConv("sage4", hs, hs, rng);
    dense[0] = Dense("dense1", hs, hd, rng);
    dense[1] = Dense("dense2", hd, hd, rng);
    dense[2] = Dense("dense3", hd, hd / 2, rng);
    dense[3] = Dense("dense4", hd / 2, out, rng);
}

int SageNet::forward_tape(Tape& t, const Matrix& X, const Graph& g) const {
    if (X.cols != in_features)
        throw std::invalid_argument("SageNet: feature width " + std::to_string(X.cols) +
                                    " does not match net input " + std::to_string(in_features));
    int x = t.input(X);
    for (const SageConv& s : sage) x = t.tanh(s.apply(t, x, g));
    for (int i = 0; i < 3; ++i) x = t.tanh(dense[i].apply(t, x));
    return t.row_softmax(dense[3].apply(t, x));
}

Matrix SageNet::forward(const Matrix& X, const Graph& g) const {
    Tape t;
    return t.val(forward_tape(t, X, g));
}

Matrix SageNet::forward(const Graph& g) const { return forward(gnn_features(g, hetero), g); }

std::vector<Param*> SageNet::params() {
    std::vector<Param*> out;
    for (SageConv& s : sage) s.collect(out);
    for (Dense& d : dense) d.collect(out);
    return out;
}

std::string SageNet::descriptor() const {
    return std::string(hetero ? "sage-hetero" : "sage-base") + " " + std::to_string(h_sage) +
           " " + std::to_string(h_dense) + " " + std::to_string(in_features) + " " +
           std::to_string(out_classes);
}

Matrix gnn_features(const Graph& g, bool hetero) {
    Matrix base = normalize_features(g);
    if (!hetero) return base;
    if (!g.has_tag())
        throw std::invalid_argument("heterogeneous features requested on an untagged graph");
    Matrix out(base.rows, base.cols + 1);
    for (int i = 0; i < base.rows; ++i) {
        for (int j = 0; j < base.cols; ++j) out(i, j) = base(i, j);
        out(i, base.cols) = g.tag[i];
    }
    return out;
}

int expected_nc_loss(Tape& t, int y, const Graph& g) {
    const Matrix& Y = t.val(y);
    if (Y.rows != g.n) throw std::invalid_argument("expected_nc_loss: Y rows != node count");
    Matrix deg(g.n, 1);
    double total = 0.0;
    for (int i = 0; i < g.n; ++i) {
        deg(i, 0) = g.weighted_degree(i);
        total += deg(i, 0);
    }
    if (total <= 0.0) throw std::invalid_argument("expected_nc_loss: graph has no edges");
    int d = t.input(std::move(deg));
    int gamma = t.matmul(t.transpose(d), y);        // 1 x K: expected volumes
    int yhat = t.div_rowvec(y, gamma);              // Y / Gamma_k
    int rest = t.adj_mul(t.affine(y, -1.0, 1.0), g);  // row i = sum_j w_ij (1 - Y_jk)
    return t.sum_all(t.mul(yhat, rest));
}

double expected_nc_direct(const Matrix& Y, const Graph& g) {
    const int K = Y.cols;
    std::vector<double> num(K, 0.0), den(K, 0.0);
    for (int i = 0; i < g.n; ++i) {
        double di = g.weighted_degree(i);
        for (int k = 0; k < K; ++k) den[k] += Y(i, k) * di;
        for (const auto& [j, w] : g.adj[i])
            for (int k = 0; k < K; ++k) num[k] += w * Y(i, k) * (1.0 - Y(j, k));
    }
    double loss = 0.0;
    for (int k = 0; k < K; ++k) loss += num[k] / den[k];
    return loss;
}

int hetero_penalty_loss(Tape& t, int y, const Graph& g, double a) {
    if (!g.has_tag()) throw std::invalid_argument("hetero_penalty_loss: graph has no tags");
    Matrix P(g.n, 2);
    for (int i = 0; i < g.n; ++i) {
        P(i, 0) = g.tag[i];
        P(i, 1) = 1.0 - g.tag[i];
    }
    int p = t.input(std::move(P));
    return t.affine(t.sum_all(t.mul(p, y)), a / static_cast<double>(g.n), 0.0);
}

double hetero_penalty_direct(const Matrix& Y, std::span<const double> p, double a) {
    double s = 0.0;
    for (int i = 0; i < Y.rows; ++i) s += p[i] * Y(i, 0) + (1.0 - p[i]) * Y(i, 1);
    return a * s / static_cast<double>(Y.rows);
}

std::vector<int> bisect_from_probs(const Matrix& Y) {
    const int n = Y.rows;
    std::vector<int> labels(n);
    int count[2] = {0, 0};
    for (int i = 0; i < n; ++i) {
        labels[i] = Y(i, 0) >= Y(i, 1) ? 0 : 1;
        count[labels[i]]++;
    }
    if (n >= 2) {
        for (int empty = 0; empty < 2; ++empty) {
            if (count[empty] != 0) continue;
            int best = 0;
            for (int i = 1; i < n; ++i)
                if (Y(i, empty) > Y(best, empty)) best = i;
            labels[best] = empty;
        }
    }
    return labels;
}

Graph rotate_graph(const Graph& g, std::mt19937_64& rng) {
    Graph out = g;
    if (g.dim == 2) {
        std::uniform_real_distribution<double> u(0.0, 2.0 * 3.14159265358979323846);
        double th = u(rng), c = std::cos(th), s = std::sin(th);
        for (Vec3& p : out.centroid) p = {c * p.x - s * p.y, s * p.x + c * p.y, 0.0};
        return out;
    }
    // Uniform 3D rotation from a random unit quaternion.
    std::normal_distribution<double> nrm(0.0, 1.0);
    double q[4];
    double norm = 0.0;
    for (double& v : q) {
        v = nrm(rng);
        norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : q) v /= norm;
    double w = q[0], x = q[1], y = q[2], z = q[3];
    double R[3][3] = {{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
                      {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
                      {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
    for (Vec3& p : out.centroid) {
        Vec3 r;
        r.x = R[0][0] * p.x + R[0][1] * p.y + R[0][2] * p.z;
        r.y = R[1][0] * p.x + R[1][1] * p.y + R[1][2] * p.z;
        r.z = R[2][0] * p.x + R[2][1] * p.y + R[2][2] * p.z;
        p = r;
    }
    return out;
}

GnnHistory train_gnn(SageNet& net, const std::vector<Graph>& dataset,
                     const GnnTrainConfig& cfg) {
    if (dataset.empty()) throw std::invalid_argument("train_gnn: empty dataset");
    std::mt19937_64 rng(cfg.seed);

    std::vector<int> perm(dataset.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    int n_val = static_cast<int>(static_cast<double>(dataset.size()) * cfg.val_fraction);
    std::vector<int> val(perm.end() - n_val, perm.end());
    std::vector<int> train(perm.begin(), perm.end() - n_val);
    if (train.empty()) throw std::invalid_argument("train_gnn: no training samples after split");

    auto params = net.params();
    AdamOpt opt;
    opt.lr = cfg.lr;
    opt.weight_decay = cfg.weight_decay;

    auto sample_loss = [&](const Graph& g, bool with_grad) {
        Tape t;
        int y = net.forward_tape(t, gnn_features(g, net.hetero), g);
        int loss = expected_nc_loss(t, y, g);
        if (net.hetero) loss = t.add(loss, hetero_penalty_loss(t, y, g, cfg.hetero_a));
        double value = t.val(loss)(0, 0);
        if (with_grad) t.backward(loss);
        return value;
    };

    GnnHistory hist;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(train.begin(), train.end(), rng);
        double epoch_loss = 0.0;
        int in_batch = 0;
        for (int idx : train) {
            Graph aug = cfg.augment_rotations ? rotate_graph(dataset[idx], rng) : dataset[idx];
            epoch_loss += sample_loss(aug, true);
            if (++in_batch == cfg.batch) {
                opt.step(params);
                in_batch = 0;
            }
        }
        if (in_batch > 0) opt.step(params);
        hist.train_loss.push_back(epoch_loss / static_cast<double>(train.size()));

        if (val.empty()) {
            hist.val_loss.push_back(hist.train_loss.back());
        } else {
            double vl = 0.0;
            for (int idx : val) vl += sample_loss(dataset[idx], false);
            hist.val_loss.push_back(vl / static_cast<double>(val.size()));
        }
    }
    return hist;
}

}  // namespace polyagg
