#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "polyagg/graph.hpp"

namespace polyagg {

// Dense row-major matrix of doubles. Small sizes throughout, so no BLAS.
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}
    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

Matrix matmul(const Matrix& A, const Matrix& B);

// Trainable parameter with gradient accumulator and Adam moments.
struct Param {
    std::string name;
    Matrix value;
    Matrix grad;
    Matrix m, v;  // Adam moments, lazily shaped on first step

    explicit Param(std::string n = {}) : name(std::move(n)) {}
    void zero_grad() { grad = Matrix(value.rows, value.cols); }
};

// Uniform init in +/- 1/sqrt(fan_in).
Matrix uniform_init(int rows, int cols, int fan_in, std::mt19937_64& rng);

// Reverse-mode tape. Node ids are indices into the tape; ops record a
// backward closure. Graphs referenced by ops must outlive the tape.
class Tape {
  public:
    int input(Matrix m);
    int param(Param& p);  // gradient flushed into p.grad by backward()

    int add(int a, int b);               // same shape
    int sub(int a, int b);               // same shape
    int mul(int a, int b);               // elementwise
    int add_rowvec(int a, int r);        // r is 1 x C, broadcast over rows
    int div_rowvec(int a, int r);        // r is 1 x C, broadcast over rows
    int matmul(int a, int b);
    int transpose(int a);
    int tanh(int a);
    int row_softmax(int a);
    // Softmax over all entries of an n x 1 column; masked entries get
    // probability 0 (logit -inf). Mask is copied.
    int softmax_nodes(int a, const std::vector<char>* masked = nullptr);
    int neighbor_mean(int x, const Graph& g);  // row i = mean of X over N(i)
    int adj_mul(int x, const Graph& g);        // row i = sum_j w_ij * X_j
    int sum_all(int a);                        // 1 x 1
    int log(int a);
    int affine(int a, double alpha, double beta);  // alpha*x + beta
    int select_entry(int a, int i, int j);         // 1 x 1

    const Matrix& val(int id) const { return nodes_[id].data; }
    void backward(int loss);
    size_t size() const { return nodes_.size(); }

  private:
    struct Node {
        Matrix data;
        Matrix grad;
        std::function<void(Tape&, int)> back;  // (tape, own id)
        Param* bound = nullptr;
    };
    int push(Matrix data, std::function<void(Tape&, int)> back = {});
    Matrix& grad(int id) { return nodes_[id].grad; }
    std::vector<Node> nodes_;
};

// Dense layer: y = x W + b, as tape ops.
struct Dense {
    Param W{"W"}, b{"b"};
    Dense() = default;
    Dense(const std::string& name, int in, int out, std::mt19937_64& rng);
    int apply(Tape& t, int x) const;
    void collect(std::vector<Param*>& out);
};

// SAGE convolution: y_i = x_i W_self + mean_{j in N(i)} x_j W_neigh + b.
struct SageConv {
    Param W_self{"W_self"}, W_neigh{"W_neigh"}, b{"b"};
    SageConv() = default;
    SageConv(const std::string& name, int in, int out, std::mt19937_64& rng);
    int apply(Tape& t, int x, const Graph& g) const;
    void collect(std::vector<Param*>& out);
};

// Attentional aggregation to a single 1 x C row:
// out = sum_i softmax_nodes(gate(x_i)) * transform(x_i).
struct AttentionalAggregation {
    Dense gate, transform;
    AttentionalAggregation() = default;
    AttentionalAggregation(const std::string& name, int in, int out, std::mt19937_64& rng);
    int apply(Tape& t, int x) const;
    void collect(std::vector<Param*>& out);
};

// Adam with decoupled weight decay (applied to the value before the
// moment-based update).
struct AdamOpt {
    double lr = 1e-3;
    double weight_decay = 0.0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long long t = 0;

    void step(const std::vector<Param*>& params);
};

}  // namespace polyagg
