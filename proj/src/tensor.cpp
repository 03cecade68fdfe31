#include "polyagg/tensor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace polyagg {

namespace {
void check(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}
}  // namespace

Matrix matmul(const Matrix& A, const Matrix& B) {
    check(A.cols == B.rows, "matmul: inner dimensions differ");
    Matrix C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            double aik = A(i, k);
            if (aik == 0.0) continue;
            const double* brow = &B.a[static_cast<size_t>(k) * B.cols];
            double* crow = &C.a[static_cast<size_t>(i) * C.cols];
            for (int j = 0; j < B.cols; ++j) crow[j] += aik * brow[j];
        }
    return C;
}

Matrix uniform_init(int rows, int cols, int fan_in, std::mt19937_64& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(std::max(fan_in, 1)));
    std::uniform_real_distribution<double> u(-bound, bound);
    Matrix m(rows, cols);
    for (double& x : m.a) x = u(rng);
    return m;
}

int Tape::push(Matrix data, std::function<void(Tape&, int)> back) {
    Node n;
    n.data = std::move(data);
    n.grad = Matrix(n.data.rows, n.data.cols);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

int Tape::input(Matrix m) { return push(std::move(m)); }

int Tape::param(Param& p) {
    int id = push(p.value);
    nodes_[id].bound = &p;
    return id;
}

int Tape::add(int a, int b) {
    check(val(a).same_shape(val(b)), "add: shape mismatch");
    Matrix out = val(a);
    for (size_t i = 0; i < out.a.size(); ++i) out.a[i] += val(b).a[i];
    return push(std::move(out), [a, b](Tape& t, int id) {
        for (size_t i = 0; i < t.grad(id).a.size(); ++i) {
            t.grad(a).a[i] += t.grad(id).a[i];
            t.grad(b).a[i] += t.grad(id).a[i];
        }
    });
}

int Tape::sub(int a, int b) {
    check(val(a).same_shape(val(b)), "sub: shape mismatch");
    Matrix out = val(a);
    for (size_t i = 0; i < out.a.size(); ++i) out.a[i] -= val(b).a[i];
    return push(std::move(out), [a, b](Tape& t, int id) {
        for (size_t i = 0; i < t.grad(id).a.size(); ++i) {
            t.grad(a).a[i] += t.grad(id).a[i];
            t.grad(b).a[i] -= t.grad(id).a[i];
        }
    });
}

int Tape::mul(int a, int b) {
    check(val(a).same_shape(val(b)), "mul: shape mismatch");
    Matrix out = val(a);
    for (size_t i = 0; i < out.a.size(); ++i) out.a[i] *= val(b).a[i];
    return push(std::move(out), [a, b](Tape& t, int id) {
        for (size_t i = 0; i < t.grad(id).a.size(); ++i) {
            t.grad(a).a[i] += t.grad(id).a[i] * t.val(b).a[i];
            t.grad(b).a[i] += t.grad(id).a[i] * t.val(a).a[i];
        }
    });
}

int Tape::add_rowvec(int a, int r) {
    check(val(r).rows == 1 && val(r).cols == val(a).cols, "add_rowvec: bad broadcast shape");
    Matrix out = val(a);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out(i, j) += val(r)(0, j);
    return push(std::move(out), [a, r](Tape& t, int id) {
        const Matrix& g = t.grad(id);
        for (size_t i = 0; i < g.a.size(); ++i) t.grad(a).a[i] += g.a[i];
        for (int i = 0; i < g.rows; ++i)
            for (int j = 0; j < g.cols; ++j) t.grad(r)(0, j) += g(i, j);
    });
}

int Tape::div_rowvec(int a, int r) {
    check(val(r).rows == 1 && val(r).cols == val(a).cols, "div_rowvec: bad broadcast shape");
    Matrix out = val(a);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out(i, j) /= val(r)(0, j);
    return push(std::move(out), [a, r](Tape& t, int id) {
        const Matrix& g = t.grad(id);
        const Matrix& av = t.val(a);
        const Matrix& rv = t.val(r);
        for (int i = 0; i < g.rows; ++i)
            for (int j = 0; j < g.cols; ++j) {
                t.grad(a)(i, j) += g(i, j) / rv(0, j);
                t.grad(r)(0, j) -= g(i, j) * av(i, j) / (rv(0, j) * rv(0, j));
            }
    });
}

int Tape::matmul(int a, int b) {
    Matrix out = polyagg::matmul(val(a), val(b));
    return push(std::move(out), [a, b](Tape& t, int id) {
        const Matrix& g = t.grad(id);
        const Matrix& A = t.val(a);
        const Matrix& B = t.val(b);
        // dA += g * B^T
        for (int i = 0; i < A.rows; ++i)
            for (int j = 0; j < g.cols; ++j) {
                double gij = g(i, j);
                if (gij == 0.0) continue;
                for (int k = 0; k < A.cols; ++k) t.grad(a)(i, k) += gij * B(k, j);
            }
        // dB += A^T * g
        for (int i = 0; i < A.rows; ++i)
            for (int k = 0; k < A.cols; ++k) {
                double aik = A(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < g.cols; ++j) t.grad(b)(k, j) += aik * g(i, j);
            }
    });
}

int Tape::transpose(int a) {
    const Matrix& A = val(a);
    Matrix out(A.cols, A.rows);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) out(j, i) = A(i, j);
    return push(std::move(out), [a](Tape& t, int id) {
        const Matrix& g = t.grad(id);
        for (int i = 0; i < g.rows; ++i)
            for (int j = 0; j < g.cols; ++j) t.grad(a)(j, i) += g(i, j);
    });
}

int Tape::tanh(int a) {
    Matrix out = val(a);
    for (double& x : out.a) x = std::tanh(x);
    return push(std::move(out), [a](Tape& t, int id) {
        const Matrix& y = t.val(id);
        for (size_t i = 0; i < y.a.size(); ++i)
            t.grad(a).a[i] += t.grad(id).a[i] * (1.0 - y.a[i] * y.a[i]);
    });
}

int Tape::row_softmax(int a) {
    Matrix out = val(a);
    for (int i = 0; i < out.rows; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < out.cols; ++j) mx = std::max(mx, out(i, j));
        double sum = 0.0;
        for (int j = 0; j < out.cols; ++j) {
            out(i, j) = std::exp(out(i, j) - mx);
            sum += out(i, j);
        }
        for (int j = 0; j < out.cols; ++j) out(i, j) /= sum;
    }
    return push(std::move(out), [a](Tape& t, int id) {
        const Matrix& p = t.val(id);
        const Matrix& g = t.grad(id);
        for (int i = 0; i < p.rows; ++i) {
            double dot = 0.0;
            for (int j = 0; j < p.cols; ++j) dot += g(i, j) * p(i, j);
            for (int j = 0; j < p.cols; ++j) t.grad(a)(i, j) += p(i, j) * (g(i, j) - dot);
        }
    });
}

int Tape::softmax_nodes(int a, const std::vector<char>* masked) {
    const Matrix& x = val(a);
    check(x.cols == 1, "softmax_nodes: expects an n x 1 column");
    std::vector<char> mask = masked ? *masked : std::vector<char>(x.rows, 0);
    check(static_cast<int>(mask.size()) == x.rows, "softmax_nodes: mask size mismatch");
    Matrix out(x.rows, 1);
    double mx = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (int i = 0; i < x.rows; ++i)
        if (!mask[i]) {
            mx = std::max(mx, x(i, 0));
            any = true;
        }
    check(any, "softmax_nodes: all nodes masked");
    double sum = 0.0;
    for (int i = 0; i < x.rows; ++i)
        if (!mask[i]) {
            out(i, 0) = std::exp(x(i, 0) - mx);
            sum += out(i, 0);
        }
    for (int i = 0; i < x.rows; ++i) out(i, 0) = mask[i] ? 0.0 : out(i, 0) / sum;
    return push(std::move(out), [a, mask = std::move(mask)](Tape& t, int id) {
        const Matrix& p = t.val(id);
        const Matrix& g = t.grad(id);
        double dot = 0.0;
        for (int i = 0; i < p.rows; ++i) dot += g(i, 0) * p(i, 0);
        for (int i = 0; i < p.rows; ++i)
            if (!mask[i]) t.grad(a)(i, 0) += p(i, 0) * (g(i, 0) - dot);
    });
}

int Tape::neighbor_mean(int x, const Graph& g) {
    const Matrix& X = val(x);
    check(X.rows == g.n, "neighbor_mean: row count differs from node count");
    Matrix out(X.rows, X.cols);
    for (int i = 0; i < g.n; ++i) {
        if (g.adj[i].empty()) continue;
        for (const auto& [j, w] : g.adj[i])
            for (int c = 0; c < X.cols; ++c) out(i, c) += X(j, c);
        double inv = 1.0 / static_cast<double>(g.adj[i].size());
        for (int c = 0; c < X.cols; ++c) out(i, c) *= inv;
    }
    return push(std::move(out), [x, gp = &g](Tape& t, int id) {
        const Matrix& gr = t.grad(id);
        for (int i = 0; i < gp->n; ++i) {
            if (gp->adj[i].empty()) continue;
            double inv = 1.0 / static_cast<double>(gp->adj[i].size());
            for (const auto& [j, w] : gp->adj[i])
                for (int c = 0; c < gr.cols; ++c) t.grad(x)(j, c) += gr(i, c) * inv;
        }
    });
}

int Tape::adj_mul(int x, const Graph& g) {
    const Matrix& X = val(x);
    check(X.rows == g.n, "adj_mul: row count differs from node count");
    Matrix out(X.rows, X.cols);
    for (int i = 0; i < g.n; ++i)
        for (const auto& [j, w] : g.adj[i])
            for (int c = 0; c < X.cols; ++c) out(i, c) += w * X(j, c);
    return push(std::move(out), [x, gp = &g](Tape& t, int id) {
        // A is symmetric, so the adjoint is another adj_mul.
        const Matrix& gr = t.grad(id);
        for (int i = 0; i < gp->n; ++i)
            for (const auto& [j, w] : gp->adj[i])
                for (int c = 0; c < gr.cols; ++c) t.grad(x)(j, c) += w * gr(i, c);
    });
}

int Tape::sum_all(int a) {
    double s = 0.0;
    for (double v : val(a).a) s += v;
    Matrix out(1, 1);
    out(0, 0) = s;
    return push(std::move(out), [a](Tape& t, int id) {
        double g = t.grad(id)(0, 0);
        for (double& v : t.grad(a).a) v += g;
    });
}

int Tape::log(int a) {
    Matrix out = val(a);
    for (double& x : out.a) x = std::log(x);
    return push(std::move(out), [a](Tape& t, int id) {
        for (size_t i = 0; i < t.grad(id).a.size(); ++i)
            t.grad(a).a[i] += t.grad(id).a[i] / t.val(a).a[i];
    });
}

int Tape::affine(int a, double alpha, double beta) {
    Matrix out = val(a);
    for (double& x : out.a) x = alpha * x + beta;
    return push(std::move(out), [a, alpha](Tape& t, int id) {
        for (size_t i = 0; i < t.grad(id).a.size(); ++i)
            t.grad(a).a[i] += alpha * t.grad(id).a[i];
    });
}

int Tape::select_entry(int a, int i, int j) {
    Matrix out(1, 1);
    out(0, 0) = val(a)(i, j);
    return push(std::move(out), [a, i, j](Tape& t, int id) {
        t.grad(a)(i, j) += t.grad(id)(0, 0);
    });
}

void Tape::backward(int loss) {
    check(val(loss).rows == 1 && val(loss).cols == 1, "backward: loss must be scalar");
    grad(loss)(0, 0) = 1.0;
    for (int id = loss; id >= 0; --id) {
        if (nodes_[id].back) nodes_[id].back(*this, id);
        if (nodes_[id].bound) {
            Param* p = nodes_[id].bound;
            if (!p->grad.same_shape(p->value)) p->zero_grad();
            for (size_t i = 0; i < p->grad.a.size(); ++i) p->grad.a[i] += nodes_[id].grad.a[i];
        }
    }
}

Dense::Dense(const std::string& name, int in, int out, std::mt19937_64& rng) {
    W.name = name + ".W";
    W.value = uniform_init(in, out, in, rng);
    b.name = name + ".b";
    b.value = uniform_init(1, out, in, rng);
}

int Dense::apply(Tape& t, int x) const {
    return t.add_rowvec(t.matmul(x, t.param(const_cast<Param&>(W))),
                        t.param(const_cast<Param&>(b)));
}

void Dense::collect(std::vector<Param*>& out) {
    out.push_back(&W);
    out.push_back(&b);
}

SageConv::SageConv(const std::string& name, int in, int out, std::mt19937_64& rng) {
    W_self.name = name + ".W_self";
    W_self.value = uniform_init(in, out, in, rng);
    W_neigh.name = name + ".W_neigh";
    W_neigh.value = uniform_init(in, out, in, rng);
    b.name = name + ".b";
    b.value = uniform_init(1, out, in, rng);
}

int SageConv::apply(Tape& t, int x, const Graph& g) const {
    int self = t.matmul(x, t.param(const_cast<Param&>(W_self)));
    int neigh = t.matmul(t.neighbor_mean(x, g), t.param(const_cast<Param&>(W_neigh)));
    return t.add_rowvec(t.add(self, neigh), t.param(const_cast<Param&>(b)));
}

void SageConv::collect(std::vector<Param*>& out) {
    out.push_back(&W_self);
    out.push_back(&W_neigh);
    out.push_back(&b);
}

AttentionalAggregation::AttentionalAggregation(const std::string& name, int in, int out,
                                               std::mt19937_64& rng)
    : gate(name + ".gate", in, 1, rng), transform(name + ".transform", in, out, rng) {}

int AttentionalAggregation::apply(Tape& t, int x) const {
    int alpha = t.softmax_nodes(gate.apply(t, x));
    int h = transform.apply(t, x);
    return t.matmul(t.transpose(alpha), h);  // 1 x out
}

void AttentionalAggregation::collect(std::vector<Param*>& out) {
    gate.collect(out);
    transform.collect(out);
}

void AdamOpt::step(const std::vector<Param*>& params) {
    ++t;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (Param* p : params) {
        if (!p->grad.same_shape(p->value)) p->zero_grad();
        if (!p->m.same_shape(p->value)) {
            p->m = Matrix(p->value.rows, p->value.cols);
            p->v = Matrix(p->value.rows, p->value.cols);
        }
        for (size_t i = 0; i < p->value.a.size(); ++i) {
            p->value.a[i] -= lr * weight_decay * p->value.a[i];
            double g = p->grad.a[i];
            p->m.a[i] = beta1 * p->m.a[i] + (1.0 - beta1) * g;
            p->v.a[i] = beta2 * p->v.a[i] + (1.0 - beta2) * g * g;
            double mhat = p->m.a[i] / bc1;
            double vhat = p->v.a[i] / bc2;
            p->value.a[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
        p->zero_grad();
    }
}

}  // namespace polyagg
