#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "polyagg/generate.hpp"
#include "polyagg/graph.hpp"
#include "polyagg/tensor.hpp"

using namespace polyagg;

namespace {

Matrix random_matrix(int r, int c, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(r, c);
    for (double& x : m.a) x = u(rng);
    return m;
}

// Central finite differences of a scalar tape function w.r.t. one parameter,
// compared entry by entry against the adjoint gradient.
void check_grad(Param& p, const std::function<double()>& eval, const Matrix& adjoint,
                double rel = 1e-5, double abs = 1e-8) {
    const double h = 1e-6;
    for (size_t i = 0; i < p.value.a.size(); ++i) {
        double keep = p.value.a[i];
        p.value.a[i] = keep + h;
        double up = eval();
        p.value.a[i] = keep - h;
        double down = eval();
        p.value.a[i] = keep;
        double fd = (up - down) / (2.0 * h);
        double an = adjoint.a[i];
        CHECK(std::abs(fd - an) <= abs + rel * std::max(std::abs(fd), std::abs(an)));
    }
}

}  // namespace

TEST_CASE("every tape op passes a finite-difference gradient check") {
    std::mt19937_64 rng(13);
    Mesh mesh = grid_quads(3, 3);
    Graph g = build_dual_graph(mesh);

    struct OpCase {
        const char* name;
        int rows, cols;
        std::function<int(Tape&, int)> apply;
    };
    std::vector<char> mask(9, 0);
    mask[2] = mask[5] = 1;
    // Fixed second operands so repeated tape evaluations see identical data.
    Matrix other = random_matrix(4, 3, rng);
    Matrix rowvec = random_matrix(1, 3, rng);
    Matrix divisor = random_matrix(1, 3, rng);
    for (double& v : divisor.a) v = 1.5 + std::abs(v);  // keep away from zero
    Matrix right = random_matrix(3, 5, rng);
    std::vector<OpCase> cases{
        {"add", 4, 3, [&other](Tape& t, int x) { return t.add(x, t.input(other)); }},
        {"sub", 4, 3, [&other](Tape& t, int x) { return t.sub(x, t.input(other)); }},
        {"mul", 4, 3, [&other](Tape& t, int x) { return t.mul(x, t.input(other)); }},
        {"add_rowvec", 4, 3,
         [&rowvec](Tape& t, int x) { return t.add_rowvec(x, t.input(rowvec)); }},
        {"div_rowvec", 4, 3,
         [&divisor](Tape& t, int x) { return t.div_rowvec(x, t.input(divisor)); }},
        {"matmul", 4, 3, [&right](Tape& t, int x) { return t.matmul(x, t.input(right)); }},
        {"transpose", 4, 3, [](Tape& t, int x) { return t.transpose(x); }},
        {"tanh", 4, 3, [](Tape& t, int x) { return t.tanh(x); }},
        {"row_softmax", 4, 3, [](Tape& t, int x) { return t.row_softmax(x); }},
        {"softmax_nodes", 9, 1, [&mask](Tape& t, int x) { return t.softmax_nodes(x, &mask); }},
        {"neighbor_mean", 9, 2, [&g](Tape& t, int x) { return t.neighbor_mean(x, g); }},
        {"adj_mul", 9, 2, [&g](Tape& t, int x) { return t.adj_mul(x, g); }},
        {"log", 4, 3,
         [](Tape& t, int x) { return t.log(t.affine(t.tanh(x), 0.4, 1.5)); }},  // keep positive
        {"affine", 4, 3, [](Tape& t, int x) { return t.affine(x, -0.7, 0.3); }},
        {"select_entry", 4, 3, [](Tape& t, int x) { return t.select_entry(x, 2, 1); }},
    };

    for (OpCase& oc : cases) {
        CAPTURE(oc.name);
        Param p("x");
        p.value = random_matrix(oc.rows, oc.cols, rng);
        // Weight the op output so sum_all has non-uniform cotangents.
        Matrix weights;
        auto eval = [&]() {
            Tape t;
            int out = oc.apply(t, t.param(p));
            if (weights.rows == 0) {
                std::mt19937_64 local(77);
                weights = random_matrix(t.val(out).rows, t.val(out).cols, local);
            }
            return t.val(t.sum_all(t.mul(out, t.input(weights)))).a[0];
        };
        eval();  // shape the weights
        Tape t;
        p.zero_grad();
        int out = oc.apply(t, t.param(p));
        int loss = t.sum_all(t.mul(out, t.input(weights)));
        t.backward(loss);
        check_grad(p, eval, p.grad);
    }
}

TEST_CASE("matmul agrees with a hand-rolled triple loop") {
    std::mt19937_64 rng(5);
    Matrix A = random_matrix(4, 6, rng), B = random_matrix(6, 3, rng);
    Matrix C = matmul(A, B);
    REQUIRE(C.rows == 4);
    REQUIRE(C.cols == 3);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 6; ++k) s += A(i, k) * B(k, j);
            CHECK(C(i, j) == doctest::Approx(s).epsilon(1e-13));
        }
}

TEST_CASE("row softmax rows sum to one and order is preserved") {
    std::mt19937_64 rng(6);
    Tape t;
    Matrix x = random_matrix(5, 4, rng, 3.0);
    int y = t.row_softmax(t.input(x));
    const Matrix& Y = t.val(y);
    for (int i = 0; i < 5; ++i) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) {
            CHECK(Y(i, j) > 0.0);
            s += Y(i, j);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        for (int j = 0; j < 4; ++j)
            for (int l = 0; l < 4; ++l)
                if (x(i, j) < x(i, l)) CHECK(Y(i, j) < Y(i, l));
    }
}

TEST_CASE("masked node softmax zeroes masked entries") {
    std::mt19937_64 rng(7);
    Tape t;
    Matrix x = random_matrix(6, 1, rng, 2.0);
    std::vector<char> mask{0, 1, 0, 1, 1, 0};
    int y = t.softmax_nodes(t.input(x), &mask);
    const Matrix& Y = t.val(y);
    double s = 0.0;
    for (int i = 0; i < 6; ++i) {
        if (mask[i]) CHECK(Y(i, 0) == 0.0);
        else CHECK(Y(i, 0) > 0.0);
        s += Y(i, 0);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("neighbor mean matches direct averaging") {
    Mesh mesh = grid_quads(3, 3);
    Graph g = build_dual_graph(mesh);
    std::mt19937_64 rng(8);
    Matrix x = random_matrix(9, 2, rng);
    Tape t;
    const Matrix& Y = t.val(t.neighbor_mean(t.input(x), g));
    for (int u = 0; u < 9; ++u)
        for (int c = 0; c < 2; ++c) {
            double s = 0.0;
            for (auto [v, w] : g.adj[u]) s += x(v, c);
            CHECK(Y(u, c) == doctest::Approx(s / g.degree(u)).epsilon(1e-12));
        }
}

TEST_CASE("Adam first step matches the closed form") {
    Param p("w");
    p.value = Matrix(1, 2);
    p.value.a = {1.0, -2.0};
    p.zero_grad();
    p.grad.a = {0.3, -0.1};
    AdamOpt opt;
    opt.lr = 0.01;
    std::vector<Param*> ps{&p};
    opt.step(ps);
    // First step: m_hat = g, v_hat = g^2, so the update is lr * g/(|g|+eps).
    CHECK(p.value.a[0] == doctest::Approx(1.0 - 0.01 * 0.3 / (0.3 + 1e-8)).epsilon(1e-10));
    CHECK(p.value.a[1] == doctest::Approx(-2.0 + 0.01 * 0.1 / (0.1 + 1e-8)).epsilon(1e-10));
}

TEST_CASE("Adam with zero learning rate leaves parameters untouched") {
    std::mt19937_64 rng(9);
    Param p("w");
    p.value = random_matrix(3, 3, rng);
    Matrix before = p.value;
    p.zero_grad();
    p.grad = random_matrix(3, 3, rng);
    AdamOpt opt;
    opt.lr = 0.0;
    opt.weight_decay = 1e-2;
    std::vector<Param*> ps{&p};
    opt.step(ps);
    CHECK(p.value.a == before.a);
}

TEST_CASE("uniform init stays within the fan-in bound and is seeded") {
    std::mt19937_64 a(3), b(3), c(4);
    Matrix m1 = uniform_init(20, 10, 50, a);
    Matrix m2 = uniform_init(20, 10, 50, b);
    Matrix m3 = uniform_init(20, 10, 50, c);
    CHECK(m1.a == m2.a);
    CHECK(m1.a != m3.a);
    double bound = 1.0 / std::sqrt(50.0);
    for (double v : m1.a) CHECK(std::abs(v) <= bound);
}
