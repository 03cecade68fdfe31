#include "polyagg/rl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polyagg/baselines.hpp"
#include "polyagg/partition.hpp"

namespace polyagg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double side_term(double cut, double vol) {
    if (vol <= 0.0) return cut > 0.0 ? kInf : 0.0;
    return cut / vol;
}

// Normalized centroid coordinates only (feature columns minus the measure).
Matrix coord_features(const Graph& g) {
    Matrix f = normalize_features(g);
    Matrix out(f.rows, g.dim);
    for (int i = 0; i < f.rows; ++i)
        for (int j = 0; j < g.dim; ++j) out(i, j) = f(i, j);
    return out;
}

Matrix partitioner_features(const EpisodeState& s, const Matrix& coords) {
    Matrix X(coords.rows, coords.cols + 2);
    for (int i = 0; i < coords.rows; ++i) {
        for (int j = 0; j < coords.cols; ++j) X(i, j) = coords(i, j);
        X(i, coords.cols) = s.sides[i] == 0 ? 1.0 : 0.0;
        X(i, coords.cols + 1) = s.sides[i] == 1 ? 1.0 : 0.0;
    }
    return X;
}

int sample_masked(const Matrix& probs, const std::vector<char>& mask, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = u(rng), acc = 0.0;
    int last = -1;
    for (int i = 0; i < probs.rows; ++i) {
        if (mask[i]) continue;
        last = i;
        acc += probs(i, 0);
        if (acc >= r) return i;
    }
    if (last < 0) throw std::logic_error("sample_masked: no unmasked action");
    return last;
}

int argmax_masked(const Matrix& probs, const std::vector<char>& mask) {
    int best = -1;
    for (int i = 0; i < probs.rows; ++i) {
        if (mask[i]) continue;
        if (best == -1 || probs(i, 0) > probs(best, 0)) best = i;
    }
    return best;
}
}  // namespace

ActorCriticNet::ActorCriticNet(int in, int h, std::uint64_t sd)
    : in_features(in), hidden(h), seed(sd) {
    std::mt19937_64 rng(sd);
    sage[0] = SageConv("sage1", in, h, rng);
    sage[1] = SageConv("sage2", h, h, rng);
    sage[2] = SageConv("sage3", h, h, rng);
    sage[3] = SageConv("sage4", h, h, rng);
    trunk1 = Dense("trunk1", h, h, rng);
    trunk2 = Dense("trunk2", h, h, rng);
    actor1 = Dense("actor1", h, h, rng);
    actor2 = Dense("actor2", h, 1, rng);
    critic_agg = AttentionalAggregation("critic_agg", h, h, rng);
    critic1 = Dense("critic1", h, std::max(h / 2, 1), rng);
    critic2 = Dense("critic2", std::max(h / 2, 1), 1, rng);
}

ActorCriticNet::Heads ActorCriticNet::forward_tape(Tape& t, const Matrix& X, const Graph& g,
                                                   const std::vector<char>& mask) const {
    if (X.cols != in_features)
        throw std::invalid_argument("ActorCriticNet: feature width mismatch");
    int x = t.input(X);
    for (const SageConv& s : sage) x = t.tanh(s.apply(t, x, g));
    x = t.tanh(trunk1.apply(t, x));
    x = t.tanh(trunk2.apply(t, x));
    int a = t.tanh(actor1.apply(t, x));
    int policy = t.softmax_nodes(actor2.apply(t, a), &mask);
    int c = t.tanh(critic_agg.apply(t, x));
    c = t.tanh(critic1.apply(t, c));
    int value = critic2.apply(t, c);
    return {policy, value};
}

std::vector<Param*> ActorCriticNet::params() {
    std::vector<Param*> out;
    for (SageConv& s : sage) s.collect(out);
    trunk1.collect(out);
    trunk2.collect(out);
    actor1.collect(out);
    actor2.collect(out);
    critic_agg.collect(out);
    critic1.collect(out);
    critic2.collect(out);
    return out;
}

std::string ActorCriticNet::descriptor() const {
    return "actor-critic " + std::to_string(in_features) + " " + std::to_string(hidden);
}

RefinerNet::RefinerNet(int in, int h, std::uint64_t sd) : in_features(in), hidden(h), seed(sd) {
    std::mt19937_64 rng(sd);
    shared1 = SageConv("shared1", in, h, rng);
    shared2 = SageConv("shared2", h, h, rng);
    actor_sage = SageConv("actor_sage", h, h, rng);
    actor_out = Dense("actor_out", h, 1, rng);
    critic_sage = SageConv("critic_sage", h, h, rng);
    critic_agg = AttentionalAggregation("critic_agg", h, 1, rng);
}

ActorCriticNet::Heads RefinerNet::forward_tape(Tape& t, const Matrix& X, const Graph& g,
                                               const std::vector<char>& mask) const {
    if (X.cols != in_features) throw std::invalid_argument("RefinerNet: feature width mismatch");
    int x = t.input(X);
    x = t.tanh(shared1.apply(t, x, g));
    x = t.tanh(shared2.apply(t, x, g));
    int a = t.tanh(actor_sage.apply(t, x, g));
    int policy = t.softmax_nodes(actor_out.apply(t, a), &mask);
    int c = t.tanh(critic_sage.apply(t, x, g));
    int value = critic_agg.apply(t, c);
    return {policy, value};
}

std::vector<Param*> RefinerNet::params() {
    std::vector<Param*> out;
    shared1.collect(out);
    shared2.collect(out);
    actor_sage.collect(out);
    actor_out.collect(out);
    critic_sage.collect(out);
    critic_agg.collect(out);
    return out;
}

std::string RefinerNet::descriptor() const {
    return "refiner " + std::to_string(in_features) + " " + std::to_string(hidden);
}

double EpisodeState::nc() const {
    return side_term(cut, vol[0]) + side_term(cut, vol[1]);
}

EpisodeState partitioner_reset(const Graph& g) {
    if (g.n < 2) throw std::invalid_argument("partitioner_reset: need at least 2 nodes");
    EpisodeState s;
    s.g = &g;
    s.sides.assign(g.n, 0);
    s.flipped.assign(g.n, 0);
    int seed = 0;
    double best = kInf;
    for (int u = 0; u < g.n; ++u) {
        double d = g.weighted_degree(u);
        if (d < best) {
            best = d;
            seed = u;
        }
    }
    s.sides[seed] = 1;
    s.flipped[seed] = 1;
    s.total_vol = g.total_volume();
    s.vol[1] = g.weighted_degree(seed);
    s.vol[0] = s.total_vol - s.vol[1];
    s.cut = s.vol[1];  // all of the seed's neighbors are still in S1
    s.episode_len = g.n / 2;
    return s;
}

double partitioner_step(EpisodeState& s, int action) {
    const Graph& g = *s.g;
    if (s.flipped[action] || s.sides[action] != 0)
        throw std::logic_error("partitioner_step: action already flipped");
    double before = s.nc();
    for (const auto& [v, w] : g.adj[action])
        s.cut += s.sides[v] == 0 ? w : -w;
    double d = g.weighted_degree(action);
    s.vol[0] -= d;
    s.vol[1] += d;
    s.sides[action] = 1;
    s.flipped[action] = 1;
    ++s.t;
    return before - s.nc();
}

double RefinerEnv::objective() const {
    double imb = full.vol[0] - full.vol[1];
    return full.nc() + b * imb * imb / full.total_vol;
}

Matrix RefinerEnv::features() const {
    const int n = sub.graph.n;
    Matrix X(n, 4);
    double bal = full.total_vol > 0 ? (full.vol[0] - full.vol[1]) / full.total_vol : 0.0;
    for (int i = 0; i < n; ++i) {
        int side = full.sides[sub.to_parent[i]];
        X(i, 0) = side == 0 ? 1.0 : 0.0;
        X(i, 1) = side == 1 ? 1.0 : 0.0;
        X(i, 2) = bal;
        X(i, 3) = -bal;
    }
    return X;
}

RefinerEnv refiner_reset(const Graph& g, std::span<const int> labels, int k_hop, double b) {
    RefinerEnv env;
    env.b = b;
    env.full.g = &g;
    env.full.sides.assign(labels.begin(), labels.end());
    env.full.total_vol = g.total_volume();
    for (int u = 0; u < g.n; ++u) env.full.vol[env.full.sides[u]] += g.weighted_degree(u);
    env.full.cut = cut_value(g, labels);

    std::vector<int> seeds;
    for (int u = 0; u < g.n; ++u)
        for (const auto& [v, w] : g.adj[u])
            if (labels[v] != labels[u]) {
                seeds.push_back(u);
                break;
            }
    if (seeds.empty()) {  // zero cut: nothing to refine
        env.episode_len = 0;
        return env;
    }
    env.sub = induced_subgraph(g, k_hop_nodes(g, seeds, k_hop));
    env.sub_mask.assign(env.sub.graph.n, 0);
    env.episode_len = std::clamp(static_cast<int>(std::lround(env.full.cut)), 1,
                                 env.sub.graph.n);
    return env;
}

double refiner_step(RefinerEnv& env, int sub_action) {
    if (env.sub_mask[sub_action]) throw std::logic_error("refiner_step: node already moved");
    const Graph& g = *env.full.g;
    int u = env.sub.to_parent[sub_action];
    double before = env.objective();
    int from = env.full.sides[u], to = 1 - from;
    for (const auto& [v, w] : g.adj[u])
        env.full.cut += env.full.sides[v] == from ? w : -w;
    double d = g.weighted_degree(u);
    env.full.vol[from] -= d;
    env.full.vol[to] += d;
    env.full.sides[u] = to;
    env.sub_mask[sub_action] = 1;
    ++env.t;
    return before - env.objective();
}

double refine_objective(const Graph& g, std::span<const int> labels, double b) {
    double nc = normalized_cut(g, labels, 2);
    double v0 = label_volume(g, labels, 0), v1 = label_volume(g, labels, 1);
    double tot = v0 + v1;
    if (tot <= 0.0) return nc;
    return nc + b * (v0 - v1) * (v0 - v1) / tot;
}

RlHistory a2c_train_partitioner(ActorCriticNet& net, const std::vector<Graph>& dataset,
                                const A2CConfig& cfg, int episodes, std::uint64_t seed) {
    if (dataset.empty()) throw std::invalid_argument("a2c_train_partitioner: empty dataset");
    std::mt19937_64 rng(seed);
    auto params = net.params();
    AdamOpt opt;
    opt.lr = cfg.lr;
    opt.weight_decay = cfg.weight_decay;

    std::vector<Matrix> coords;
    coords.reserve(dataset.size());
    for (const Graph& g : dataset) coords.push_back(coord_features(g));

    RlHistory hist;
    std::uniform_int_distribution<size_t> pick(0, dataset.size() - 1);
    for (int ep = 0; ep < episodes; ++ep) {
        size_t gi = dataset.size() == 1 ? 0 : pick(rng);
        const Graph& g = dataset[gi];
        EpisodeState st = partitioner_reset(g);

        Tape t;
        std::vector<int> logp, values;
        std::vector<double> rewards;
        while (!st.done()) {
            Matrix X = partitioner_features(st, coords[gi]);
            auto heads = net.forward_tape(t, X, g, st.flipped);
            int a = sample_masked(t.val(heads.policy), st.flipped, rng);
            logp.push_back(t.log(t.select_entry(heads.policy, a, 0)));
            values.push_back(heads.value);
            rewards.push_back(partitioner_step(st, a));
        }

        const int T = static_cast<int>(rewards.size());
        std::vector<double> R(T);
        double run = 0.0;  // terminal episode: no bootstrap
        for (int i = T - 1; i >= 0; --i) {
            run = rewards[i] + cfg.gamma * run;
            R[i] = run;
        }
        int loss = -1;
        for (int i = 0; i < T; ++i) {
            double A = R[i] - t.val(values[i])(0, 0);
            int actor_i = t.affine(logp[i], -A, 0.0);
            int diff = t.affine(values[i], -1.0, R[i]);
            int critic_i = t.affine(t.mul(diff, diff), cfg.alpha, 0.0);
            int term = t.add(actor_i, critic_i);
            loss = loss < 0 ? term : t.add(loss, term);
        }
        if (loss >= 0) {
            t.backward(loss);
            opt.step(params);
        }
        double ret = 0.0;
        for (double r : rewards) ret += r;
        hist.returns.push_back(ret);
        hist.final_nc.push_back(st.nc());
    }
    return hist;
}

RlHistory a2c_train_refiner(RefinerNet& net, const std::vector<Graph>& dataset,
                            const A2CConfig& cfg, int episodes, std::uint64_t seed) {
    if (dataset.empty()) throw std::invalid_argument("a2c_train_refiner: empty dataset");
    std::mt19937_64 rng(seed);
    auto params = net.params();
    AdamOpt opt;
    opt.lr = cfg.lr;
    opt.weight_decay = cfg.weight_decay;

    RlHistory hist;
    std::uniform_int_distribution<size_t> pick(0, dataset.size() - 1);
    for (int ep = 0; ep < episodes; ++ep) {
        size_t gi = dataset.size() == 1 ? 0 : pick(rng);
        const Graph& g = dataset[gi];
        RefinerEnv env = refiner_reset(g, greedy_grow_bisect(g), cfg.k_hop, cfg.b);
        double ret = 0.0;

        auto tape = std::make_unique<Tape>();
        std::vector<int> logp, values;
        std::vector<double> rewards;
        while (!env.done()) {
            auto heads = net.forward_tape(*tape, env.features(), env.sub.graph, env.sub_mask);
            int a = sample_masked(tape->val(heads.policy), env.sub_mask, rng);
            logp.push_back(tape->log(tape->select_entry(heads.policy, a, 0)));
            values.push_back(heads.value);
            double r = refiner_step(env, a);
            rewards.push_back(r);
            ret += r;

            bool terminal = env.done();
            if (static_cast<int>(rewards.size()) == cfg.update_every || terminal) {
                double boot = 0.0;
                if (!terminal) {
                    // Value of the next state, used as a constant.
                    auto next = net.forward_tape(*tape, env.features(), env.sub.graph,
                                                 env.sub_mask);
                    boot = tape->val(next.value)(0, 0);
                }
                const int T = static_cast<int>(rewards.size());
                std::vector<double> R(T);
                double run = boot;
                for (int i = T - 1; i >= 0; --i) {
                    run = rewards[i] + cfg.gamma * run;
                    R[i] = run;
                }
                int loss = -1;
                for (int i = 0; i < T; ++i) {
                    double A = R[i] - tape->val(values[i])(0, 0);
                    int actor_i = tape->affine(logp[i], -A, 0.0);
                    int diff = tape->affine(values[i], -1.0, R[i]);
                    int critic_i = tape->affine(tape->mul(diff, diff), cfg.alpha, 0.0);
                    int term = tape->add(actor_i, critic_i);
                    loss = loss < 0 ? term : tape->add(loss, term);
                }
                if (loss >= 0) {
                    tape->backward(loss);
                    opt.step(params);
                }
                tape = std::make_unique<Tape>();
                logp.clear();
                values.clear();
                rewards.clear();
            }
        }
        hist.returns.push_back(ret);
        hist.final_nc.push_back(env.full.g ? env.full.nc() : 0.0);
    }
    return hist;
}

std::vector<int> rl_bisect(const ActorCriticNet& net, const Graph& g) {
    if (g.n == 1) return {0};
    Matrix coords = coord_features(g);
    EpisodeState st = partitioner_reset(g);
    std::vector<int> best = st.sides;
    double best_nc = st.nc();
    while (!st.done()) {
        Tape t;
        auto heads = net.forward_tape(t, partitioner_features(st, coords), g, st.flipped);
        int a = argmax_masked(t.val(heads.policy), st.flipped);
        if (a < 0) break;
        partitioner_step(st, a);
        bool proper = st.vol[0] > 0.0 && st.vol[1] > 0.0;
        if (proper && st.nc() < best_nc) {
            best_nc = st.nc();
            best = st.sides;
        }
    }
    return best;
}

std::vector<int> rl_refine(const RefinerNet& net, const Graph& g, std::vector<int> labels,
                           const A2CConfig& cfg) {
    if (g.n < 2) return labels;
    RefinerEnv env = refiner_reset(g, labels, cfg.k_hop, cfg.b);
    if (env.episode_len == 0) return labels;
    std::vector<int> best = labels;
    double best_obj = env.objective();
    while (!env.done()) {
        Tape t;
        auto heads = net.forward_tape(t, env.features(), env.sub.graph, env.sub_mask);
        int a = argmax_masked(t.val(heads.policy), env.sub_mask);
        if (a < 0) break;
        refiner_step(env, a);
        double obj = env.objective();
        if (obj < best_obj) {
            best_obj = obj;
            best = env.full.sides;
        }
    }
    return best;
}

}  // namespace polyagg
