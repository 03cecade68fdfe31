#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polyagg/tensor.hpp"

namespace polyagg {

struct A2CConfig {
    double gamma = 0.9;      // discount
    double alpha = 0.1;      // critic loss multiplier (critic-vs-actor rate)
    double lr = 1e-3;
    int update_every = 8;    // refiner update period; partitioner updates per episode
    double b = 0.35;         // imbalance penalty coefficient
    int k_hop = 3;           // refiner subgraph radius, 2..4
    double weight_decay = 0.0;
};

// Partitioner actor-critic: shared trunk of 4 SAGE + 2 dense layers; actor
// head 2 dense -> masked softmax over nodes; critic head attentional
// aggregation -> 2 tapering dense -> scalar. tanh everywhere but the heads'
// final layers.
class ActorCriticNet {
  public:
    ActorCriticNet() = default;
    ActorCriticNet(int in_features, int hidden, std::uint64_t seed);

    struct Heads {
        int policy;  // n x 1 probabilities, masked entries zero
        int value;   // 1 x 1
    };
    Heads forward_tape(Tape& t, const Matrix& X, const Graph& g,
                       const std::vector<char>& mask) const;

    std::vector<Param*> params();
    std::string descriptor() const;

    int in_features = 0, hidden = 0;
    std::uint64_t seed = 0;
    std::array<SageConv, 4> sage;
    Dense trunk1, trunk2;
    Dense actor1, actor2;
    AttentionalAggregation critic_agg;
    Dense critic1, critic2;
};

// Refiner actor-critic: 2 shared SAGE layers; actor 1 SAGE + 1 dense ->
// masked softmax; critic 1 SAGE + attentional aggregation -> scalar.
class RefinerNet {
  public:
    RefinerNet() = default;
    RefinerNet(int in_features, int hidden, std::uint64_t seed);

    ActorCriticNet::Heads forward_tape(Tape& t, const Matrix& X, const Graph& g,
                                       const std::vector<char>& mask) const;

    std::vector<Param*> params();
    std::string descriptor() const;

    int in_features = 0, hidden = 0;
    std::uint64_t seed = 0;
    SageConv shared1, shared2, actor_sage, critic_sage;
    Dense actor_out;
    AttentionalAggregation critic_agg;
};

// Bisection episode state with incrementally tracked cut and side volumes.
struct EpisodeState {
    const Graph* g = nullptr;
    std::vector<int> sides;     // 0 = S1, 1 = S2
    std::vector<char> flipped;  // no longer movable
    double cut = 0.0;
    double vol[2] = {0.0, 0.0};
    double total_vol = 0.0;
    int t = 0;
    int episode_len = 0;

    double nc() const;  // cut/vol0 + cut/vol1; +inf on an empty side with cut
    bool done() const { return t >= episode_len; }
};

// All nodes in S1 except a minimum-weighted-degree seed (lowest id tie) in
// S2, already masked; episode length floor(n/2).
EpisodeState partitioner_reset(const Graph& g);

// Move `action` from S1 to S2, mask it, return the NC decrease.
double partitioner_step(EpisodeState& s, int action);

// Refiner environment: actions live on the k-hop subgraph around the cut,
// but cut/volumes (and thus rewards) are tracked on the full graph.
struct RefinerEnv {
    Subgraph sub;
    EpisodeState full;            // sides/cut/volumes on the parent graph
    std::vector<char> sub_mask;   // per subgraph node
    double b = 0.35;
    int t = 0;
    int episode_len = 0;

    double objective() const;  // NC + b * (vol0-vol1)^2 / total_vol
    bool done() const { return t >= episode_len; }
    Matrix features() const;   // [one-hot(2) | +balance, -balance] per sub node
};

RefinerEnv refiner_reset(const Graph& g, std::span<const int> labels, int k_hop, double b);

// Flip subgraph node `sub_action` (either direction), mask it, return the
// decrease of the combined objective.
double refiner_step(RefinerEnv& env, int sub_action);

double refine_objective(const Graph& g, std::span<const int> labels, double b);

struct RlHistory {
    std::vector<double> returns;   // per-episode sum of rewards
    std::vector<double> final_nc;  // NC of the episode's final state
};

RlHistory a2c_train_partitioner(ActorCriticNet& net, const std::vector<Graph>& dataset,
                                const A2CConfig& cfg, int episodes, std::uint64_t seed);

RlHistory a2c_train_refiner(RefinerNet& net, const std::vector<Graph>& dataset,
                            const A2CConfig& cfg, int episodes, std::uint64_t seed);

// Greedy argmax rollout; returns the visited state of lowest NC among those
// with two non-empty sides (the final state need not win).
std::vector<int> rl_bisect(const ActorCriticNet& net, const Graph& g);

// Greedy rollout on the refiner environment; returns the best visited
// labeling by NC + b*imbalance, which includes the input (t=0) state.
std::vector<int> rl_refine(const RefinerNet& net, const Graph& g, std::vector<int> labels,
                           const A2CConfig& cfg);

}  // namespace polyagg
