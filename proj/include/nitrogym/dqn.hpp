#pragma once

#include "nitrogym/adam.hpp"
#include "nitrogym/mlp.hpp"
#include "nitrogym/replay_buffer.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace nitrogym {

struct DqnHyper {
    double gamma = 0.99;
    int batch_size = 64;
    double learning_rate = 5e-5;
    int episodes = 1200;
    double epsilon_decay = 0.992;
    std::size_t buffer_capacity = 100000;
    int target_update_interval = 200; // gradient steps between hard copies
    int gradient_steps_per_day = 1;
    std::size_t warmup = 1000;        // transitions stored before learning starts
    std::vector<int> hidden = {128, 128};
    Activation activation = Activation::Relu;
    double reward_scale = 1.0;        // rewards are multiplied by this before regression

    void validate() const;
};

// Argmax with ties resolved to the lowest index.
int argmax_lowest(std::span<const double> values);

// Epsilon-greedy over the network's outputs.
int dqn_select_action(const ParamSet& qnet, std::span<const double> obs, double epsilon, std::mt19937_64& rng);

// r (terminal) or r + gamma * max_a' Q_target(s', a') for each transition,
// with r multiplied by reward_scale.
Eigen::VectorXd dqn_td_targets(const std::vector<const Transition*>& batch, const ParamSet& target_params,
                               double gamma, double reward_scale = 1.0);

struct UpdateResult {
    bool performed = false; // false when the buffer is underfull
    double loss = 0.0;
};

// Deep Q-network learner: online and target networks, Adam state, replay
// buffer and its own RNG stream.
class DqnAgent {
public:
    DqnAgent(int obs_dim, int num_actions, DqnHyper hyper, std::uint64_t seed);

    int select_action(std::span<const double> obs, double epsilon);
    int greedy_action(std::span<const double> obs) const;
    std::vector<double> q_values(std::span<const double> obs) const;

    void remember(Transition t) { buffer_.push(std::move(t)); }

    // One gradient step on the mean squared TD error of a sampled batch;
    // hard-copies the target every target_update_interval steps. No-op while
    // the buffer holds fewer than max(batch, warmup) transitions.
    UpdateResult update();

    const DqnHyper& hyper() const { return hyper_; }
    const ParamSet& online() const { return online_; }
    const ParamSet& target() const { return target_; }
    ParamSet& online() { return online_; }
    ParamSet& target() { return target_; }
    const AdamState& optimizer() const { return adam_; }
    AdamState& optimizer() { return adam_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    std::int64_t gradient_steps() const { return gradient_steps_; }
    void set_gradient_steps(std::int64_t n) { gradient_steps_ = n; }
    std::uint64_t seed() const { return seed_; }

private:
    DqnHyper hyper_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
    ParamSet online_;
    ParamSet target_;
    AdamState adam_;
    ReplayBuffer buffer_;
    std::int64_t gradient_steps_ = 0;
};

MlpSpec q_network_spec(int obs_dim, int num_actions, const std::vector<int>& hidden, Activation activation);

} // namespace nitrogym
