#pragma once

#include "nitrogym/adam.hpp"
#include "nitrogym/dqn.hpp"
#include "nitrogym/mlp.hpp"
#include "nitrogym/replay_buffer.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace nitrogym {

struct SacHyper {
    double gamma = 0.98;
    double tau = 0.001;
    double initial_alpha = 0.2;
    bool auto_alpha = true;
    double target_entropy = -1.0;
    double action_low = 0.0;
    double action_high = 200.0;
    int batch_size = 64;
    double learning_rate = 5e-5;       // actor and critics
    double alpha_learning_rate = 5e-5;
    int episodes = 1200;
    std::size_t buffer_capacity = 100000;
    int gradient_steps_per_day = 1;
    std::size_t warmup = 1000;
    std::vector<int> hidden = {128, 128};
    Activation activation = Activation::Relu;
    double reward_scale = 1.0;

    void validate() const;
};

struct SacSample {
    double action = 0.0;   // environment units in [action_low, action_high]
    double squashed = 0.0; // tanh(u) in (-1, 1)
    double log_prob = 0.0; // density of the squashed action
};

// Soft actor-critic with twin critics, Polyak-averaged targets and an
// optionally auto-tuned temperature. The actor is a tanh-squashed Gaussian
// over [action_low, action_high]; densities are taken in the squashed space.
class SacAgent {
public:
    SacAgent(int obs_dim, SacHyper hyper, std::uint64_t seed);

    SacSample sample_action(std::span<const double> obs);
    double mean_action(std::span<const double> obs) const;
    // Mean and log-std of the pre-squash Gaussian.
    std::pair<double, double> actor_outputs(std::span<const double> obs) const;

    void remember(Transition t) { buffer_.push(std::move(t)); }

    // Critic regression, actor step, temperature step, then Polyak update of
    // both target critics. No-op while underfull.
    UpdateResult update();

    double alpha() const;
    const SacHyper& hyper() const { return hyper_; }
    const ParamSet& actor() const { return actor_; }
    const ParamSet& critic(int i) const { return critics_[i]; }
    const ParamSet& target_critic(int i) const { return targets_[i]; }
    ParamSet& actor() { return actor_; }
    ParamSet& critic(int i) { return critics_[i]; }
    ParamSet& target_critic(int i) { return targets_[i]; }
    double log_alpha() const { return log_alpha_; }
    void set_log_alpha(double v) { log_alpha_ = v; }
    const ReplayBuffer& buffer() const { return buffer_; }
    std::int64_t gradient_steps() const { return gradient_steps_; }
    void set_gradient_steps(std::int64_t n) { gradient_steps_ = n; }
    std::uint64_t seed() const { return seed_; }
    AdamState& actor_optimizer() { return actor_opt_; }
    const AdamState& actor_optimizer() const { return actor_opt_; }
    AdamState& critic_optimizer(int i) { return critic_opt_[i]; }
    const AdamState& critic_optimizer(int i) const { return critic_opt_[i]; }
    AdamState& alpha_optimizer() { return alpha_opt_; }
    const AdamState& alpha_optimizer() const { return alpha_opt_; }

    // Maps between environment units and the squashed [-1, 1] space.
    double to_squashed(double action) const;
    double to_action(double squashed) const;

private:
    SacHyper hyper_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
    ParamSet actor_;
    std::array<ParamSet, 2> critics_;
    std::array<ParamSet, 2> targets_;
    AdamState actor_opt_;
    std::array<AdamState, 2> critic_opt_;
    AdamState alpha_opt_;
    double log_alpha_;
    ReplayBuffer buffer_;
    std::int64_t gradient_steps_ = 0;
};

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

} // namespace nitrogym
