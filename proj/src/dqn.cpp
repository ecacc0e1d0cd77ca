#include "nitrogym/dqn.hpp"

#include "nitrogym/errors.hpp"

#include <algorithm>

namespace nitrogym {

void DqnHyper::validate() const
{
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("dqn gamma must lie in (0,1]");
    if (!(epsilon_decay > 0.0 && epsilon_decay < 1.0)) throw ConfigError("dqn epsilon decay must lie in (0,1)");
    if (batch_size < 1) throw ConfigError("dqn batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("dqn learning rate must be > 0");
    if (episodes < 1) throw ConfigError("dqn episodes must be >= 1");
    if (buffer_capacity < static_cast<std::size_t>(batch_size)) throw ConfigError("replay capacity below batch size");
    if (target_update_interval < 1) throw ConfigError("target update interval must be >= 1");
    if (gradient_steps_per_day < 0) throw ConfigError("gradient steps per day must be >= 0");
    if (!(reward_scale > 0.0)) throw ConfigError("reward scale must be > 0");
}

MlpSpec q_network_spec(int obs_dim, int num_actions, const std::vector<int>& hidden, Activation activation)
{
    MlpSpec spec;
    spec.layer_sizes.push_back(obs_dim);
    spec.layer_sizes.insert(spec.layer_sizes.end(), hidden.begin(), hidden.end());
    spec.layer_sizes.push_back(num_actions);
    spec.hidden = activation;
    spec.validate();
    return spec;
}

int argmax_lowest(std::span<const double> values)
{
    if (values.empty()) throw ShapeError("argmax of an empty vector");
    int best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    return best;
}

int dqn_select_action(const ParamSet& qnet, std::span<const double> obs, double epsilon, std::mt19937_64& rng)
{
    if (static_cast<int>(obs.size()) != qnet.spec().input_size())
        throw ShapeError("observation length does not match the Q-network input");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (epsilon > 0.0 && unif(rng) < epsilon) {
        std::uniform_int_distribution<int> pick(0, qnet.spec().output_size() - 1);
        return pick(rng);
    }
    return argmax_lowest(forward(qnet, obs));
}

namespace {

Eigen::MatrixXd stack_states(const std::vector<const Transition*>& batch, bool next)
{
    const auto dim = static_cast<Eigen::Index>(batch.front()->state.size());
    Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t j = 0; j < batch.size(); ++j) {
        const auto& v = next ? batch[j]->next_state : batch[j]->state;
        m.col(static_cast<Eigen::Index>(j)) = ConstVectorMap(v.data(), dim);
    }
    return m;
}

} // namespace

Eigen::VectorXd dqn_td_targets(const std::vector<const Transition*>& batch, const ParamSet& target_params,
                               double gamma, double reward_scale)
{
    if (batch.empty()) throw DomainError("dqn_td_targets: empty batch");
    const Eigen::MatrixXd next_q = forward_batch(target_params, stack_states(batch, true));
    Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
    for (std::size_t j = 0; j < batch.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        const double r = reward_scale * batch[j]->reward;
        y(col) = batch[j]->done ? r : r + gamma * next_q.col(col).maxCoeff();
    }
    return y;
}

DqnAgent::DqnAgent(int obs_dim, int num_actions, DqnHyper hyper, std::uint64_t seed)
    : hyper_((hyper.validate(), std::move(hyper))),
      seed_(seed),
      rng_(seed),
      buffer_(hyper_.buffer_capacity)
{
    const MlpSpec spec = q_network_spec(obs_dim, num_actions, hyper_.hidden, hyper_.activation);
    online_ = ParamSet::glorot_uniform(spec, rng_);
    target_ = online_;
    adam_ = AdamState(online_.size(), AdamConfig{hyper_.learning_rate});
}

int DqnAgent::select_action(std::span<const double> obs, double epsilon)
{
    return dqn_select_action(online_, obs, epsilon, rng_);
}

int DqnAgent::greedy_action(std::span<const double> obs) const
{
    return argmax_lowest(q_values(obs));
}

std::vector<double> DqnAgent::q_values(std::span<const double> obs) const
{
    if (static_cast<int>(obs.size()) != online_.spec().input_size())
        throw ShapeError("observation length does not match the Q-network input");
    return forward(online_, obs);
}

UpdateResult DqnAgent::update()
{
    const auto batch_size = static_cast<std::size_t>(hyper_.batch_size);
    if (!buffer_.can_sample(std::max(batch_size, hyper_.warmup))) return {};

    const auto batch = buffer_.sample(batch_size, rng_);
    const Eigen::VectorXd y = dqn_td_targets(batch, target_, hyper_.gamma, hyper_.reward_scale);
    const ForwardCache cache = forward_cached(online_, stack_states(batch, false));

    const auto& q = cache.output();
    Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    double loss = 0.0;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (std::size_t j = 0; j < batch.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        const auto a = static_cast<Eigen::Index>(batch[j]->action);
        if (a < 0 || a >= q.rows()) throw DomainError("stored action index out of range");
        const double err = q(a, col) - y(col);
        loss += err * err * inv_b;
        upstream(a, col) = 2.0 * err * inv_b;
    }
    const auto grads = backward(online_, cache, upstream);
    adam_step(online_.values(), grads, adam_);
    ++gradient_steps_;
    if (gradient_steps_ % hyper_.target_update_interval == 0) target_ = online_;
    return {true, loss};
}

} // namespace nitrogym
