#include "nitrogym/sac.hpp"

#include "nitrogym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nitrogym {

namespace {

constexpr double kSquashEps = 1e-6;

double gaussian_log_prob_standard(double xi, double log_std)
{
    return -0.5 * xi * xi - log_std - 0.5 * std::log(2.0 * std::numbers::pi);
}

MlpSpec make_spec(int in, int out, const SacHyper& h)
{
    return q_network_spec(in, out, h.hidden, h.activation);
}

} // namespace

void SacHyper::validate() const
{
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("sac gamma must lie in (0,1]");
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("sac tau must lie in (0,1]");
    if (!(initial_alpha >= 0.0)) throw ConfigError("sac alpha must be >= 0");
    if (auto_alpha && !(initial_alpha > 0.0)) throw ConfigError("auto-tuned alpha must start > 0");
    if (!(action_high > action_low)) throw ConfigError("sac action bounds must satisfy low < high");
    if (batch_size < 1) throw ConfigError("sac batch size must be >= 1");
    if (!(learning_rate > 0.0) || !(alpha_learning_rate > 0.0)) throw ConfigError("sac learning rates must be > 0");
    if (episodes < 1) throw ConfigError("sac episodes must be >= 1");
    if (buffer_capacity < static_cast<std::size_t>(batch_size)) throw ConfigError("replay capacity below batch size");
    if (gradient_steps_per_day < 0) throw ConfigError("gradient steps per day must be >= 0");
    if (!(reward_scale > 0.0)) throw ConfigError("reward scale must be > 0");
}

SacAgent::SacAgent(int obs_dim, SacHyper hyper, std::uint64_t seed)
    : hyper_((hyper.validate(), std::move(hyper))),
      seed_(seed),
      rng_(seed),
      log_alpha_(hyper_.initial_alpha > 0.0 ? std::log(hyper_.initial_alpha) : -std::numeric_limits<double>::infinity()),
      buffer_(hyper_.buffer_capacity)
{
    actor_ = ParamSet::glorot_uniform(make_spec(obs_dim, 2, hyper_), rng_);
    for (int i = 0; i < 2; ++i) {
        critics_[i] = ParamSet::glorot_uniform(make_spec(obs_dim + 1, 1, hyper_), rng_);
        targets_[i] = critics_[i];
        critic_opt_[i] = AdamState(critics_[i].size(), AdamConfig{hyper_.learning_rate});
    }
    actor_opt_ = AdamState(actor_.size(), AdamConfig{hyper_.learning_rate});
    alpha_opt_ = AdamState(1, AdamConfig{hyper_.alpha_learning_rate});
}

double SacAgent::alpha() const
{
    return std::exp(log_alpha_);
}

double SacAgent::to_squashed(double action) const
{
    const double y = 2.0 * (action - hyper_.action_low) / (hyper_.action_high - hyper_.action_low) - 1.0;
    return std::clamp(y, -1.0, 1.0);
}

double SacAgent::to_action(double squashed) const
{
    return hyper_.action_low + 0.5 * (squashed + 1.0) * (hyper_.action_high - hyper_.action_low);
}

std::pair<double, double> SacAgent::actor_outputs(std::span<const double> obs) const
{
    const auto out = forward(actor_, obs);
    return {out[0], std::clamp(out[1], kLogStdMin, kLogStdMax)};
}

SacSample SacAgent::sample_action(std::span<const double> obs)
{
    const auto [mu, log_std] = actor_outputs(obs);
    const double xi = std::normal_distribution<double>(0.0, 1.0)(rng_);
    const double u = mu + std::exp(log_std) * xi;
    SacSample s;
    s.squashed = std::tanh(u);
    s.action = to_action(s.squashed);
    s.log_prob = gaussian_log_prob_standard(xi, log_std) - std::log(1.0 - s.squashed * s.squashed + kSquashEps);
    return s;
}

double SacAgent::mean_action(std::span<const double> obs) const
{
    return to_action(std::tanh(actor_outputs(obs).first));
}

UpdateResult SacAgent::update()
{
    const auto batch_size = static_cast<std::size_t>(hyper_.batch_size);
    if (!buffer_.can_sample(std::max(batch_size, hyper_.warmup))) return {};
    const auto batch = buffer_.sample(batch_size, rng_);
    const auto B = static_cast<Eigen::Index>(batch.size());
    const auto dim = static_cast<Eigen::Index>(batch.front()->state.size());
    const double inv_b = 1.0 / static_cast<double>(B);
    const double alpha = std::exp(log_alpha_);
    std::normal_distribution<double> normal(0.0, 1.0);

    Eigen::MatrixXd s(dim, B), s_next(dim, B);
    for (Eigen::Index j = 0; j < B; ++j) {
        s.col(j) = ConstVectorMap(batch[j]->state.data(), dim);
        s_next.col(j) = ConstVectorMap(batch[j]->next_state.data(), dim);
    }

    // Soft Bellman targets from the next-state policy sample.
    const Eigen::MatrixXd next_policy = forward_batch(actor_, s_next);
    Eigen::MatrixXd next_sa(dim + 1, B);
    next_sa.topRows(dim) = s_next;
    Eigen::VectorXd next_logp(B);
    for (Eigen::Index j = 0; j < B; ++j) {
        const double log_std = std::clamp(next_policy(1, j), kLogStdMin, kLogStdMax);
        const double xi = normal(rng_);
        const double y = std::tanh(next_policy(0, j) + std::exp(log_std) * xi);
        next_sa(dim, j) = y;
        next_logp(j) = gaussian_log_prob_standard(xi, log_std) - std::log(1.0 - y * y + kSquashEps);
    }
    const Eigen::MatrixXd tq0 = forward_batch(targets_[0], next_sa);
    const Eigen::MatrixXd tq1 = forward_batch(targets_[1], next_sa);
    Eigen::VectorXd target(B);
    for (Eigen::Index j = 0; j < B; ++j) {
        const double r = hyper_.reward_scale * batch[j]->reward;
        const double soft_v = std::min(tq0(0, j), tq1(0, j)) - alpha * next_logp(j);
        target(j) = batch[j]->done ? r : r + hyper_.gamma * soft_v;
    }

    // Critics regress on the stored continuous action.
    Eigen::MatrixXd sa(dim + 1, B);
    sa.topRows(dim) = s;
    for (Eigen::Index j = 0; j < B; ++j) sa(dim, j) = to_squashed(batch[j]->action);
    double loss = 0.0;
    for (int i = 0; i < 2; ++i) {
        const ForwardCache cache = forward_cached(critics_[i], sa);
        Eigen::MatrixXd upstream(1, B);
        for (Eigen::Index j = 0; j < B; ++j) {
            const double err = cache.output()(0, j) - target(j);
            loss += err * err * inv_b;
            upstream(0, j) = 2.0 * err * inv_b;
        }
        adam_step(critics_[i].values(), backward(critics_[i], cache, upstream), critic_opt_[i]);
    }

    // Actor: reparameterized gradient of alpha * log pi - min_i Q_i.
    const ForwardCache actor_cache = forward_cached(actor_, s);
    const auto& policy = actor_cache.output();
    Eigen::MatrixXd pi_sa(dim + 1, B);
    pi_sa.topRows(dim) = s;
    Eigen::VectorXd xi(B), ys(B), logp(B), stds(B);
    for (Eigen::Index j = 0; j < B; ++j) {
        const double log_std = std::clamp(policy(1, j), kLogStdMin, kLogStdMax);
        xi(j) = normal(rng_);
        stds(j) = std::exp(log_std);
        ys(j) = std::tanh(policy(0, j) + stds(j) * xi(j));
        pi_sa(dim, j) = ys(j);
        logp(j) = gaussian_log_prob_standard(xi(j), log_std) - std::log(1.0 - ys(j) * ys(j) + kSquashEps);
    }
    std::array<ForwardCache, 2> qc = {forward_cached(critics_[0], pi_sa), forward_cached(critics_[1], pi_sa)};
    Eigen::MatrixXd dq_dy = Eigen::MatrixXd::Zero(1, B);
    for (int i = 0; i < 2; ++i) {
        Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(1, B);
        for (Eigen::Index j = 0; j < B; ++j) {
            const bool is_min = i == 0 ? qc[0].output()(0, j) <= qc[1].output()(0, j)
                                       : qc[1].output()(0, j) < qc[0].output()(0, j);
            if (is_min) upstream(0, j) = 1.0;
        }
        Eigen::MatrixXd input_grad;
        (void)backward(critics_[i], qc[i], upstream, &input_grad);
        dq_dy += input_grad.row(dim);
    }
    Eigen::MatrixXd actor_upstream(2, B);
    for (Eigen::Index j = 0; j < B; ++j) {
        const double y = ys(j);
        const double one_minus_y2 = 1.0 - y * y;
        const double dlogp_du = 2.0 * y * one_minus_y2 / (one_minus_y2 + kSquashEps);
        const double dl_du = alpha * dlogp_du - dq_dy(0, j) * one_minus_y2;
        actor_upstream(0, j) = dl_du * inv_b;
        const bool clamped = policy(1, j) < kLogStdMin || policy(1, j) > kLogStdMax;
        actor_upstream(1, j) = clamped ? 0.0 : (-alpha + dl_du * stds(j) * xi(j)) * inv_b;
    }
    adam_step(actor_.values(), backward(actor_, actor_cache, actor_upstream), actor_opt_);

    if (hyper_.auto_alpha) {
        const double grad = -(logp.array() + hyper_.target_entropy).mean();
        double la[1] = {log_alpha_};
        const double g[1] = {grad};
        adam_step(la, g, alpha_opt_);
        log_alpha_ = la[0];
    }

    for (int i = 0; i < 2; ++i) polyak_update(targets_[i], critics_[i], hyper_.tau);
    ++gradient_steps_;
    return {true, 0.5 * loss};
}

} // namespace nitrogym
