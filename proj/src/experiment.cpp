#include "nitrogym/experiment.hpp"

#include "nitrogym/errors.hpp"
#include "nitrogym/policies.hpp"
#include "nitrogym/report.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

namespace nitrogym {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Weather stream for one training episode; only matters in stochastic mode.
std::uint64_t episode_seed(std::uint64_t trial_seed, int episode)
{
    return splitmix64(splitmix64(trial_seed) ^ static_cast<std::uint64_t>(episode));
}

EpisodeSummary mean_summary(const std::vector<EpisodeSummary>& eps)
{
    EpisodeSummary m;
    const double n = static_cast<double>(eps.size());
    for (const auto& e : eps) {
        m.total_n += e.total_n / n;
        m.total_leach += e.total_leach / n;
        m.total_uptake += e.total_uptake / n;
        m.topwt += e.topwt / n;
        m.cumulative_reward += e.cumulative_reward / n;
    }
    m.days = eps.front().days;
    m.log = eps.front().log;
    return m;
}

Evaluation evaluate(std::string label, const ScenarioConfig& scenario, int n_episodes, std::uint64_t seed,
                    const std::function<Policy()>& make_policy)
{
    if (n_episodes < 1) throw ConfigError("evaluation needs at least one episode");
    NitrogenEnv env(scenario);
    Evaluation ev;
    ev.label = std::move(label);
    for (int i = 0; i < n_episodes; ++i)
        ev.episodes.push_back(run_episode(env, seed + static_cast<std::uint64_t>(i), make_policy(), true));
    ev.summary = mean_summary(ev.episodes);
    return ev;
}

EpisodeMetrics metrics_of(int episode, double epsilon, const EpisodeSummary& s)
{
    return {episode, epsilon, s.cumulative_reward, s.total_n, s.total_leach, s.topwt};
}

void finish_summary(EpisodeSummary& s, const StateVector& last)
{
    s.total_n = last.cumsumfert;
    s.total_leach = last.cleach;
    s.total_uptake = last.wtnup;
    s.topwt = last.topwt;
}

template <class Agent, class Act, class Store>
void train_loop(const ExperimentConfig& cfg, std::uint64_t seed, Agent& agent, int gradient_steps, Act act,
                Store store, TrialResult& out, const ProgressFn& progress, bool dqn)
{
    NitrogenEnv env(cfg.scenario);
    const ObservationMask mask = cfg.mask();
    for (int ep = 0; ep < cfg.episodes(); ++ep) {
        const double epsilon = dqn ? epsilon_schedule(ep, cfg.dqn.epsilon_decay) : 0.0;
        StateVector state = env.reset(episode_seed(seed, ep));
        std::vector<double> obs = observe_normalized(state, mask);
        EpisodeSummary s;
        while (!env.done()) {
            const auto [stored_action, amount] = act(obs, epsilon);
            const StepResult r = env.step(amount);
            if (!std::isfinite(r.reward)) throw NumericError("non-finite reward");
            std::vector<double> next = observe_normalized(r.next_state, mask);
            store(Transition{obs, stored_action, r.reward, next, r.done});
            for (int k = 0; k < gradient_steps; ++k) agent.update();
            s.cumulative_reward += r.reward;
            ++s.days;
            obs = std::move(next);
            state = r.next_state;
        }
        finish_summary(s, state);
        out.curve.push_back(metrics_of(ep, epsilon, s));
        if (progress) progress(seed, out.curve.back());
    }
}

} // namespace

EpisodeSummary run_episode(NitrogenEnv& env, std::uint64_t seed, const Policy& policy, bool keep_log)
{
    StateVector state = env.reset(seed);
    EpisodeSummary s;
    while (!env.done()) {
        const int doy = env.day_of_year();
        const double requested = policy(state);
        const StepResult r = env.step(requested);
        s.cumulative_reward += r.reward;
        ++s.days;
        state = r.next_state;
        if (keep_log) s.log.push_back({state.dap, doy, r.requested, r.applied, r.reward, r.reward_breakdown, state});
    }
    finish_summary(s, state);
    return s;
}

Evaluation evaluate_checkpoint(const PolicyCheckpoint& ckpt, const ScenarioConfig& scenario, int n_episodes,
                               std::uint64_t seed)
{
    const ObservationMask mask = observation_mask(ckpt.observation);
    if (static_cast<int>(mask.size()) != ckpt.input_size())
        throw ConfigError("checkpoint expects " + std::to_string(ckpt.input_size()) + " inputs but its observation '" +
                          ckpt.observation + "' has " + std::to_string(mask.size()));
    return evaluate(method_label(ckpt.kind), scenario, n_episodes, seed, [&] {
        return Policy([&ckpt, mask](const StateVector& s) { return greedy_amount(ckpt, observe_normalized(s, mask)); });
    });
}

Evaluation evaluate_baseline(double amount, const ScenarioConfig& scenario, int n_episodes, std::uint64_t seed)
{
    if (!(amount >= 0.0) || !std::isfinite(amount)) throw ConfigError("baseline amount must be finite and >= 0");
    return evaluate(baseline_label(amount), scenario, n_episodes, seed, [amount] {
        auto b = std::make_shared<Vstage5Baseline>(amount);
        return Policy([b](const StateVector& s) { return b->act(s); });
    });
}

std::string baseline_label(double amount)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "Baseline (%g)", amount);
    return buf;
}

std::string method_label(AgentKind kind)
{
    return kind == AgentKind::Dqn ? "DQN" : "SAC";
}

int convergence_episode(const std::vector<double>& rewards, int window, double tolerance)
{
    if (rewards.empty()) return -1;
    if (window < 1) throw DomainError("convergence window must be >= 1");
    const auto n = static_cast<int>(rewards.size());
    const int w = std::min(window, n);
    std::vector<double> trailing(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += rewards[static_cast<std::size_t>(i)];
        if (i >= w) sum -= rewards[static_cast<std::size_t>(i - w)];
        trailing[static_cast<std::size_t>(i)] = sum / std::min(i + 1, w);
    }
    const double final_mean = trailing.back();
    for (int i = w - 1; i < n; ++i)
        if (std::abs(trailing[static_cast<std::size_t>(i)] - final_mean) <= tolerance * std::abs(final_mean)) return i;
    return n - 1;
}

TrialResult train_trial(const ExperimentConfig& cfg, std::uint64_t seed, const ProgressFn& progress)
{
    cfg.validate();
    TrialResult out;
    out.seed = seed;
    const auto obs_dim = static_cast<int>(cfg.mask().size());
    try {
        if (cfg.agent == AgentKind::Dqn) {
            DqnAgent agent(obs_dim, kNumActions, cfg.dqn, seed);
            train_loop(
                cfg, seed, agent, cfg.dqn.gradient_steps_per_day,
                [&](const std::vector<double>& obs, double eps) {
                    const int a = agent.select_action(obs, eps);
                    return std::pair<double, double>{static_cast<double>(a), action_amount(a)};
                },
                [&](Transition t) { agent.remember(std::move(t)); }, out, progress, true);
            if (!agent.online().all_finite()) throw NumericError("non-finite network parameters");
            out.checkpoint = make_checkpoint(agent, cfg.observation, cfg.episodes());
        } else {
            SacAgent agent(obs_dim, cfg.sac, seed);
            train_loop(
                cfg, seed, agent, cfg.sac.gradient_steps_per_day,
                [&](const std::vector<double>& obs, double) {
                    const SacSample s = agent.sample_action(obs);
                    if (!std::isfinite(s.action)) throw NumericError("non-finite policy sample");
                    return std::pair<double, double>{s.action, discretize_action(s.action)};
                },
                [&](Transition t) { agent.remember(std::move(t)); }, out, progress, false);
            if (!agent.actor().all_finite()) throw NumericError("non-finite network parameters");
            out.checkpoint = make_checkpoint(agent, cfg.observation, cfg.episodes());
        }
    } catch (const NumericError& e) {
        out.failed = true;
        out.error = e.what();
        return out;
    }
    out.checkpoint->metadata["scenario"] = to_string(cfg.scenario.location);
    out.checkpoint->metadata["config_hash"] = config_hash(cfg);
    std::vector<double> rewards;
    for (const auto& m : out.curve) rewards.push_back(m.cumulative_reward);
    out.convergence_episode = convergence_episode(rewards);
    out.final_eval = evaluate_checkpoint(*out.checkpoint, cfg.scenario, cfg.eval_episodes);
    return out;
}

std::optional<EpisodeSummary> RunReport::agent_aggregate() const
{
    std::vector<EpisodeSummary> ok;
    for (const auto& t : trials)
        if (!t.failed && t.final_eval) ok.push_back(t.final_eval->summary);
    if (ok.empty()) return std::nullopt;
    EpisodeSummary m = mean_summary(ok);
    m.log.clear();
    return m;
}

const Evaluation* RunReport::best_baseline() const
{
    const Evaluation* best = nullptr;
    for (const auto& b : baselines)
        if (!best || b.summary.cumulative_reward > best->summary.cumulative_reward) best = &b;
    return best;
}

namespace {

std::vector<TrialResult> train_all(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                   const ProgressFn& progress)
{
    std::vector<TrialResult> results(seeds.size());
    std::mutex progress_mutex;
    ProgressFn guarded;
    if (progress)
        guarded = [&](std::uint64_t s, const EpisodeMetrics& m) {
            std::lock_guard lock(progress_mutex);
            progress(s, m);
        };
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
                results[i] = train_trial(cfg, seeds[i], guarded);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), seeds.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

} // namespace

RunReport run_training(const ExperimentConfig& cfg, const ProgressFn& progress, bool write)
{
    cfg.validate();
    RunReport report;
    report.config = cfg;
    report.method = method_label(cfg.agent);
    report.trials = train_all(cfg, cfg.seeds, progress);
    for (double amount : cfg.baseline_grid)
        report.baselines.push_back(evaluate_baseline(amount, cfg.scenario, cfg.eval_episodes));
    if (write) {
        try {
            emit_report(report, cfg.output_dir);
        } catch (const IoError&) {
            try {
                write_text_file(std::filesystem::path(cfg.output_dir) / "manifest.json",
                                manifest_json(report, "aborted", {}).dump(2) + "\n");
            } catch (const IoError&) {
            }
            throw;
        }
    }
    return report;
}

std::string to_string(AblationAxis a)
{
    return a == AblationAxis::Observation ? "observation" : "frequency";
}

AblationAxis ablation_axis_from_string(const std::string& s)
{
    if (s == "observation") return AblationAxis::Observation;
    if (s == "frequency") return AblationAxis::Frequency;
    throw ConfigError("unknown ablation axis '" + s + "' (expected observation or frequency)");
}

double percent_delta(double reference, double variant)
{
    if (reference == 0.0) return variant == 0.0 ? 0.0 : std::copysign(INFINITY, variant);
    return 100.0 * (variant - reference) / std::abs(reference);
}

namespace {

AblationCondition run_condition(const ExperimentConfig& base, AblationAxis axis, const std::string& value,
                                const ProgressFn& progress)
{
    AblationCondition c;
    c.config = base;
    if (axis == AblationAxis::Observation) {
        c.config.observation = value;
        c.label = "observation=" + value;
    } else {
        std::size_t pos = 0;
        int f = 0;
        try {
            f = std::stoi(value, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != value.size() || value.empty()) throw ConfigError("action frequency must be an integer: " + value);
        c.config.scenario.action_frequency = f;
        c.label = "frequency=" + value;
    }
    c.config.seeds = base.ablation_seeds;
    c.config.validate();
    c.trials = train_all(c.config, c.config.seeds, progress);
    int ok = 0;
    for (const auto& t : c.trials) {
        if (t.failed || !t.final_eval) continue;
        c.mean_reward += t.final_eval->summary.cumulative_reward;
        c.mean_topwt += t.final_eval->summary.topwt;
        ++ok;
    }
    if (ok == 0) throw NumericError("every trial of ablation condition '" + c.label + "' failed");
    c.mean_reward /= ok;
    c.mean_topwt /= ok;
    return c;
}

} // namespace

AblationReport run_ablation(const ExperimentConfig& cfg, AblationAxis axis, const std::string& reference,
                            const std::string& variant, const ProgressFn& progress, bool write)
{
    cfg.validate();
    const bool obs = axis == AblationAxis::Observation;
    AblationReport r;
    r.axis = axis;
    r.seeds = cfg.ablation_seeds;
    r.reference = run_condition(cfg, axis, reference.empty() ? (obs ? "full" : "1") : reference, progress);
    r.variant = run_condition(cfg, axis, variant.empty() ? (obs ? "partial" : "10") : variant, progress);
    r.reward_delta_pct = percent_delta(r.reference.mean_reward, r.variant.mean_reward);
    r.topwt_delta_pct = percent_delta(r.reference.mean_topwt, r.variant.mean_topwt);
    if (write) emit_ablation_report(r, cfg.output_dir);
    return r;
}

} // namespace nitrogym
