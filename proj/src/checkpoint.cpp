#include "nitrogym/checkpoint.hpp"

#include "nitrogym/errors.hpp"
#include "nitrogym/policies.hpp"

#include <fstream>

namespace nitrogym {

using nlohmann::json;

std::string to_string(AgentKind k)
{
    return k == AgentKind::Dqn ? "dqn" : "sac";
}

AgentKind agent_kind_from_string(const std::string& s)
{
    if (s == "dqn") return AgentKind::Dqn;
    if (s == "sac") return AgentKind::Sac;
    throw ConfigError("unknown agent kind '" + s + "' (expected dqn or sac)");
}

int PolicyCheckpoint::input_size() const
{
    const char* key = kind == AgentKind::Dqn ? "online" : "actor";
    const auto it = networks.find(key);
    if (it == networks.end()) throw ConfigError(std::string("checkpoint lacks the '") + key + "' network");
    return it->second.spec().input_size();
}

PolicyCheckpoint make_checkpoint(const DqnAgent& agent, const std::string& observation, int episodes)
{
    PolicyCheckpoint c;
    c.kind = AgentKind::Dqn;
    c.observation = observation;
    c.seed = agent.seed();
    c.episodes = episodes;
    c.gradient_steps = agent.gradient_steps();
    c.dqn = agent.hyper();
    c.networks["online"] = agent.online();
    c.networks["target"] = agent.target();
    c.optimizers["online"] = agent.optimizer();
    return c;
}

PolicyCheckpoint make_checkpoint(const SacAgent& agent, const std::string& observation, int episodes)
{
    PolicyCheckpoint c;
    c.kind = AgentKind::Sac;
    c.observation = observation;
    c.seed = agent.seed();
    c.episodes = episodes;
    c.gradient_steps = agent.gradient_steps();
    c.sac = agent.hyper();
    c.networks["actor"] = agent.actor();
    c.optimizers["actor"] = agent.actor_optimizer();
    for (int i = 0; i < 2; ++i) {
        c.networks["critic" + std::to_string(i)] = agent.critic(i);
        c.networks["target" + std::to_string(i)] = agent.target_critic(i);
        c.optimizers["critic" + std::to_string(i)] = agent.critic_optimizer(i);
    }
    c.optimizers["alpha"] = agent.alpha_optimizer();
    c.log_alpha = agent.log_alpha();
    return c;
}

namespace {

const ParamSet& network(const PolicyCheckpoint& c, const std::string& key)
{
    const auto it = c.networks.find(key);
    if (it == c.networks.end()) throw ConfigError("checkpoint lacks the '" + key + "' network");
    return it->second;
}

void assign(ParamSet& dst, const ParamSet& src, const std::string& key)
{
    if (!(dst.spec() == src.spec())) throw ConfigError("checkpoint network '" + key + "' does not match the hyperparameters");
    dst = src;
}

void assign(AdamState& dst, const PolicyCheckpoint& c, const std::string& key)
{
    const auto it = c.optimizers.find(key);
    if (it == c.optimizers.end()) return;
    if (it->second.m.size() != dst.m.size()) throw ConfigError("checkpoint optimizer '" + key + "' has the wrong size");
    dst = it->second;
}

} // namespace

DqnAgent restore_dqn(const PolicyCheckpoint& c)
{
    if (c.kind != AgentKind::Dqn) throw ConfigError("checkpoint does not hold a dqn agent");
    const ParamSet& online = network(c, "online");
    DqnAgent agent(online.spec().input_size(), online.spec().output_size(), c.dqn, c.seed);
    assign(agent.online(), online, "online");
    assign(agent.target(), network(c, "target"), "target");
    assign(agent.optimizer(), c, "online");
    agent.set_gradient_steps(c.gradient_steps);
    return agent;
}

SacAgent restore_sac(const PolicyCheckpoint& c)
{
    if (c.kind != AgentKind::Sac) throw ConfigError("checkpoint does not hold a sac agent");
    const ParamSet& actor = network(c, "actor");
    SacAgent agent(actor.spec().input_size(), c.sac, c.seed);
    assign(agent.actor(), actor, "actor");
    assign(agent.actor_optimizer(), c, "actor");
    for (int i = 0; i < 2; ++i) {
        const std::string idx = std::to_string(i);
        assign(agent.critic(i), network(c, "critic" + idx), "critic" + idx);
        assign(agent.target_critic(i), network(c, "target" + idx), "target" + idx);
        assign(agent.critic_optimizer(i), c, "critic" + idx);
    }
    assign(agent.alpha_optimizer(), c, "alpha");
    agent.set_log_alpha(c.log_alpha);
    agent.set_gradient_steps(c.gradient_steps);
    return agent;
}

double greedy_amount(const PolicyCheckpoint& c, std::span<const double> obs)
{
    if (static_cast<int>(obs.size()) != c.input_size())
        throw ShapeError("observation length does not match the checkpoint network");
    if (c.kind == AgentKind::Dqn) return action_amount(argmax_lowest(forward(network(c, "online"), obs)));
    const auto out = forward(network(c, "actor"), obs);
    const double y = std::tanh(out[0]);
    return discretize_action(c.sac.action_low + 0.5 * (y + 1.0) * (c.sac.action_high - c.sac.action_low));
}

json param_set_to_json(const ParamSet& p)
{
    return json{{"layer_sizes", p.spec().layer_sizes},
                {"hidden_activation", to_string(p.spec().hidden)},
                {"output_activation", to_string(p.spec().output)},
                {"values", std::vector<double>(p.values().begin(), p.values().end())}};
}

ParamSet param_set_from_json(const json& j)
{
    MlpSpec spec;
    spec.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    spec.hidden = activation_from_string(j.at("hidden_activation").get<std::string>());
    spec.output = activation_from_string(j.at("output_activation").get<std::string>());
    return ParamSet(spec, j.at("values").get<std::vector<double>>());
}

namespace {

json adam_to_json(const AdamState& s)
{
    return json{{"learning_rate", s.config.learning_rate},
                {"beta1", s.config.beta1},
                {"beta2", s.config.beta2},
                {"epsilon", s.config.epsilon},
                {"step", s.step},
                {"m", s.m},
                {"v", s.v}};
}

AdamState adam_from_json(const json& j)
{
    AdamState s;
    s.config.learning_rate = j.at("learning_rate").get<double>();
    s.config.beta1 = j.at("beta1").get<double>();
    s.config.beta2 = j.at("beta2").get<double>();
    s.config.epsilon = j.at("epsilon").get<double>();
    s.step = j.at("step").get<std::int64_t>();
    s.m = j.at("m").get<std::vector<double>>();
    s.v = j.at("v").get<std::vector<double>>();
    if (s.m.size() != s.v.size() || s.step < 0) throw ConfigError("malformed optimizer state in checkpoint");
    return s;
}

json dqn_hyper_to_json(const DqnHyper& h)
{
    return json{{"gamma", h.gamma},
                {"batch_size", h.batch_size},
                {"learning_rate", h.learning_rate},
                {"episodes", h.episodes},
                {"epsilon_decay", h.epsilon_decay},
                {"buffer_capacity", h.buffer_capacity},
                {"target_update_interval", h.target_update_interval},
                {"gradient_steps_per_day", h.gradient_steps_per_day},
                {"warmup", h.warmup},
                {"hidden", h.hidden},
                {"activation", to_string(h.activation)},
                {"reward_scale", h.reward_scale}};
}

DqnHyper dqn_hyper_from_json(const json& j)
{
    DqnHyper h;
    h.gamma = j.at("gamma").get<double>();
    h.batch_size = j.at("batch_size").get<int>();
    h.learning_rate = j.at("learning_rate").get<double>();
    h.episodes = j.at("episodes").get<int>();
    h.epsilon_decay = j.at("epsilon_decay").get<double>();
    h.buffer_capacity = j.at("buffer_capacity").get<std::size_t>();
    h.target_update_interval = j.at("target_update_interval").get<int>();
    h.gradient_steps_per_day = j.at("gradient_steps_per_day").get<int>();
    h.warmup = j.at("warmup").get<std::size_t>();
    h.hidden = j.at("hidden").get<std::vector<int>>();
    h.activation = activation_from_string(j.at("activation").get<std::string>());
    h.reward_scale = j.at("reward_scale").get<double>();
    return h;
}

json sac_hyper_to_json(const SacHyper& h)
{
    return json{{"gamma", h.gamma},
                {"tau", h.tau},
                {"initial_alpha", h.initial_alpha},
                {"auto_alpha", h.auto_alpha},
                {"target_entropy", h.target_entropy},
                {"action_low", h.action_low},
                {"action_high", h.action_high},
                {"batch_size", h.batch_size},
                {"learning_rate", h.learning_rate},
                {"alpha_learning_rate", h.alpha_learning_rate},
                {"episodes", h.episodes},
                {"buffer_capacity", h.buffer_capacity},
                {"gradient_steps_per_day", h.gradient_steps_per_day},
                {"warmup", h.warmup},
                {"hidden", h.hidden},
                {"activation", to_string(h.activation)},
                {"reward_scale", h.reward_scale}};
}

SacHyper sac_hyper_from_json(const json& j)
{
    SacHyper h;
    h.gamma = j.at("gamma").get<double>();
    h.tau = j.at("tau").get<double>();
    h.initial_alpha = j.at("initial_alpha").get<double>();
    h.auto_alpha = j.at("auto_alpha").get<bool>();
    h.target_entropy = j.at("target_entropy").get<double>();
    h.action_low = j.at("action_low").get<double>();
    h.action_high = j.at("action_high").get<double>();
    h.batch_size = j.at("batch_size").get<int>();
    h.learning_rate = j.at("learning_rate").get<double>();
    h.alpha_learning_rate = j.at("alpha_learning_rate").get<double>();
    h.episodes = j.at("episodes").get<int>();
    h.buffer_capacity = j.at("buffer_capacity").get<std::size_t>();
    h.gradient_steps_per_day = j.at("gradient_steps_per_day").get<int>();
    h.warmup = j.at("warmup").get<std::size_t>();
    h.hidden = j.at("hidden").get<std::vector<int>>();
    h.activation = activation_from_string(j.at("activation").get<std::string>());
    h.reward_scale = j.at("reward_scale").get<double>();
    return h;
}

} // namespace

json checkpoint_to_json(const PolicyCheckpoint& c)
{
    json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    j["agent"] = to_string(c.kind);
    j["observation"] = c.observation;
    j["seed"] = c.seed;
    j["episodes"] = c.episodes;
    j["gradient_steps"] = c.gradient_steps;
    j["metadata"] = c.metadata;
    j["hyper"] = c.kind == AgentKind::Dqn ? dqn_hyper_to_json(c.dqn) : sac_hyper_to_json(c.sac);
    json nets = json::object();
    for (const auto& [k, p] : c.networks) nets[k] = param_set_to_json(p);
    j["networks"] = std::move(nets);
    json opts = json::object();
    for (const auto& [k, s] : c.optimizers) opts[k] = adam_to_json(s);
    j["optimizers"] = std::move(opts);
    if (c.kind == AgentKind::Sac) j["log_alpha"] = c.log_alpha;
    return j;
}

PolicyCheckpoint checkpoint_from_json(const json& j)
{
    try {
        if (j.at("format").get<std::string>() != kCheckpointFormat) throw ConfigError("not a nitrogym checkpoint");
        const int version = j.at("version").get<int>();
        if (version != kCheckpointVersion)
            throw ConfigError("unsupported checkpoint version " + std::to_string(version));
        PolicyCheckpoint c;
        c.kind = agent_kind_from_string(j.at("agent").get<std::string>());
        c.observation = j.at("observation").get<std::string>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.episodes = j.at("episodes").get<int>();
        c.gradient_steps = j.at("gradient_steps").get<std::int64_t>();
        c.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
        if (c.kind == AgentKind::Dqn) c.dqn = dqn_hyper_from_json(j.at("hyper"));
        else c.sac = sac_hyper_from_json(j.at("hyper"));
        for (const auto& [k, v] : j.at("networks").items()) c.networks.emplace(k, param_set_from_json(v));
        for (const auto& [k, v] : j.at("optimizers").items()) c.optimizers.emplace(k, adam_from_json(v));
        if (c.kind == AgentKind::Sac) c.log_alpha = j.at("log_alpha").get<double>();
        for (const auto& [k, p] : c.networks)
            if (!p.all_finite()) throw ConfigError("checkpoint network '" + k + "' holds non-finite values");
        (void)c.input_size();
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed checkpoint: ") + e.what());
    } catch (const ShapeError& e) {
        throw ConfigError(std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const PolicyCheckpoint& c, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << checkpoint_to_json(c).dump(1) << '\n';
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

PolicyCheckpoint load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open checkpoint '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("checkpoint '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return checkpoint_from_json(j);
}

} // namespace nitrogym
