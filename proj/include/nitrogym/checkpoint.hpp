#pragma once

#include "nitrogym/dqn.hpp"
#include "nitrogym/mlp.hpp"
#include "nitrogym/sac.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>

namespace nitrogym {

inline constexpr const char* kCheckpointFormat = "nitrogym-checkpoint";
inline constexpr int kCheckpointVersion = 1;

enum class AgentKind { Dqn, Sac };

std::string to_string(AgentKind k);
AgentKind agent_kind_from_string(const std::string& s);

// Serialized policy plus everything needed to resume or reproduce it.
struct PolicyCheckpoint {
    AgentKind kind = AgentKind::Dqn;
    std::string observation; // mask kind or comma-separated field list
    std::uint64_t seed = 0;
    int episodes = 0;
    std::int64_t gradient_steps = 0;
    std::map<std::string, std::string> metadata; // scenario, config hash, ...

    DqnHyper dqn;
    SacHyper sac;
    // DQN: "online", "target". SAC: "actor", "critic0", "critic1", "target0", "target1".
    std::map<std::string, ParamSet> networks;
    std::map<std::string, AdamState> optimizers;
    double log_alpha = 0.0;

    int input_size() const;
};

PolicyCheckpoint make_checkpoint(const DqnAgent& agent, const std::string& observation, int episodes);
PolicyCheckpoint make_checkpoint(const SacAgent& agent, const std::string& observation, int episodes);

// Restores an agent's networks and optimizers. The replay buffer is not
// persisted. Throws ConfigError on a kind or shape mismatch.
DqnAgent restore_dqn(const PolicyCheckpoint& ckpt);
SacAgent restore_sac(const PolicyCheckpoint& ckpt);

// Exploration-free action in kg/ha: DQN argmax or the SAC mean action mapped
// through discretize_action.
double greedy_amount(const PolicyCheckpoint& ckpt, std::span<const double> obs);

nlohmann::json param_set_to_json(const ParamSet& p);
ParamSet param_set_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const PolicyCheckpoint& c);
PolicyCheckpoint checkpoint_from_json(const nlohmann::json& j); // throws ConfigError

void save_checkpoint(const PolicyCheckpoint& c, const std::filesystem::path& path);
PolicyCheckpoint load_checkpoint(const std::filesystem::path& path);

} // namespace nitrogym
