#pragma once

#include "nitrogym/checkpoint.hpp"
#include "nitrogym/dqn.hpp"
#include "nitrogym/sac.hpp"
#include "nitrogym/scenario.hpp"
#include "nitrogym/state.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace nitrogym {

struct ExperimentConfig {
    ScenarioConfig scenario = ScenarioConfig::iowa();
    AgentKind agent = AgentKind::Dqn;
    DqnHyper dqn;
    SacHyper sac;
    std::string observation = "full";               // full | partial | comma-separated field names
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::vector<std::uint64_t> ablation_seeds = {1, 2, 3};
    std::vector<double> baseline_grid = {0, 40, 80, 120, 160, 200, 240, 280, 320};
    std::string output_dir = "runs/default";
    int workers = 1;       // concurrent trials
    int eval_episodes = 1; // greedy evaluation episodes per trial
    bool checkpoints = true;

    int trials() const { return static_cast<int>(seeds.size()); }
    int episodes() const { return agent == AgentKind::Dqn ? dqn.episodes : sac.episodes; }
    ObservationMask mask() const;
    void validate() const; // throws ConfigError
};

// Mask for an observation setting: full, partial or comma-separated field
// names. Throws ConfigError.
ObservationMask observation_mask(const std::string& observation);

// Every recognized key with its current value, in a fixed order. Doubles are
// printed with round-trip precision.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg);
std::vector<std::string> config_keys();

// Applies key=value pairs. `scenario.location` is applied first and resets
// the scenario and location-dependent agent defaults; later duplicates win.
// Throws ConfigError on unknown keys or unparsable values.
void apply_settings(ExperimentConfig& cfg, const std::vector<std::pair<std::string, std::string>>& settings);

// "key=value" -> pair; throws ConfigError.
std::pair<std::string, std::string> parse_setting(const std::string& assignment);

// INI text with [scenario], [crop], [soil], [reward], [agent] and [run]
// sections; keys are addressed as section.key.
std::vector<std::pair<std::string, std::string>> parse_ini(const std::string& text);

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides = {});
ExperimentConfig experiment_config_from_ini(const std::string& text, const std::vector<std::string>& overrides = {});

// Canonical key=value dump of the resolved config.
std::string canonical_config(const ExperimentConfig& cfg);
std::uint64_t fnv1a64(std::string_view data);
// FNV-1a of the canonical dump without run.output_dir and run.workers, which
// do not affect results.
std::string config_hash(const ExperimentConfig& cfg);

} // namespace nitrogym
