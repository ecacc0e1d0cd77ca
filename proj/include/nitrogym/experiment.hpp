#pragma once

#include "nitrogym/checkpoint.hpp"
#include "nitrogym/config.hpp"
#include "nitrogym/environment.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nitrogym {

struct DayRecord {
    int dap = 0;
    int doy = 0;
    double requested = 0.0;
    double applied = 0.0;
    double reward = 0.0;
    RewardBreakdown breakdown;
    StateVector state;
};

struct EpisodeSummary {
    double total_n = 0.0;      // kg/ha applied
    double total_leach = 0.0;  // kg/ha
    double total_uptake = 0.0; // kg/ha
    double topwt = 0.0;        // kg/ha on the final day
    double cumulative_reward = 0.0;
    int days = 0;
    std::vector<DayRecord> log; // empty when not kept
};

// Requested amount in kg/ha for the upcoming day given the current state.
using Policy = std::function<double(const StateVector&)>;

// Resets `env` with `seed` and runs one full episode.
EpisodeSummary run_episode(NitrogenEnv& env, std::uint64_t seed, const Policy& policy, bool keep_log = true);

struct Evaluation {
    std::string label;                   // "DQN", "Baseline (240)", ...
    EpisodeSummary summary;              // scalar fields averaged over episodes; log of the first episode
    std::vector<EpisodeSummary> episodes;
};

// Greedy rollouts of a checkpoint. Episode i resets the environment with
// seed + i. Throws ConfigError when the checkpoint input size does not match
// its observation mask.
Evaluation evaluate_checkpoint(const PolicyCheckpoint& ckpt, const ScenarioConfig& scenario, int n_episodes,
                               std::uint64_t seed = 0);

// Single application of `amount` on the first day with vstage >= 5.
Evaluation evaluate_baseline(double amount, const ScenarioConfig& scenario, int n_episodes, std::uint64_t seed = 0);

std::string baseline_label(double amount);

struct EpisodeMetrics {
    int episode = 0;
    double epsilon = 0.0; // exploration rate used (0 for sac)
    double cumulative_reward = 0.0;
    double total_n = 0.0;
    double total_leach = 0.0;
    double topwt = 0.0;
};

struct TrialResult {
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    std::vector<EpisodeMetrics> curve;
    int convergence_episode = -1;
    std::optional<PolicyCheckpoint> checkpoint;
    std::optional<Evaluation> final_eval;
};

// First episode whose trailing-window mean reward is within `tolerance`
// (relative) of the final trailing-window mean. -1 for an empty curve.
int convergence_episode(const std::vector<double>& rewards, int window = 50, double tolerance = 0.01);

using ProgressFn = std::function<void(std::uint64_t seed, const EpisodeMetrics&)>;

// Trains one agent from scratch. Non-finite values during training mark the
// trial failed instead of throwing.
TrialResult train_trial(const ExperimentConfig& cfg, std::uint64_t seed, const ProgressFn& progress = {});

struct RunReport {
    ExperimentConfig config;
    std::string method; // table label of the trained agent
    std::vector<TrialResult> trials;
    std::vector<Evaluation> baselines;

    // Mean over non-failed trials of their final evaluations.
    std::optional<EpisodeSummary> agent_aggregate() const;
    // Baseline with the highest cumulative reward (first on ties).
    const Evaluation* best_baseline() const;
};

std::string method_label(AgentKind kind);

// One trial per seed (cfg.workers at a time), then the baseline grid, then
// emit_report into cfg.output_dir. An I/O failure writes a manifest marked
// aborted before rethrowing.
RunReport run_training(const ExperimentConfig& cfg, const ProgressFn& progress = {}, bool write = true);

enum class AblationAxis { Observation, Frequency };

std::string to_string(AblationAxis a);
AblationAxis ablation_axis_from_string(const std::string& s);

struct AblationCondition {
    std::string label;
    ExperimentConfig config;
    std::vector<TrialResult> trials;
    double mean_reward = 0.0;
    double mean_topwt = 0.0;
};

struct AblationReport {
    AblationAxis axis = AblationAxis::Observation;
    std::vector<std::uint64_t> seeds;
    AblationCondition reference;
    AblationCondition variant;
    // 100 * (variant - reference) / |reference| of the seed-averaged values.
    double reward_delta_pct = 0.0;
    double topwt_delta_pct = 0.0;
};

// Trains both conditions on cfg.ablation_seeds. `reference`/`variant` are
// mask kinds (observation axis) or action frequencies (frequency axis); the
// defaults are full vs partial and 1 vs 10.
AblationReport run_ablation(const ExperimentConfig& cfg, AblationAxis axis, const std::string& reference = "",
                            const std::string& variant = "", const ProgressFn& progress = {}, bool write = true);

double percent_delta(double reference, double variant);

} // namespace nitrogym
