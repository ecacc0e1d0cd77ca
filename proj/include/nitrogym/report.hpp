#pragma once

#include "nitrogym/experiment.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace nitrogym {

enum class ReportFormat { Csv, Jsonl, All };

ReportFormat report_format_from_string(const std::string& s); // csv | jsonl | all

// Shortest-decimal-that-fits formatting used in every CSV (12 significant digits).
std::string format_number(double v);

// Per-episode mean and sample variance across non-failed trials, truncated
// to the shortest curve. Variance is 0 with a single trial.
struct CurveRow {
    int episode = 0;
    int trials = 0;
    double reward_mean = 0.0, reward_var = 0.0;
    double total_n_mean = 0.0, total_n_var = 0.0;
    double total_leach_mean = 0.0, total_leach_var = 0.0;
    double topwt_mean = 0.0, topwt_var = 0.0;
};
std::vector<CurveRow> aggregate_curves(const std::vector<TrialResult>& trials);

struct TableRow {
    std::string method;
    double n_input = 0.0;
    double leaching = 0.0;
    double uptake = 0.0;
    double topwt = 0.0;
    double cumulative_reward = 0.0;
};
// Baselines in grid order, then the trained agent's aggregate (if any trial succeeded).
std::vector<TableRow> table_rows(const RunReport& report);

std::string trial_curve_csv(const std::vector<EpisodeMetrics>& curve);
std::vector<EpisodeMetrics> parse_trial_curve_csv(const std::string& text);
std::string curves_csv(const std::vector<CurveRow>& rows);
std::string tables_csv(const std::vector<TableRow>& rows);

// One JSON object per simulated day.
struct EpisodeLogEntry {
    std::string method;
    std::uint64_t seed = 0;
    int episode = 0;
    DayRecord day;
    bool operator==(const EpisodeLogEntry& o) const;
};
nlohmann::json state_to_json(const StateVector& s);
StateVector state_from_json(const nlohmann::json& j);
nlohmann::json log_entry_to_json(const EpisodeLogEntry& e);
EpisodeLogEntry log_entry_from_json(const nlohmann::json& j);
std::vector<EpisodeLogEntry> collect_episode_logs(const RunReport& report);
std::string episodes_jsonl(const std::vector<EpisodeLogEntry>& entries);
std::vector<EpisodeLogEntry> parse_episodes_jsonl(const std::string& text);

// Full report, including day logs, for later re-emission.
nlohmann::json run_report_to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& j);

nlohmann::json manifest_json(const RunReport& report, const std::string& status,
                             const std::vector<std::string>& files);

void write_text_file(const std::filesystem::path& path, const std::string& content); // throws IoError
std::string read_text_file(const std::filesystem::path& path);                       // throws IoError

// Writes tables.csv, curves.csv, trial_<seed>/curve.csv, trial_<seed>/checkpoint.json
// (csv), episodes.jsonl (jsonl), plus report.json and manifest.json. Returns
// the written paths relative to `dir`. Throws DomainError without writing
// anything when the report has no trials.
std::vector<std::string> emit_report(const RunReport& report, const std::filesystem::path& dir,
                                     ReportFormat format = ReportFormat::All);

// ablation.csv (per-seed rows plus the delta line), ablation.json and episodes.jsonl.
std::vector<std::string> emit_ablation_report(const AblationReport& report, const std::filesystem::path& dir);
nlohmann::json ablation_report_to_json(const AblationReport& report);

} // namespace nitrogym
