#include "nitrogym/config.hpp"
#include "nitrogym/errors.hpp"
#include "nitrogym/experiment.hpp"
#include "nitrogym/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

using namespace nitrogym;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("config", c.config, "Experiment config file (INI)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--set", c.overrides, "Override a config key, key=value (repeatable)");
    cmd->add_option("--seed", c.seed, "Run a single trial with this seed");
    cmd->add_option("--out", c.out, "Output directory (overrides run.output_dir)");
    cmd->add_flag("-q,--quiet", c.quiet, "Suppress progress output");
}

ExperimentConfig resolve(const Common& c)
{
    auto overrides = c.overrides;
    if (c.seed) {
        overrides.push_back("run.seeds=" + std::to_string(*c.seed));
        overrides.push_back("run.ablation_seeds=" + std::to_string(*c.seed));
    }
    if (!c.out.empty()) overrides.push_back("run.output_dir=" + c.out);
    return load_experiment_config(c.config, overrides);
}

ProgressFn progress_printer(const Common& c, int every)
{
    if (c.quiet) return {};
    return [every](std::uint64_t seed, const EpisodeMetrics& m) {
        if ((m.episode + 1) % every == 0)
            std::fprintf(stderr, "seed %llu  episode %5d  eps %.4f  reward %10.2f  N %6.1f  topwt %8.1f\n",
                         static_cast<unsigned long long>(seed), m.episode + 1, m.epsilon, m.cumulative_reward,
                         m.total_n, m.topwt);
    };
}

void print_table(const std::vector<TableRow>& rows)
{
    std::printf("%-18s %10s %10s %10s %10s %12s\n", "method", "N input", "leaching", "uptake", "topwt", "reward");
    for (const auto& r : rows)
        std::printf("%-18s %10.1f %10.2f %10.1f %10.1f %12.2f\n", r.method.c_str(), r.n_input, r.leaching, r.uptake,
                    r.topwt, r.cumulative_reward);
}

TableRow row_of(const Evaluation& ev)
{
    const auto& s = ev.summary;
    return {ev.label, s.total_n, s.total_leach, s.total_uptake, s.topwt, s.cumulative_reward};
}

int cmd_train(const Common& c)
{
    const ExperimentConfig cfg = resolve(c);
    const RunReport report = run_training(cfg, progress_printer(c, 50));
    print_table(table_rows(report));
    for (const auto& t : report.trials) {
        if (t.failed) std::printf("trial %llu failed: %s\n", static_cast<unsigned long long>(t.seed), t.error.c_str());
        else std::printf("trial %llu converged at episode %d, greedy reward %.2f\n",
                         static_cast<unsigned long long>(t.seed), t.convergence_episode,
                         t.final_eval->summary.cumulative_reward);
    }
    std::printf("wrote %s\n", cfg.output_dir.c_str());
    return 0;
}

int cmd_evaluate(const Common& c, const std::string& checkpoint, const std::optional<double>& baseline, int episodes)
{
    const ExperimentConfig cfg = resolve(c);
    const std::uint64_t seed = c.seed.value_or(0);
    Evaluation ev = checkpoint.empty() ? evaluate_baseline(*baseline, cfg.scenario, episodes, seed)
                                       : evaluate_checkpoint(load_checkpoint(checkpoint), cfg.scenario, episodes, seed);
    print_table({row_of(ev)});
    if (!c.out.empty()) {
        std::vector<EpisodeLogEntry> logs;
        for (std::size_t i = 0; i < ev.episodes.size(); ++i)
            for (const auto& d : ev.episodes[i].log) logs.push_back({ev.label, seed, static_cast<int>(i), d});
        write_text_file(std::filesystem::path(c.out) / "episodes.jsonl", episodes_jsonl(logs));
        std::printf("wrote %s\n", c.out.c_str());
    }
    return 0;
}

int cmd_ablate(const Common& c, const std::string& axis, const std::string& reference, const std::string& variant)
{
    const ExperimentConfig cfg = resolve(c);
    const AblationReport r =
        run_ablation(cfg, ablation_axis_from_string(axis), reference, variant, progress_printer(c, 100));
    std::printf("%-24s reward %10.2f  topwt %10.1f\n", r.reference.label.c_str(), r.reference.mean_reward,
                r.reference.mean_topwt);
    std::printf("%-24s reward %10.2f  topwt %10.1f\n", r.variant.label.c_str(), r.variant.mean_reward,
                r.variant.mean_topwt);
    std::printf("delta: reward %+.2f%%  topwt %+.2f%%\n", r.reward_delta_pct, r.topwt_delta_pct);
    std::printf("wrote %s\n", cfg.output_dir.c_str());
    return 0;
}

int cmd_report(const std::string& from, const std::string& out, const std::string& format)
{
    const RunReport report =
        run_report_from_json(nlohmann::json::parse(read_text_file(std::filesystem::path(from) / "report.json")));
    if (!out.empty()) {
        emit_report(report, out, report_format_from_string(format));
        std::printf("wrote %s\n", out.c_str());
    }
    print_table(table_rows(report));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Nitrogen-management crop environment, agents and experiment runner"};
    app.require_subcommand(1);

    Common train_opts, eval_opts, ablate_opts;
    auto* train = app.add_subcommand("train", "Train agents on every configured seed and write a report");
    add_common(train, train_opts);

    auto* evaluate = app.add_subcommand("evaluate", "Run greedy episodes of a checkpoint or a vstage-5 baseline");
    add_common(evaluate, eval_opts);
    std::string checkpoint;
    std::optional<double> baseline;
    int episodes = 1;
    auto* ck = evaluate->add_option("--checkpoint", checkpoint, "Checkpoint JSON file")->check(CLI::ExistingFile);
    auto* bl = evaluate->add_option("--baseline", baseline, "Baseline amount in kg/ha")->check(CLI::NonNegativeNumber);
    ck->excludes(bl);
    evaluate->add_option("--episodes", episodes, "Number of evaluation episodes")->check(CLI::PositiveNumber);

    auto* ablate = app.add_subcommand("ablate", "Train paired conditions along one ablation axis");
    add_common(ablate, ablate_opts);
    std::string axis = "observation", reference, variant;
    ablate->add_option("--axis", axis, "observation or frequency")->check(CLI::IsMember({"observation", "frequency"}));
    ablate->add_option("--reference", reference, "Reference condition (mask kind or frequency)");
    ablate->add_option("--variant", variant, "Variant condition (mask kind or frequency)");

    auto* report = app.add_subcommand("report", "Re-emit tables and curves from a finished run");
    std::string from, out, format = "all";
    report->add_option("run_dir", from, "Directory holding report.json")->required()->check(CLI::ExistingDirectory);
    report->add_option("--out", out, "Directory to write the files to");
    report->add_option("--format", format, "csv, jsonl or all")->check(CLI::IsMember({"csv", "jsonl", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*train) return cmd_train(train_opts);
        if (*evaluate) {
            if (checkpoint.empty() && !baseline) throw ConfigError("evaluate needs --checkpoint or --baseline");
            return cmd_evaluate(eval_opts, checkpoint, baseline, episodes);
        }
        if (*ablate) return cmd_ablate(ablate_opts, axis, reference, variant);
        if (*report) return cmd_report(from, out, format);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const MaskError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
