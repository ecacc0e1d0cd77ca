#include "nitrogym/errors.hpp"
#include "nitrogym/experiment.hpp"
#include "nitrogym/policies.hpp"
#include "nitrogym/report.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

using namespace nitrogym;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "nitrogym_experiment_test" / name;
    fs::remove_all(dir);
    return dir;
}

// Small, fast DQN run: 10 episodes with a tiny network.
ExperimentConfig smoke_config(const fs::path& out)
{
    ExperimentConfig cfg;
    cfg.dqn.episodes = 10;
    cfg.dqn.hidden = {16};
    cfg.dqn.warmup = 64;
    cfg.dqn.batch_size = 16;
    cfg.seeds = {1, 2};
    cfg.baseline_grid = {0.0, 160.0, 240.0};
    cfg.output_dir = out.string();
    return cfg;
}

} // namespace

TEST_CASE("baseline 240 applies exactly 240 on a single day")
{
    const Evaluation e = evaluate_baseline(240.0, ScenarioConfig::iowa(), 1);
    CHECK(e.label == "Baseline (240)");
    CHECK(e.summary.total_n == 240.0);
    int application_days = 0;
    for (const auto& d : e.summary.log) {
        if (d.applied > 0.0) {
            ++application_days;
            CHECK(d.applied == 240.0);
            CHECK(d.state.vstage >= 5.0);
        }
    }
    CHECK(application_days == 1);
}

TEST_CASE("episode rewards are the sum of their daily terms")
{
    for (double amount : {0.0, 160.0, 320.0}) {
        const Evaluation e = evaluate_baseline(amount, ScenarioConfig::iowa(), 1);
        const auto& log = e.summary.log;
        REQUIRE(static_cast<int>(log.size()) == e.summary.days);
        double sum = 0.0, leach = 0.0, applied = 0.0;
        int harvest_days = 0;
        for (const auto& d : log) {
            const auto& b = d.breakdown;
            CHECK(d.reward == b.yield_term - b.fert_term - b.leach_term - b.overage_term);
            CHECK(b.fert_term == doctest::Approx(0.1 * d.applied).epsilon(1e-15));
            CHECK(b.leach_term == doctest::Approx(0.1 * d.state.tleachd).epsilon(1e-15));
            if (b.yield_term != 0.0) ++harvest_days;
            sum += d.reward;
            leach += d.state.tleachd;
            applied += d.applied;
        }
        CHECK(harvest_days == 1);
        CHECK(log.back().breakdown.yield_term == doctest::Approx(0.1 * e.summary.topwt).epsilon(1e-15));
        CHECK(e.summary.cumulative_reward == doctest::Approx(sum).epsilon(1e-12));
        CHECK(e.summary.total_leach == doctest::Approx(leach).epsilon(1e-12));
        CHECK(e.summary.total_n == applied);
        const double overage = std::max(0.0, amount - 240.0);
        CHECK(e.summary.cumulative_reward ==
              doctest::Approx(0.1 * e.summary.topwt - 0.1 * amount - 0.1 * leach - overage).epsilon(1e-12));
    }
}

TEST_CASE("zero-fertilizer baseline earns yield minus leaching only")
{
    const Evaluation e = evaluate_baseline(0.0, ScenarioConfig::florida(), 1);
    CHECK(e.summary.total_n == 0.0);
    CHECK(e.summary.cumulative_reward ==
          doctest::Approx(0.1 * e.summary.topwt - 0.1 * e.summary.total_leach).epsilon(1e-12));
}

TEST_CASE("convergence episode")
{
    CHECK(convergence_episode({}) == -1);
    // The first full trailing window ends at episode window - 1.
    std::vector<double> flat(100, 5.0);
    CHECK(convergence_episode(flat) == 49);
    CHECK(convergence_episode(std::vector<double>(20, 1.0)) == 19);
    std::vector<double> ramp(200);
    for (int i = 0; i < 200; ++i) ramp[static_cast<std::size_t>(i)] = i < 100 ? static_cast<double>(i) : 100.0;
    // Trailing mean at i >= 100 is (sum_{i-9}^{99} k + 100 (i - 99)) / 10; it
    // first reaches 99 at i = 105.
    CHECK(convergence_episode(ramp, 10, 0.01) == 105);
}

TEST_CASE("percent delta")
{
    CHECK(percent_delta(100.0, 90.0) == doctest::Approx(-10.0));
    CHECK(percent_delta(-100.0, -90.0) == doctest::Approx(10.0));
    CHECK(percent_delta(5.0, 5.0) == 0.0);
}

TEST_CASE("smoke training run writes consistent artifacts")
{
    const auto dir = fresh_dir("smoke");
    const ExperimentConfig cfg = smoke_config(dir);
    const RunReport report = run_training(cfg);

    REQUIRE(report.trials.size() == 2);
    for (const auto& t : report.trials) {
        CHECK_FALSE(t.failed);
        CHECK(t.curve.size() == 10);
        REQUIRE(t.checkpoint.has_value());
        CHECK(t.checkpoint->metadata.at("config_hash") == config_hash(cfg));
        const auto path = dir / ("trial_" + std::to_string(t.seed));
        const auto parsed = parse_trial_curve_csv(read_text_file(path / "curve.csv"));
        REQUIRE(parsed.size() == 10);
        for (std::size_t i = 0; i < parsed.size(); ++i) {
            CHECK(parsed[i].episode == t.curve[i].episode);
            CHECK(parsed[i].cumulative_reward == doctest::Approx(t.curve[i].cumulative_reward).epsilon(1e-11));
            CHECK(parsed[i].epsilon == doctest::Approx(epsilon_schedule(static_cast<int>(i), 0.992)).epsilon(1e-11));
        }
        CHECK(fs::exists(path / "checkpoint.json"));
    }
    for (const char* f : {"curves.csv", "tables.csv", "episodes.jsonl", "report.json", "manifest.json"})
        CHECK(fs::exists(dir / f));

    const auto rows = table_rows(report);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].method == "Baseline (0)");
    CHECK(rows[2].method == "Baseline (240)");
    CHECK(rows[3].method == "DQN");

    // The aggregate row is the mean of the per-trial greedy evaluations.
    double reward = 0.0, n = 0.0;
    for (const auto& t : report.trials) {
        reward += t.final_eval->summary.cumulative_reward;
        n += t.final_eval->summary.total_n;
    }
    CHECK(rows[3].cumulative_reward == doctest::Approx(reward / 2.0).epsilon(1e-12));
    CHECK(rows[3].n_input == doctest::Approx(n / 2.0).epsilon(1e-12));

    // Curve aggregates match a direct recomputation.
    const auto curves = aggregate_curves(report.trials);
    REQUIRE(curves.size() == 10);
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const double a = report.trials[0].curve[i].cumulative_reward;
        const double b = report.trials[1].curve[i].cumulative_reward;
        const double mean = (a + b) / 2.0;
        CHECK(curves[i].trials == 2);
        CHECK(curves[i].reward_mean == doctest::Approx(mean).epsilon(1e-12));
        CHECK(curves[i].reward_var ==
              doctest::Approx((a - mean) * (a - mean) + (b - mean) * (b - mean)).epsilon(1e-10));
    }

    // The episode log round-trips.
    const auto entries = collect_episode_logs(report);
    CHECK_FALSE(entries.empty());
    CHECK(parse_episodes_jsonl(read_text_file(dir / "episodes.jsonl")) == entries);

    // report.json reproduces the tables.
    const RunReport back = run_report_from_json(nlohmann::json::parse(read_text_file(dir / "report.json")));
    CHECK(tables_csv(table_rows(back)) == tables_csv(rows));
}

TEST_CASE("identical configs give byte-identical outputs")
{
    const auto a = fresh_dir("det_a");
    const auto b = fresh_dir("det_b");
    ExperimentConfig ca = smoke_config(a), cb = smoke_config(b);
    ca.workers = 1;
    cb.workers = 2;
    run_training(ca);
    run_training(cb);
    for (const char* f : {"curves.csv", "tables.csv", "episodes.jsonl", "trial_1/curve.csv", "trial_2/checkpoint.json"})
        CHECK(read_text_file(a / f) == read_text_file(b / f));
}

TEST_CASE("an empty trial list produces an error and no files")
{
    const auto dir = fresh_dir("empty");
    RunReport report;
    report.config = smoke_config(dir);
    report.method = "DQN";
    CHECK_THROWS_AS(emit_report(report, dir, ReportFormat::All), DomainError);
    CHECK_FALSE(fs::exists(dir / "tables.csv"));
    CHECK_FALSE(fs::exists(dir / "curves.csv"));
}

TEST_CASE("checkpoint evaluation rejects a mismatched observation size")
{
    DqnHyper h;
    h.hidden = {4};
    PolicyCheckpoint ckpt = make_checkpoint(DqnAgent(3, kNumActions, h, 1), "full", 0);
    CHECK_THROWS_AS(evaluate_checkpoint(ckpt, ScenarioConfig::iowa(), 1), ConfigError);
}

TEST_CASE("partial mask has ten inputs")
{
    CHECK(ObservationMask::partial().size() == 10);
}

TEST_CASE("frequency ablation only applies on permitted days")
{
    ScenarioConfig sc = ScenarioConfig::iowa();
    sc.action_frequency = 10;
    NitrogenEnv env(sc);
    const auto s = run_episode(env, 0, [](const StateVector&) { return 40.0; });
    for (const auto& d : s.log) {
        CHECK(d.requested == 40.0);
        // The log reports the state after the day; the gate uses the day before.
        CHECK(d.applied == (application_day(d.dap - 1, 10) ? 40.0 : 0.0));
    }
}

TEST_CASE("ablation of identical conditions reports a zero delta")
{
    ExperimentConfig cfg = smoke_config(fresh_dir("ablate"));
    cfg.ablation_seeds = {1, 2};
    const AblationReport r = run_ablation(cfg, AblationAxis::Observation, "full", "full", {}, false);
    CHECK(r.reward_delta_pct == 0.0);
    CHECK(r.topwt_delta_pct == 0.0);
    CHECK(r.reference.trials.size() == 2);
}

TEST_CASE("observation ablation trains on the partial mask")
{
    ExperimentConfig cfg = smoke_config(fresh_dir("ablate_partial"));
    cfg.ablation_seeds = {3};
    const AblationReport r = run_ablation(cfg, AblationAxis::Observation, {}, {}, {}, true);
    CHECK(r.variant.config.mask().size() == 10);
    REQUIRE(r.variant.trials.front().checkpoint.has_value());
    CHECK(r.variant.trials.front().checkpoint->input_size() == 10);
    CHECK(r.reward_delta_pct == doctest::Approx(percent_delta(r.reference.mean_reward, r.variant.mean_reward)));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "ablation.csv"));
}
