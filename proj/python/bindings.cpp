#include "nitrogym/checkpoint.hpp"
#include "nitrogym/config.hpp"
#include "nitrogym/environment.hpp"
#include "nitrogym/errors.hpp"
#include "nitrogym/experiment.hpp"
#include "nitrogym/policies.hpp"
#include "nitrogym/report.hpp"
#include "nitrogym/reward.hpp"
#include "nitrogym/state.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace nitrogym;

namespace {

py::array_t<double> to_array(const std::vector<double>& v)
{
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

ObservationMask mask_arg(const py::object& mask)
{
    if (py::isinstance<py::str>(mask)) return observation_mask(mask.cast<std::string>());
    return ObservationMask::from_names(mask.cast<std::vector<std::string>>());
}

py::dict state_dict(const StateVector& s)
{
    py::dict d;
    for (const auto& info : state_fields()) {
        const auto v = field_values(s, info.field);
        const std::string name(info.name);
        if (info.field == StateField::sw) d[name.c_str()] = py::tuple(py::cast(v));
        else d[name.c_str()] = v.front();
    }
    return d;
}

py::dict breakdown_dict(const RewardBreakdown& b)
{
    py::dict d;
    d["yield_term"] = b.yield_term;
    d["fert_term"] = b.fert_term;
    d["leach_term"] = b.leach_term;
    d["overage_term"] = b.overage_term;
    d["total"] = b.total;
    return d;
}

py::dict summary_dict(const EpisodeSummary& s)
{
    py::dict d;
    d["total_n"] = s.total_n;
    d["total_leach"] = s.total_leach;
    d["total_uptake"] = s.total_uptake;
    d["topwt"] = s.topwt;
    d["cumulative_reward"] = s.cumulative_reward;
    d["days"] = s.days;
    py::list applied;
    for (const auto& day : s.log) applied.append(day.applied);
    d["applied"] = applied;
    return d;
}

py::dict run_report_dict(const RunReport& r)
{
    py::dict d;
    d["method"] = r.method;
    py::list tables;
    for (const auto& row : table_rows(r)) {
        py::dict t;
        t["method"] = row.method;
        t["n_input"] = row.n_input;
        t["leaching"] = row.leaching;
        t["uptake"] = row.uptake;
        t["topwt"] = row.topwt;
        t["cumulative_reward"] = row.cumulative_reward;
        tables.append(t);
    }
    d["tables"] = tables;
    py::list trials;
    for (const auto& t : r.trials) {
        py::dict td;
        td["seed"] = t.seed;
        td["failed"] = t.failed;
        td["error"] = t.error;
        td["convergence_episode"] = t.convergence_episode;
        std::vector<double> rewards;
        for (const auto& m : t.curve) rewards.push_back(m.cumulative_reward);
        td["rewards"] = to_array(rewards);
        td["final"] = t.final_eval ? py::object(summary_dict(t.final_eval->summary)) : py::none();
        trials.append(td);
    }
    d["trials"] = trials;
    return d;
}

// Progress callbacks may come from worker threads.
ProgressFn wrap_progress(const py::object& fn)
{
    if (fn.is_none()) return {};
    return [fn](std::uint64_t seed, const EpisodeMetrics& m) {
        py::gil_scoped_acquire gil;
        fn(seed, m.episode, m.cumulative_reward);
    };
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Daily nitrogen-management crop environment with DQN and SAC agents.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<MaskError>(m, "MaskError", PyExc_KeyError);
    py::register_exception<EpisodeFinishedError>(m, "EpisodeFinishedError", PyExc_RuntimeError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.attr("ACTION_AMOUNTS") = py::tuple(py::cast(std::vector<double>(kActionAmounts.begin(), kActionAmounts.end())));

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init([](const std::string& location) { return ScenarioConfig::preset(location_from_string(location)); }),
             py::arg("location") = "iowa")
        .def_property(
            "location", [](const ScenarioConfig& c) { return to_string(c.location); },
            [](ScenarioConfig& c, const std::string& s) { c.location = location_from_string(s); })
        .def_property(
            "weather_mode", [](const ScenarioConfig& c) { return to_string(c.weather_mode); },
            [](ScenarioConfig& c, const std::string& s) { c.weather_mode = weather_mode_from_string(s); })
        .def_readwrite("start_doy", &ScenarioConfig::start_doy)
        .def_readwrite("planting_doy", &ScenarioConfig::planting_doy)
        .def_readwrite("latest_harvest_doy", &ScenarioConfig::latest_harvest_doy)
        .def_readwrite("density", &ScenarioConfig::density)
        .def_readwrite("weather_seed", &ScenarioConfig::weather_seed)
        .def_readwrite("action_frequency", &ScenarioConfig::action_frequency)
        .def_readwrite("max_days", &ScenarioConfig::max_days)
        .def_property(
            "reward_threshold", [](const ScenarioConfig& c) { return c.reward.threshold; },
            [](ScenarioConfig& c, double v) { c.reward.threshold = v; })
        .def("validate", &ScenarioConfig::validate);

    py::class_<StateVector>(m, "StateVector")
        .def_readonly("cumsumfert", &StateVector::cumsumfert)
        .def_readonly("dap", &StateVector::dap)
        .def_readonly("vstage", &StateVector::vstage)
        .def_readonly("istage", &StateVector::istage)
        .def_readonly("topwt", &StateVector::topwt)
        .def_readonly("tleachd", &StateVector::tleachd)
        .def_readonly("rain", &StateVector::rain)
        .def("to_dict", &state_dict)
        .def("__eq__", [](const StateVector& a, const StateVector& b) { return a == b; });

    py::class_<NitrogenEnv>(m, "NitrogenEnv")
        .def(py::init<ScenarioConfig>(), py::arg("scenario") = ScenarioConfig::iowa())
        .def("reset", py::overload_cast<std::uint64_t>(&NitrogenEnv::reset), py::arg("seed") = 0)
        .def(
            "step",
            [](NitrogenEnv& env, double amount) {
                const StepResult r = env.step(amount);
                py::dict info;
                info["requested"] = r.requested;
                info["applied"] = r.applied;
                info["reward_breakdown"] = breakdown_dict(r.reward_breakdown);
                return py::make_tuple(r.next_state, r.reward, r.done, info);
            },
            py::arg("amount"), "Advance one day; returns (state, reward, done, info).")
        .def_property_readonly("state", &NitrogenEnv::state)
        .def_property_readonly("done", &NitrogenEnv::done)
        .def_property_readonly("day_of_year", &NitrogenEnv::day_of_year)
        .def("application_permitted", &NitrogenEnv::application_permitted);

    m.def(
        "observe", [](const StateVector& s, const py::object& mask, bool normalized) {
            const auto k = mask_arg(mask);
            return to_array(normalized ? observe_normalized(s, k) : observe(s, k));
        },
        py::arg("state"), py::arg("mask") = "full", py::arg("normalized") = false);
    m.def("observation_names", [](const py::object& mask) { return mask_arg(mask).names(); }, py::arg("mask") = "full");

    m.def(
        "daily_reward",
        [](double n_applied, double tleachd, double cumsumfert, bool is_harvest, double yield, double threshold) {
            RewardConfig cfg;
            cfg.threshold = threshold;
            return breakdown_dict(daily_reward(n_applied, tleachd, cumsumfert, is_harvest, yield, cfg));
        },
        py::arg("n_applied"), py::arg("tleachd"), py::arg("cumsumfert"), py::arg("is_harvest"), py::arg("yield_"),
        py::arg("threshold") = 240.0);
    m.def("discretize_action", &discretize_action, py::arg("amount"));
    m.def("epsilon_schedule", &epsilon_schedule, py::arg("episode"), py::arg("decay"));

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def(
            "set",
            [](ExperimentConfig& c, const std::string& key, const std::string& value) { apply_settings(c, {{key, value}}); },
            py::arg("key"), py::arg("value"))
        .def("entries", [](const ExperimentConfig& c) { return config_entries(c); })
        .def("hash", [](const ExperimentConfig& c) { return config_hash(c); })
        .def("validate", &ExperimentConfig::validate)
        .def_readwrite("scenario", &ExperimentConfig::scenario)
        .def_readwrite("seeds", &ExperimentConfig::seeds)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir)
        .def_property_readonly("episodes", &ExperimentConfig::episodes);

    m.def("load_config", &load_experiment_config, py::arg("path"), py::arg("overrides") = std::vector<std::string>{});
    m.def("config_from_ini", &experiment_config_from_ini, py::arg("text"),
          py::arg("overrides") = std::vector<std::string>{});

    m.def(
        "run_training",
        [](const ExperimentConfig& cfg, bool write, const py::object& progress) {
            const ProgressFn fn = wrap_progress(progress);
            RunReport r;
            {
                py::gil_scoped_release release;
                r = run_training(cfg, fn, write);
            }
            return run_report_dict(r);
        },
        py::arg("config"), py::arg("write") = true, py::arg("progress") = py::none(),
        "Train every configured seed, evaluate the baseline grid and return the tables.");

    m.def(
        "evaluate_baseline",
        [](double amount, const ScenarioConfig& scenario, int episodes, std::uint64_t seed) {
            return summary_dict(evaluate_baseline(amount, scenario, episodes, seed).summary);
        },
        py::arg("amount"), py::arg("scenario") = ScenarioConfig::iowa(), py::arg("episodes") = 1, py::arg("seed") = 0);

    py::class_<PolicyCheckpoint>(m, "Checkpoint")
        .def_property_readonly("kind", [](const PolicyCheckpoint& c) { return to_string(c.kind); })
        .def_readonly("observation", &PolicyCheckpoint::observation)
        .def_readonly("seed", &PolicyCheckpoint::seed)
        .def_readonly("episodes", &PolicyCheckpoint::episodes)
        .def_readonly("metadata", &PolicyCheckpoint::metadata)
        .def_property_readonly("input_size", &PolicyCheckpoint::input_size)
        .def(
            "greedy_amount",
            [](const PolicyCheckpoint& c, const std::vector<double>& obs) { return greedy_amount(c, obs); },
            py::arg("observation"))
        .def(
            "evaluate",
            [](const PolicyCheckpoint& c, const ScenarioConfig& scenario, int episodes, std::uint64_t seed) {
                return summary_dict(evaluate_checkpoint(c, scenario, episodes, seed).summary);
            },
            py::arg("scenario") = ScenarioConfig::iowa(), py::arg("episodes") = 1, py::arg("seed") = 0);
    m.def("load_checkpoint", &load_checkpoint, py::arg("path"));
}
