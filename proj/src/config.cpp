#include "nitrogym/config.hpp"

#include "nitrogym/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace nitrogym {

namespace {

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fmt_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& raw)
{
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError(key + ": expected a finite number, got '" + raw + "'");
    return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& raw)
{
    const std::string s = trim(raw);
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(key + ": expected an integer, got '" + raw + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& raw)
{
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + raw + "'");
}

template <class T>
std::string join(const std::vector<T>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_floating_point_v<T>) out += fmt_double(v[i]);
        else out += std::to_string(v[i]);
    }
    return out;
}

std::string join(const LayerArray& a)
{
    return join(std::vector<double>(a.begin(), a.end()));
}

LayerArray parse_layers(const std::string& key, const std::string& raw)
{
    const auto items = split_list(raw);
    if (items.size() != kSoilLayers)
        throw ConfigError(key + ": expected " + std::to_string(kSoilLayers) + " comma-separated values");
    LayerArray out{};
    for (std::size_t i = 0; i < kSoilLayers; ++i) out[i] = parse_double(key, items[i]);
    return out;
}

struct Entry {
    std::string key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

using Cfg = ExperimentConfig;

template <class Proj>
Entry real(std::string key, Proj proj)
{
    return {key, [proj](const Cfg& c) { return fmt_double(proj(const_cast<Cfg&>(c))); },
            [proj, key](Cfg& c, const std::string& v) { proj(c) = parse_double(key, v); }};
}

template <class Proj>
Entry integer(std::string key, Proj proj)
{
    using Int = std::remove_reference_t<decltype(proj(std::declval<Cfg&>()))>;
    return {key, [proj](const Cfg& c) { return std::to_string(proj(const_cast<Cfg&>(c))); },
            [proj, key](Cfg& c, const std::string& v) { proj(c) = parse_int<Int>(key, v); }};
}

template <class Proj>
Entry boolean(std::string key, Proj proj)
{
    return {key, [proj](const Cfg& c) { return std::string(proj(const_cast<Cfg&>(c)) ? "true" : "false"); },
            [proj, key](Cfg& c, const std::string& v) { proj(c) = parse_bool(key, v); }};
}

template <class Proj>
Entry layers(std::string key, Proj proj)
{
    return {key, [proj](const Cfg& c) { return join(proj(const_cast<Cfg&>(c))); },
            [proj, key](Cfg& c, const std::string& v) { proj(c) = parse_layers(key, v); }};
}

// Keys shared by both agent kinds address the active agent's hyperparameters.
template <class DqnProj, class SacProj>
Entry shared_real(std::string key, DqnProj dp, SacProj sp)
{
    return {key,
            [dp, sp](const Cfg& c) {
                auto& m = const_cast<Cfg&>(c);
                return fmt_double(c.agent == AgentKind::Dqn ? dp(m) : sp(m));
            },
            [dp, sp, key](Cfg& c, const std::string& v) {
                (c.agent == AgentKind::Dqn ? dp(c) : sp(c)) = parse_double(key, v);
            }};
}

template <class DqnProj, class SacProj>
Entry shared_int(std::string key, DqnProj dp, SacProj sp)
{
    using Int = std::remove_reference_t<decltype(dp(std::declval<Cfg&>()))>;
    return {key,
            [dp, sp](const Cfg& c) {
                auto& m = const_cast<Cfg&>(c);
                return std::to_string(c.agent == AgentKind::Dqn ? dp(m) : sp(m));
            },
            [dp, sp, key](Cfg& c, const std::string& v) {
                (c.agent == AgentKind::Dqn ? dp(c) : sp(c)) = parse_int<Int>(key, v);
            }};
}

std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& raw)
{
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(raw)) out.push_back(parse_int<std::uint64_t>(key, item));
    return out;
}

const std::vector<Entry>& registry()
{
    static const std::vector<Entry> entries = [] {
        std::vector<Entry> e;
        e.push_back({"scenario.location", [](const Cfg& c) { return to_string(c.scenario.location); },
                     [](Cfg& c, const std::string& v) {
                         c.scenario = ScenarioConfig::preset(location_from_string(trim(v)));
                         c.dqn.epsilon_decay = c.scenario.location == Location::Iowa ? 0.992 : 0.994;
                     }});
        e.push_back(integer("scenario.start_doy", [](Cfg& c) -> int& { return c.scenario.start_doy; }));
        e.push_back(integer("scenario.planting_doy", [](Cfg& c) -> int& { return c.scenario.planting_doy; }));
        e.push_back({"scenario.latest_harvest_doy",
                     [](const Cfg& c) {
                         return c.scenario.latest_harvest_doy ? std::to_string(*c.scenario.latest_harvest_doy)
                                                              : std::string("none");
                     },
                     [](Cfg& c, const std::string& v) {
                         if (trim(v) == "none") c.scenario.latest_harvest_doy.reset();
                         else c.scenario.latest_harvest_doy = parse_int<int>("scenario.latest_harvest_doy", v);
                     }});
        e.push_back(real("scenario.density", [](Cfg& c) -> double& { return c.scenario.density; }));
        e.push_back(real("scenario.irrigation", [](Cfg& c) -> double& { return c.scenario.irrigation; }));
        e.push_back({"scenario.weather_mode", [](const Cfg& c) { return to_string(c.scenario.weather_mode); },
                     [](Cfg& c, const std::string& v) { c.scenario.weather_mode = weather_mode_from_string(trim(v)); }});
        e.push_back(integer("scenario.weather_seed", [](Cfg& c) -> std::uint64_t& { return c.scenario.weather_seed; }));
        e.push_back({"scenario.weather_trace_file", [](const Cfg& c) { return c.scenario.weather_trace_file; },
                     [](Cfg& c, const std::string& v) { c.scenario.weather_trace_file = trim(v); }});
        e.push_back(integer("scenario.action_frequency", [](Cfg& c) -> int& { return c.scenario.action_frequency; }));
        e.push_back(integer("scenario.max_days", [](Cfg& c) -> int& { return c.scenario.max_days; }));

#define NG_CROP(name) e.push_back(real("crop." #name, [](Cfg& c) -> double& { return c.scenario.crop.name; }))
        NG_CROP(base_temp);
        NG_CROP(phyllochron);
        NG_CROP(max_leaves);
        NG_CROP(gdd_emergence);
        NG_CROP(gdd_end_juvenile);
        NG_CROP(gdd_flowering);
        NG_CROP(gdd_grain_fill);
        NG_CROP(gdd_maturity);
        NG_CROP(rue);
        NG_CROP(par_fraction);
        NG_CROP(extinction);
        NG_CROP(leaf_area_per_leaf);
        NG_CROP(senescence_floor);
        NG_CROP(grain_partition);
        NG_CROP(grain_n_conc);
        NG_CROP(n_conc_early);
        NG_CROP(n_conc_late);
        NG_CROP(uptake_rate);
        NG_CROP(root_growth);
        NG_CROP(transpiration_coeff);
        NG_CROP(water_uptake_rate);
#undef NG_CROP

#define NG_SOIL(name) e.push_back(real("soil." #name, [](Cfg& c) -> double& { return c.scenario.soil.name; }))
        NG_SOIL(depth_cm);
        e.push_back(layers("soil.layer_fraction", [](Cfg& c) -> LayerArray& { return c.scenario.soil.layer_fraction; }));
        NG_SOIL(wilting_point);
        NG_SOIL(field_capacity);
        NG_SOIL(saturation);
        NG_SOIL(drainage_coeff);
        NG_SOIL(initial_water);
        NG_SOIL(initial_nitrate);
        e.push_back(layers("soil.initial_nitrate_share",
                           [](Cfg& c) -> LayerArray& { return c.scenario.soil.initial_nitrate_share; }));
        NG_SOIL(organic_n);
        NG_SOIL(runoff_threshold);
        NG_SOIL(evaporation_coeff);
        NG_SOIL(evaporation_depth);
        NG_SOIL(volatilization_fraction);
        NG_SOIL(mineralization_rate);
        NG_SOIL(mineralization_q10);
        NG_SOIL(denitrification_fraction);
        NG_SOIL(denitrification_saturation);
#undef NG_SOIL

        e.push_back(real("reward.w1", [](Cfg& c) -> double& { return c.scenario.reward.w1; }));
        e.push_back(real("reward.w2", [](Cfg& c) -> double& { return c.scenario.reward.w2; }));
        e.push_back(real("reward.w3", [](Cfg& c) -> double& { return c.scenario.reward.w3; }));
        e.push_back(real("reward.w4", [](Cfg& c) -> double& { return c.scenario.reward.w4; }));
        e.push_back({"reward.threshold",
                     [](const Cfg& c) {
                         return std::isfinite(c.scenario.reward.threshold) ? fmt_double(c.scenario.reward.threshold)
                                                                           : std::string("none");
                     },
                     [](Cfg& c, const std::string& v) {
                         c.scenario.reward.threshold = trim(v) == "none" ? std::numeric_limits<double>::infinity()
                                                                         : parse_double("reward.threshold", v);
                     }});
        e.push_back(boolean("reward.clamp_overage", [](Cfg& c) -> bool& { return c.scenario.reward.clamp_overage; }));

        e.push_back({"agent.kind", [](const Cfg& c) { return to_string(c.agent); },
                     [](Cfg& c, const std::string& v) { c.agent = agent_kind_from_string(trim(v)); }});
        e.push_back({"agent.observation", [](const Cfg& c) { return c.observation; },
                     [](Cfg& c, const std::string& v) { c.observation = trim(v); }});
        e.push_back(shared_real("agent.gamma", [](Cfg& c) -> double& { return c.dqn.gamma; },
                                [](Cfg& c) -> double& { return c.sac.gamma; }));
        e.push_back(shared_int("agent.batch_size", [](Cfg& c) -> int& { return c.dqn.batch_size; },
                               [](Cfg& c) -> int& { return c.sac.batch_size; }));
        e.push_back(shared_real("agent.learning_rate", [](Cfg& c) -> double& { return c.dqn.learning_rate; },
                                [](Cfg& c) -> double& { return c.sac.learning_rate; }));
        e.push_back(shared_int("agent.episodes", [](Cfg& c) -> int& { return c.dqn.episodes; },
                               [](Cfg& c) -> int& { return c.sac.episodes; }));
        e.push_back(shared_int("agent.buffer_capacity", [](Cfg& c) -> std::size_t& { return c.dqn.buffer_capacity; },
                               [](Cfg& c) -> std::size_t& { return c.sac.buffer_capacity; }));
        e.push_back(shared_int("agent.gradient_steps_per_day",
                               [](Cfg& c) -> int& { return c.dqn.gradient_steps_per_day; },
                               [](Cfg& c) -> int& { return c.sac.gradient_steps_per_day; }));
        e.push_back(shared_int("agent.warmup", [](Cfg& c) -> std::size_t& { return c.dqn.warmup; },
                               [](Cfg& c) -> std::size_t& { return c.sac.warmup; }));
        e.push_back({"agent.hidden",
                     [](const Cfg& c) { return join(c.agent == AgentKind::Dqn ? c.dqn.hidden : c.sac.hidden); },
                     [](Cfg& c, const std::string& v) {
                         std::vector<int> h;
                         for (const auto& item : split_list(v)) h.push_back(parse_int<int>("agent.hidden", item));
                         (c.agent == AgentKind::Dqn ? c.dqn.hidden : c.sac.hidden) = h;
                     }});
        e.push_back({"agent.activation",
                     [](const Cfg& c) { return to_string(c.agent == AgentKind::Dqn ? c.dqn.activation : c.sac.activation); },
                     [](Cfg& c, const std::string& v) {
                         (c.agent == AgentKind::Dqn ? c.dqn.activation : c.sac.activation) = activation_from_string(trim(v));
                     }});
        e.push_back(shared_real("agent.reward_scale", [](Cfg& c) -> double& { return c.dqn.reward_scale; },
                                [](Cfg& c) -> double& { return c.sac.reward_scale; }));
        e.push_back(real("agent.epsilon_decay", [](Cfg& c) -> double& { return c.dqn.epsilon_decay; }));
        e.push_back(integer("agent.target_update_interval", [](Cfg& c) -> int& { return c.dqn.target_update_interval; }));
        e.push_back(real("agent.tau", [](Cfg& c) -> double& { return c.sac.tau; }));
        e.push_back(real("agent.alpha", [](Cfg& c) -> double& { return c.sac.initial_alpha; }));
        e.push_back(boolean("agent.auto_alpha", [](Cfg& c) -> bool& { return c.sac.auto_alpha; }));
        e.push_back(real("agent.target_entropy", [](Cfg& c) -> double& { return c.sac.target_entropy; }));
        e.push_back(real("agent.alpha_learning_rate", [](Cfg& c) -> double& { return c.sac.alpha_learning_rate; }));
        e.push_back(real("agent.action_low", [](Cfg& c) -> double& { return c.sac.action_low; }));
        e.push_back(real("agent.action_high", [](Cfg& c) -> double& { return c.sac.action_high; }));

        e.push_back({"run.trials", [](const Cfg& c) { return std::to_string(c.trials()); },
                     [](Cfg& c, const std::string& v) {
                         const int n = parse_int<int>("run.trials", v);
                         if (n < 1) throw ConfigError("run.trials must be >= 1");
                         c.seeds.clear();
                         for (int i = 1; i <= n; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
                     }});
        e.push_back({"run.seeds", [](const Cfg& c) { return join(c.seeds); },
                     [](Cfg& c, const std::string& v) { c.seeds = parse_seeds("run.seeds", v); }});
        e.push_back({"run.ablation_seeds", [](const Cfg& c) { return join(c.ablation_seeds); },
                     [](Cfg& c, const std::string& v) { c.ablation_seeds = parse_seeds("run.ablation_seeds", v); }});
        e.push_back({"run.baseline_grid", [](const Cfg& c) { return join(c.baseline_grid); },
                     [](Cfg& c, const std::string& v) {
                         c.baseline_grid.clear();
                         for (const auto& item : split_list(v))
                             c.baseline_grid.push_back(parse_double("run.baseline_grid", item));
                     }});
        e.push_back({"run.output_dir", [](const Cfg& c) { return c.output_dir; },
                     [](Cfg& c, const std::string& v) { c.output_dir = trim(v); }});
        e.push_back(integer("run.workers", [](Cfg& c) -> int& { return c.workers; }));
        e.push_back(integer("run.eval_episodes", [](Cfg& c) -> int& { return c.eval_episodes; }));
        e.push_back(boolean("run.checkpoints", [](Cfg& c) -> bool& { return c.checkpoints; }));
        return e;
    }();
    return entries;
}

const Entry& find_entry(const std::string& key)
{
    for (const auto& e : registry())
        if (e.key == key) return e;
    throw ConfigError("unknown config key '" + key + "'");
}

} // namespace

ObservationMask observation_mask(const std::string& observation)
{
    if (observation == "full" || observation == "partial") return ObservationMask::from_kind(observation);
    try {
        return ObservationMask::from_names(split_list(observation));
    } catch (const MaskError& e) {
        throw ConfigError(std::string("observation: ") + e.what());
    }
}

ObservationMask ExperimentConfig::mask() const
{
    return observation_mask(observation);
}

void ExperimentConfig::validate() const
{
    scenario.validate();
    if (agent == AgentKind::Dqn) dqn.validate();
    else sac.validate();
    if (mask().size() == 0) throw ConfigError("agent.observation selects no fields");
    if (seeds.empty()) throw ConfigError("run.seeds must list at least one seed");
    if (ablation_seeds.empty()) throw ConfigError("run.ablation_seeds must list at least one seed");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
        throw ConfigError("run.seeds must be distinct");
    for (double a : baseline_grid)
        if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("baseline amounts must be finite and >= 0");
    if (workers < 1) throw ConfigError("run.workers must be >= 1");
    if (eval_episodes < 1) throw ConfigError("run.eval_episodes must be >= 1");
    if (output_dir.empty()) throw ConfigError("run.output_dir must not be empty");
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto& e : registry()) keys.push_back(e.key);
    return keys;
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : registry()) out.emplace_back(e.key, e.get(cfg));
    return out;
}

void apply_settings(ExperimentConfig& cfg, const std::vector<std::pair<std::string, std::string>>& settings)
{
    // Keys that change how other keys are interpreted go first.
    for (const char* first : {"scenario.location", "agent.kind"}) {
        const std::pair<std::string, std::string>* last = nullptr;
        for (const auto& kv : settings)
            if (kv.first == first) last = &kv;
        if (last) find_entry(last->first).set(cfg, last->second);
    }
    for (const auto& [key, value] : settings) {
        if (key == "scenario.location" || key == "agent.kind") continue;
        find_entry(key).set(cfg, value);
    }
}

std::pair<std::string, std::string> parse_setting(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    std::string key = trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    return {key, trim(assignment.substr(eq + 1))};
}

std::vector<std::pair<std::string, std::string>> parse_ini(const std::string& text)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("key '" + section + "' must live inside a [section]");
        for (const auto& [key, value] : body) out.emplace_back(section + "." + key, value.data());
    }
    return out;
}

ExperimentConfig experiment_config_from_ini(const std::string& text, const std::vector<std::string>& overrides)
{
    auto settings = parse_ini(text);
    for (const auto& o : overrides) settings.push_back(parse_setting(o));
    ExperimentConfig cfg;
    apply_settings(cfg, settings);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path, const std::vector<std::string>& overrides)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return experiment_config_from_ini(ss.str(), overrides);
}

std::string canonical_config(const ExperimentConfig& cfg)
{
    std::string out;
    for (const auto& [k, v] : config_entries(cfg)) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const ExperimentConfig& cfg)
{
    std::string text;
    for (const auto& [k, v] : config_entries(cfg))
        if (k != "run.output_dir" && k != "run.workers") text += k + "=" + v + "\n";
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

} // namespace nitrogym
