#include "nitrogym/report.hpp"

#include "nitrogym/errors.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nitrogym {

using nlohmann::json;

ReportFormat report_format_from_string(const std::string& s)
{
    if (s == "csv") return ReportFormat::Csv;
    if (s == "jsonl") return ReportFormat::Jsonl;
    if (s == "all") return ReportFormat::All;
    throw ConfigError("unknown report format '" + s + "' (expected csv, jsonl or all)");
}

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v, double mean)
{
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size() - 1);
}

void mean_var(const std::vector<double>& v, double& mean, double& var)
{
    mean = mean_of(v);
    var = sample_var(v, mean);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

} // namespace

std::vector<CurveRow> aggregate_curves(const std::vector<TrialResult>& trials)
{
    std::vector<const TrialResult*> ok;
    for (const auto& t : trials)
        if (!t.failed) ok.push_back(&t);
    if (ok.empty()) return {};
    std::size_t len = ok.front()->curve.size();
    for (const auto* t : ok) len = std::min(len, t->curve.size());
    std::vector<CurveRow> rows(len);
    for (std::size_t e = 0; e < len; ++e) {
        std::vector<double> r, n, l, w;
        for (const auto* t : ok) {
            r.push_back(t->curve[e].cumulative_reward);
            n.push_back(t->curve[e].total_n);
            l.push_back(t->curve[e].total_leach);
            w.push_back(t->curve[e].topwt);
        }
        CurveRow& row = rows[e];
        row.episode = ok.front()->curve[e].episode;
        row.trials = static_cast<int>(ok.size());
        mean_var(r, row.reward_mean, row.reward_var);
        mean_var(n, row.total_n_mean, row.total_n_var);
        mean_var(l, row.total_leach_mean, row.total_leach_var);
        mean_var(w, row.topwt_mean, row.topwt_var);
    }
    return rows;
}

std::vector<TableRow> table_rows(const RunReport& report)
{
    std::vector<TableRow> rows;
    auto row_of = [](const std::string& method, const EpisodeSummary& s) {
        return TableRow{method, s.total_n, s.total_leach, s.total_uptake, s.topwt, s.cumulative_reward};
    };
    for (const auto& b : report.baselines) rows.push_back(row_of(b.label, b.summary));
    if (const auto agg = report.agent_aggregate()) rows.push_back(row_of(report.method, *agg));
    return rows;
}

std::string trial_curve_csv(const std::vector<EpisodeMetrics>& curve)
{
    std::string out = "episode,epsilon,cumulative_reward,total_N,total_leach,topwt\n";
    for (const auto& m : curve)
        out += std::to_string(m.episode) + "," + format_number(m.epsilon) + "," + format_number(m.cumulative_reward) +
               "," + format_number(m.total_n) + "," + format_number(m.total_leach) + "," + format_number(m.topwt) + "\n";
    return out;
}

std::vector<EpisodeMetrics> parse_trial_curve_csv(const std::string& text)
{
    std::vector<EpisodeMetrics> out;
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line) || line != "episode,epsilon,cumulative_reward,total_N,total_leach,topwt")
        throw ConfigError("not a learning-curve CSV");
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 6) throw ConfigError("malformed learning-curve row: " + line);
        out.push_back({std::stoi(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4]),
                       std::stod(f[5])});
    }
    return out;
}

std::string curves_csv(const std::vector<CurveRow>& rows)
{
    std::string out = "episode,trials,reward_mean,reward_var,total_N_mean,total_N_var,total_leach_mean,"
                      "total_leach_var,topwt_mean,topwt_var\n";
    for (const auto& r : rows)
        out += std::to_string(r.episode) + "," + std::to_string(r.trials) + "," + format_number(r.reward_mean) + "," +
               format_number(r.reward_var) + "," + format_number(r.total_n_mean) + "," + format_number(r.total_n_var) +
               "," + format_number(r.total_leach_mean) + "," + format_number(r.total_leach_var) + "," +
               format_number(r.topwt_mean) + "," + format_number(r.topwt_var) + "\n";
    return out;
}

std::string tables_csv(const std::vector<TableRow>& rows)
{
    std::string out = "method,n_input,leaching,uptake,topwt,cumulative_reward\n";
    for (const auto& r : rows)
        out += "\"" + r.method + "\"," + format_number(r.n_input) + "," + format_number(r.leaching) + "," +
               format_number(r.uptake) + "," + format_number(r.topwt) + "," + format_number(r.cumulative_reward) + "\n";
    return out;
}

bool EpisodeLogEntry::operator==(const EpisodeLogEntry& o) const
{
    const auto& a = day;
    const auto& b = o.day;
    return method == o.method && seed == o.seed && episode == o.episode && a.dap == b.dap && a.doy == b.doy &&
           a.requested == b.requested && a.applied == b.applied && a.reward == b.reward &&
           a.breakdown.yield_term == b.breakdown.yield_term && a.breakdown.fert_term == b.breakdown.fert_term &&
           a.breakdown.leach_term == b.breakdown.leach_term && a.breakdown.overage_term == b.breakdown.overage_term &&
           a.breakdown.total == b.breakdown.total && a.state == b.state;
}

json state_to_json(const StateVector& s)
{
    json j = json::object();
    for (const auto& info : state_fields()) {
        const auto v = field_values(s, info.field);
        if (info.field == StateField::dap || info.field == StateField::istage) j[std::string(info.name)] = static_cast<int>(v[0]);
        else if (v.size() == 1) j[std::string(info.name)] = v[0];
        else j[std::string(info.name)] = v;
    }
    return j;
}

StateVector state_from_json(const json& j)
{
    StateVector s;
    s.cumsumfert = j.at("cumsumfert").get<double>();
    s.dap = j.at("dap").get<int>();
    s.dtt = j.at("dtt").get<double>();
    s.istage = j.at("istage").get<int>();
    s.vstage = j.at("vstage").get<double>();
    s.pltpop = j.at("pltpop").get<double>();
    s.rain = j.at("rain").get<double>();
    s.srad = j.at("srad").get<double>();
    s.tmax = j.at("tmax").get<double>();
    s.tmin = j.at("tmin").get<double>();
    s.nstres = j.at("nstres").get<double>();
    s.pcngrn = j.at("pcngrn").get<double>();
    s.swfac = j.at("swfac").get<double>();
    s.tleachd = j.at("tleachd").get<double>();
    s.grnwt = j.at("grnwt").get<double>();
    s.cleach = j.at("cleach").get<double>();
    s.cnox = j.at("cnox").get<double>();
    s.tnoxd = j.at("tnoxd").get<double>();
    s.trnu = j.at("trnu").get<double>();
    s.wtnup = j.at("wtnup").get<double>();
    s.xlai = j.at("xlai").get<double>();
    s.topwt = j.at("topwt").get<double>();
    s.es = j.at("es").get<double>();
    s.runoff = j.at("runoff").get<double>();
    s.wtdep = j.at("wtdep").get<double>();
    s.rtdep = j.at("rtdep").get<double>();
    s.totaml = j.at("totaml").get<double>();
    const auto sw = j.at("sw").get<std::vector<double>>();
    if (sw.size() != kSoilLayers) throw ConfigError("state record has the wrong number of sw layers");
    std::copy(sw.begin(), sw.end(), s.sw.begin());
    return s;
}

json log_entry_to_json(const EpisodeLogEntry& e)
{
    const auto& d = e.day;
    return json{{"method", e.method},
                {"seed", e.seed},
                {"episode", e.episode},
                {"dap", d.dap},
                {"doy", d.doy},
                {"requested", d.requested},
                {"applied", d.applied},
                {"reward", d.reward},
                {"breakdown",
                 {{"yield", d.breakdown.yield_term},
                  {"fertilizer", d.breakdown.fert_term},
                  {"leaching", d.breakdown.leach_term},
                  {"overage", d.breakdown.overage_term},
                  {"total", d.breakdown.total}}},
                {"state", state_to_json(d.state)}};
}

EpisodeLogEntry log_entry_from_json(const json& j)
{
    EpisodeLogEntry e;
    e.method = j.at("method").get<std::string>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.episode = j.at("episode").get<int>();
    auto& d = e.day;
    d.dap = j.at("dap").get<int>();
    d.doy = j.at("doy").get<int>();
    d.requested = j.at("requested").get<double>();
    d.applied = j.at("applied").get<double>();
    d.reward = j.at("reward").get<double>();
    const auto& b = j.at("breakdown");
    d.breakdown = {b.at("yield").get<double>(), b.at("fertilizer").get<double>(), b.at("leaching").get<double>(),
                   b.at("overage").get<double>(), b.at("total").get<double>()};
    d.state = state_from_json(j.at("state"));
    return e;
}

namespace {

void append_logs(std::vector<EpisodeLogEntry>& out, const std::string& method, std::uint64_t seed, const Evaluation& ev)
{
    for (std::size_t i = 0; i < ev.episodes.size(); ++i)
        for (const auto& d : ev.episodes[i].log) out.push_back({method, seed, static_cast<int>(i), d});
}

} // namespace

std::vector<EpisodeLogEntry> collect_episode_logs(const RunReport& report)
{
    std::vector<EpisodeLogEntry> out;
    for (const auto& b : report.baselines) append_logs(out, b.label, 0, b);
    for (const auto& t : report.trials)
        if (t.final_eval) append_logs(out, report.method, t.seed, *t.final_eval);
    return out;
}

std::string episodes_jsonl(const std::vector<EpisodeLogEntry>& entries)
{
    std::string out;
    for (const auto& e : entries) out += log_entry_to_json(e).dump() + "\n";
    return out;
}

std::vector<EpisodeLogEntry> parse_episodes_jsonl(const std::string& text)
{
    std::vector<EpisodeLogEntry> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        try {
            out.push_back(log_entry_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ConfigError(std::string("malformed episode record: ") + e.what());
        }
    }
    return out;
}

namespace {

json summary_to_json(const EpisodeSummary& s)
{
    json log = json::array();
    for (const auto& d : s.log) log.push_back(log_entry_to_json({"", 0, 0, d}));
    return json{{"total_n", s.total_n},
                {"total_leach", s.total_leach},
                {"total_uptake", s.total_uptake},
                {"topwt", s.topwt},
                {"cumulative_reward", s.cumulative_reward},
                {"days", s.days},
                {"log", log}};
}

EpisodeSummary summary_from_json(const json& j)
{
    EpisodeSummary s;
    s.total_n = j.at("total_n").get<double>();
    s.total_leach = j.at("total_leach").get<double>();
    s.total_uptake = j.at("total_uptake").get<double>();
    s.topwt = j.at("topwt").get<double>();
    s.cumulative_reward = j.at("cumulative_reward").get<double>();
    s.days = j.at("days").get<int>();
    for (const auto& d : j.at("log")) s.log.push_back(log_entry_from_json(d).day);
    return s;
}

json evaluation_to_json(const Evaluation& ev)
{
    json eps = json::array();
    for (const auto& e : ev.episodes) eps.push_back(summary_to_json(e));
    return json{{"label", ev.label}, {"episodes", eps}};
}

Evaluation evaluation_from_json(const json& j)
{
    Evaluation ev;
    ev.label = j.at("label").get<std::string>();
    for (const auto& e : j.at("episodes")) ev.episodes.push_back(summary_from_json(e));
    if (ev.episodes.empty()) throw ConfigError("evaluation without episodes");
    // Mean of the episodes, log of the first one.
    ev.summary = ev.episodes.front();
    const double n = static_cast<double>(ev.episodes.size());
    if (ev.episodes.size() > 1) {
        ev.summary.total_n = ev.summary.total_leach = ev.summary.total_uptake = ev.summary.topwt =
            ev.summary.cumulative_reward = 0.0;
        for (const auto& e : ev.episodes) {
            ev.summary.total_n += e.total_n / n;
            ev.summary.total_leach += e.total_leach / n;
            ev.summary.total_uptake += e.total_uptake / n;
            ev.summary.topwt += e.topwt / n;
            ev.summary.cumulative_reward += e.cumulative_reward / n;
        }
    }
    return ev;
}

json trial_to_json(const TrialResult& t)
{
    json curve = json::array();
    for (const auto& m : t.curve)
        curve.push_back({m.episode, m.epsilon, m.cumulative_reward, m.total_n, m.total_leach, m.topwt});
    json j{{"seed", t.seed},
           {"failed", t.failed},
           {"error", t.error},
           {"convergence_episode", t.convergence_episode},
           {"curve", curve}};
    j["checkpoint"] = t.checkpoint ? checkpoint_to_json(*t.checkpoint) : json(nullptr);
    j["final_eval"] = t.final_eval ? evaluation_to_json(*t.final_eval) : json(nullptr);
    return j;
}

TrialResult trial_from_json(const json& j)
{
    TrialResult t;
    t.seed = j.at("seed").get<std::uint64_t>();
    t.failed = j.at("failed").get<bool>();
    t.error = j.at("error").get<std::string>();
    t.convergence_episode = j.at("convergence_episode").get<int>();
    for (const auto& row : j.at("curve"))
        t.curve.push_back({row.at(0).get<int>(), row.at(1).get<double>(), row.at(2).get<double>(),
                           row.at(3).get<double>(), row.at(4).get<double>(), row.at(5).get<double>()});
    if (!j.at("checkpoint").is_null()) t.checkpoint = checkpoint_from_json(j.at("checkpoint"));
    if (!j.at("final_eval").is_null()) t.final_eval = evaluation_from_json(j.at("final_eval"));
    return t;
}

json config_to_json(const ExperimentConfig& cfg)
{
    json c = json::object();
    for (const auto& [k, v] : config_entries(cfg)) c[k] = v;
    return c;
}

ExperimentConfig config_from_json(const json& j)
{
    std::vector<std::pair<std::string, std::string>> settings;
    for (const auto& [k, v] : j.items()) {
        if (k == "run.trials") continue; // implied by run.seeds
        settings.emplace_back(k, v.get<std::string>());
    }
    ExperimentConfig cfg;
    apply_settings(cfg, settings);
    cfg.validate();
    return cfg;
}

} // namespace

json run_report_to_json(const RunReport& report)
{
    json trials = json::array();
    for (const auto& t : report.trials) trials.push_back(trial_to_json(t));
    json baselines = json::array();
    for (const auto& b : report.baselines) baselines.push_back(evaluation_to_json(b));
    return json{{"format", "nitrogym-report"},
                {"version", 1},
                {"method", report.method},
                {"config", config_to_json(report.config)},
                {"trials", trials},
                {"baselines", baselines}};
}

RunReport run_report_from_json(const json& j)
{
    try {
        if (j.at("format").get<std::string>() != "nitrogym-report") throw ConfigError("not a nitrogym report");
        RunReport r;
        r.method = j.at("method").get<std::string>();
        r.config = config_from_json(j.at("config"));
        for (const auto& t : j.at("trials")) r.trials.push_back(trial_from_json(t));
        for (const auto& b : j.at("baselines")) r.baselines.push_back(evaluation_from_json(b));
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
}

json manifest_json(const RunReport& report, const std::string& status, const std::vector<std::string>& files)
{
    json trials = json::array();
    for (const auto& t : report.trials) {
        json tj{{"seed", t.seed}, {"status", t.failed ? "failed" : "ok"}, {"episodes", t.curve.size()}};
        if (t.failed) tj["error"] = t.error;
        else tj["convergence_episode"] = t.convergence_episode;
        trials.push_back(tj);
    }
    char eigen[32];
    std::snprintf(eigen, sizeof eigen, "%d.%d.%d", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
    return json{{"tool", "nitrogym"},
                {"version", "0.1.0"},
                {"status", status},
                {"method", report.method},
                {"config_hash", config_hash(report.config)},
                {"seeds", report.config.seeds},
                {"trials", trials},
                {"versions", {{"compiler", __VERSION__}, {"eigen", eigen}, {"boost", BOOST_LIB_VERSION},
                              {"cxx", static_cast<long>(__cplusplus)}}},
                {"files", files}};
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> emit_report(const RunReport& report, const std::filesystem::path& dir, ReportFormat format)
{
    if (report.trials.empty()) throw DomainError("cannot emit a report without trials");
    std::vector<std::string> files;
    auto put = [&](const std::string& rel, const std::string& content) {
        write_text_file(dir / rel, content);
        files.push_back(rel);
    };
    if (format != ReportFormat::Jsonl) {
        for (const auto& t : report.trials) {
            const std::string trial_dir = "trial_" + std::to_string(t.seed) + "/";
            put(trial_dir + "curve.csv", trial_curve_csv(t.curve));
            if (t.checkpoint && report.config.checkpoints)
                put(trial_dir + "checkpoint.json", checkpoint_to_json(*t.checkpoint).dump(1) + "\n");
        }
        put("curves.csv", curves_csv(aggregate_curves(report.trials)));
        put("tables.csv", tables_csv(table_rows(report)));
    }
    if (format != ReportFormat::Csv) put("episodes.jsonl", episodes_jsonl(collect_episode_logs(report)));
    put("report.json", run_report_to_json(report).dump() + "\n");
    files.push_back("manifest.json");
    write_text_file(dir / "manifest.json", manifest_json(report, "complete", files).dump(2) + "\n");
    return files;
}

json ablation_report_to_json(const AblationReport& r)
{
    auto cond = [](const AblationCondition& c) {
        json seeds = json::array();
        for (const auto& t : c.trials) {
            json s{{"seed", t.seed}, {"failed", t.failed}};
            if (t.final_eval) {
                s["cumulative_reward"] = t.final_eval->summary.cumulative_reward;
                s["topwt"] = t.final_eval->summary.topwt;
            }
            seeds.push_back(s);
        }
        return json{{"label", c.label},
                    {"observation", c.config.observation},
                    {"observation_size", c.config.mask().size()},
                    {"action_frequency", c.config.scenario.action_frequency},
                    {"mean_reward", c.mean_reward},
                    {"mean_topwt", c.mean_topwt},
                    {"trials", seeds}};
    };
    return json{{"axis", to_string(r.axis)},
                {"seeds", r.seeds},
                {"reference", cond(r.reference)},
                {"variant", cond(r.variant)},
                {"reward_delta_pct", r.reward_delta_pct},
                {"topwt_delta_pct", r.topwt_delta_pct}};
}

std::vector<std::string> emit_ablation_report(const AblationReport& r, const std::filesystem::path& dir)
{
    std::vector<std::string> files;
    auto put = [&](const std::string& rel, const std::string& content) {
        write_text_file(dir / rel, content);
        files.push_back(rel);
    };
    std::string csv = "condition,seed,cumulative_reward,topwt\n";
    std::vector<EpisodeLogEntry> logs;
    for (const auto* c : {&r.reference, &r.variant}) {
        for (const auto& t : c->trials) {
            if (!t.final_eval) {
                csv += "\"" + c->label + "\"," + std::to_string(t.seed) + ",failed,failed\n";
                continue;
            }
            csv += "\"" + c->label + "\"," + std::to_string(t.seed) + "," +
                   format_number(t.final_eval->summary.cumulative_reward) + "," +
                   format_number(t.final_eval->summary.topwt) + "\n";
            for (std::size_t i = 0; i < t.final_eval->episodes.size(); ++i)
                for (const auto& d : t.final_eval->episodes[i].log)
                    logs.push_back({c->label, t.seed, static_cast<int>(i), d});
        }
        csv += "\"" + c->label + "\",mean," + format_number(c->mean_reward) + "," + format_number(c->mean_topwt) + "\n";
    }
    csv += "delta_pct,," + format_number(r.reward_delta_pct) + "," + format_number(r.topwt_delta_pct) + "\n";
    put("ablation.csv", csv);
    put("ablation.json", ablation_report_to_json(r).dump(2) + "\n");
    put("episodes.jsonl", episodes_jsonl(logs));
    return files;
}

} // namespace nitrogym
