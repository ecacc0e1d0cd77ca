#include "nitrogym/weather.hpp"

#include "nitrogym/errors.hpp"
#include "weather_presets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nitrogym {

namespace {

constexpr std::array<int, 12> kMonthEnds = {31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334, 365};

void validate_month(const MonthlyWeatherParams& p, int month)
{
    auto fail = [month](const std::string& what) {
        throw ConfigError("weather month " + std::to_string(month + 1) + ": " + what);
    };
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(p.p_wet_given_wet) || !in_unit(p.p_wet_given_dry))
        fail("transition probabilities must lie in [0,1]");
    if (!(p.rain_mean > 0.0)) fail("rain_mean must be > 0");
    if (!(p.tmax_sd > 0.0) || !(p.tmin_sd > 0.0) || !(p.srad_sd > 0.0))
        fail("standard deviations must be > 0");
    if (!(p.srad_mean > 0.0)) fail("srad_mean must be > 0");
    if (!(p.wet_srad_factor > 0.0) || p.wet_srad_factor > 1.0)
        fail("wet_srad_factor must lie in (0,1]");
    if (p.wet_temp_depression < 0.0) fail("wet_temp_depression must be >= 0");
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    return out;
}

double to_double(const std::string& cell, int line_no)
{
    try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("weather csv line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open weather file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text, const std::vector<std::string>& header)
{
    std::stringstream ss(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    bool have_header = false;
    while (std::getline(ss, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_csv_line(line);
        if (!have_header) {
            if (cells != header) throw ConfigError("weather csv: unexpected header row '" + line + "'");
            have_header = true;
            continue;
        }
        if (cells.size() != header.size())
            throw ConfigError("weather csv: expected " + std::to_string(header.size()) + " columns, got '" + line + "'");
        rows.push_back(std::move(cells));
    }
    if (!have_header) throw ConfigError("weather csv: missing header row");
    return rows;
}

} // namespace

std::string to_string(WeatherMode mode)
{
    return mode == WeatherMode::FixedTrace ? "fixed-trace" : "stochastic";
}

WeatherMode weather_mode_from_string(const std::string& s)
{
    if (s == "fixed-trace" || s == "fixed") return WeatherMode::FixedTrace;
    if (s == "stochastic") return WeatherMode::Stochastic;
    throw ConfigError("unknown weather mode: " + s);
}

int month_index(int day_of_year)
{
    if (day_of_year < 1 || day_of_year > 366)
        throw DomainError("day of year out of range: " + std::to_string(day_of_year));
    for (int m = 0; m < 12; ++m)
        if (day_of_year <= kMonthEnds[m]) return m;
    return 11;
}

WeatherModel::WeatherModel(std::array<MonthlyWeatherParams, 12> months, WeatherMode mode, std::uint64_t seed)
    : months_(months), mode_(mode), seed_(seed)
{
    for (int m = 0; m < 12; ++m) validate_month(months_[m], m);
    if (mode_ == WeatherMode::FixedTrace) {
        WeatherRngState rng(seed_);
        trace_.reserve(kDaysInTrace);
        for (int doy = 1; doy <= kDaysInTrace; ++doy) trace_.push_back(sample_weather(month_of(doy), rng));
    }
}

WeatherModel::WeatherModel(std::array<MonthlyWeatherParams, 12> months, std::vector<DailyWeather> trace)
    : months_(months), mode_(WeatherMode::FixedTrace), trace_(std::move(trace))
{
    for (int m = 0; m < 12; ++m) validate_month(months_[m], m);
    if (trace_.size() != kDaysInTrace)
        throw ConfigError("weather trace must hold 366 days, got " + std::to_string(trace_.size()));
    for (const auto& w : trace_)
        if (w.rain < 0.0 || w.srad < 0.0 || w.tmax < w.tmin)
            throw ConfigError("weather trace violates rain>=0, srad>=0, tmax>=tmin");
}

const MonthlyWeatherParams& WeatherModel::month_of(int day_of_year) const
{
    return months_[month_index(day_of_year)];
}

DailyWeather sample_weather(const MonthlyWeatherParams& p, WeatherRngState& rng)
{
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double p_wet = rng.previous_wet ? p.p_wet_given_wet : p.p_wet_given_dry;
    const bool wet = unif(rng.engine) < p_wet;
    rng.previous_wet = wet;

    DailyWeather w;
    if (wet) w.rain = std::exponential_distribution<double>(1.0 / p.rain_mean)(rng.engine);

    std::normal_distribution<double> z(0.0, 1.0);
    const double depression = wet ? p.wet_temp_depression : 0.0;
    w.tmax = p.tmax_mean - depression + p.tmax_sd * z(rng.engine);
    w.tmin = p.tmin_mean + p.tmin_sd * z(rng.engine);
    if (w.tmin > w.tmax) std::swap(w.tmin, w.tmax);

    const double srad = (p.srad_mean + p.srad_sd * z(rng.engine)) * (wet ? p.wet_srad_factor : 1.0);
    w.srad = std::max(0.1 * p.srad_mean, srad);
    return w;
}

DailyWeather generate_weather(const WeatherModel& model, int day_of_year, WeatherRngState& rng)
{
    if (day_of_year < 1 || day_of_year > WeatherModel::kDaysInTrace)
        throw DomainError("day_of_year out of range: " + std::to_string(day_of_year));
    if (model.mode() == WeatherMode::FixedTrace) return model.trace()[day_of_year - 1];
    return sample_weather(model.month_of(day_of_year), rng);
}

std::array<MonthlyWeatherParams, 12> parse_weather_params_csv(const std::string& text)
{
    static const std::vector<std::string> header = {
        "month", "p_wet_given_wet", "p_wet_given_dry", "rain_mean", "tmax_mean", "tmax_sd",
        "tmin_mean", "tmin_sd", "wet_temp_depression", "srad_mean", "srad_sd", "wet_srad_factor"};
    auto rows = csv_rows(text, header);
    if (rows.size() != 12) throw ConfigError("weather parameter csv must hold 12 monthly rows");
    std::array<MonthlyWeatherParams, 12> out{};
    std::array<bool, 12> seen{};
    int line_no = 1;
    for (const auto& r : rows) {
        ++line_no;
        const int month = static_cast<int>(to_double(r[0], line_no));
        if (month < 1 || month > 12 || seen[month - 1]) throw ConfigError("weather csv: bad or repeated month " + r[0]);
        seen[month - 1] = true;
        auto& p = out[month - 1];
        p.p_wet_given_wet = to_double(r[1], line_no);
        p.p_wet_given_dry = to_double(r[2], line_no);
        p.rain_mean = to_double(r[3], line_no);
        p.tmax_mean = to_double(r[4], line_no);
        p.tmax_sd = to_double(r[5], line_no);
        p.tmin_mean = to_double(r[6], line_no);
        p.tmin_sd = to_double(r[7], line_no);
        p.wet_temp_depression = to_double(r[8], line_no);
        p.srad_mean = to_double(r[9], line_no);
        p.srad_sd = to_double(r[10], line_no);
        p.wet_srad_factor = to_double(r[11], line_no);
        validate_month(p, month - 1);
    }
    return out;
}

std::array<MonthlyWeatherParams, 12> load_weather_params_csv(const std::string& path)
{
    return parse_weather_params_csv(read_file(path));
}

std::vector<DailyWeather> parse_weather_trace_csv(const std::string& text)
{
    static const std::vector<std::string> header = {"day", "rain", "srad", "tmax", "tmin"};
    auto rows = csv_rows(text, header);
    std::vector<DailyWeather> trace(WeatherModel::kDaysInTrace);
    std::vector<bool> seen(WeatherModel::kDaysInTrace, false);
    int line_no = 1;
    for (const auto& r : rows) {
        ++line_no;
        const int day = static_cast<int>(to_double(r[0], line_no));
        if (day < 1 || day > WeatherModel::kDaysInTrace || seen[day - 1])
            throw ConfigError("weather trace: bad or repeated day " + r[0]);
        seen[day - 1] = true;
        trace[day - 1] = {to_double(r[1], line_no), to_double(r[2], line_no), to_double(r[3], line_no),
                          to_double(r[4], line_no)};
    }
    // 365-day traces reuse Dec 31 for day 366.
    if (!seen[365] && seen[364]) {
        trace[365] = trace[364];
        seen[365] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw ConfigError("weather trace must cover every day of the year");
    return trace;
}

std::vector<DailyWeather> load_weather_trace_csv(const std::string& path)
{
    return parse_weather_trace_csv(read_file(path));
}

std::string format_weather_trace_csv(const std::vector<DailyWeather>& trace)
{
    std::ostringstream out;
    out << "day,rain,srad,tmax,tmin\n" << std::setprecision(17);
    for (std::size_t i = 0; i < trace.size(); ++i)
        out << i + 1 << ',' << trace[i].rain << ',' << trace[i].srad << ',' << trace[i].tmax << ',' << trace[i].tmin
            << '\n';
    return out.str();
}

const std::array<MonthlyWeatherParams, 12>& ames_like_weather()
{
    static const auto table = parse_weather_params_csv(embedded::kAmesLikeCsv);
    return table;
}

const std::array<MonthlyWeatherParams, 12>& gainesville_like_weather()
{
    static const auto table = parse_weather_params_csv(embedded::kGainesvilleLikeCsv);
    return table;
}

} // namespace nitrogym
