#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace nitrogym {

struct DailyWeather {
    double rain = 0.0; // mm/d
    double srad = 0.0; // MJ/m2/d
    double tmax = 0.0; // degC
    double tmin = 0.0; // degC
};

// Parameters of the first-order Markov occurrence / parametric amount
// generator for one calendar month.
struct MonthlyWeatherParams {
    double p_wet_given_wet = 0.0;
    double p_wet_given_dry = 0.0;
    double rain_mean = 1.0;          // exponential scale of wet-day amounts, mm
    double tmax_mean = 0.0;
    double tmax_sd = 1.0;
    double tmin_mean = 0.0;
    double tmin_sd = 1.0;
    double wet_temp_depression = 0.0; // subtracted from tmax on wet days
    double srad_mean = 1.0;
    double srad_sd = 1.0;
    double wet_srad_factor = 1.0;     // multiplies srad on wet days
};

enum class WeatherMode { FixedTrace, Stochastic };

std::string to_string(WeatherMode mode);
WeatherMode weather_mode_from_string(const std::string& s);

// Stream state for stochastic sampling; one per simulator.
struct WeatherRngState {
    std::mt19937_64 engine;
    bool previous_wet = false;

    explicit WeatherRngState(std::uint64_t seed = 0) : engine(seed) {}
};

class WeatherModel {
public:
    static constexpr int kDaysInTrace = 366;

    // Validates the monthly table. In fixed-trace mode a 366-day series is
    // generated once from `seed`.
    WeatherModel(std::array<MonthlyWeatherParams, 12> months, WeatherMode mode, std::uint64_t seed);

    // Fixed-trace model backed by an explicit series (e.g. loaded from CSV).
    WeatherModel(std::array<MonthlyWeatherParams, 12> months, std::vector<DailyWeather> trace);

    const std::array<MonthlyWeatherParams, 12>& months() const { return months_; }
    const MonthlyWeatherParams& month_of(int day_of_year) const;
    WeatherMode mode() const { return mode_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<DailyWeather>& trace() const { return trace_; }

private:
    std::array<MonthlyWeatherParams, 12> months_;
    WeatherMode mode_;
    std::uint64_t seed_ = 0;
    std::vector<DailyWeather> trace_;
};

// Month index (0..11) for a day of year in a 365-day calendar; day 366 maps
// to December. Throws DomainError outside [1, 366].
int month_index(int day_of_year);

// Fixed-trace: returns the stored value for `day_of_year` (rng untouched).
// Stochastic: draws occurrence from the Markov chain, then amounts.
DailyWeather generate_weather(const WeatherModel& model, int day_of_year, WeatherRngState& rng);

// Draws one day from the monthly parameters irrespective of the model mode.
DailyWeather sample_weather(const MonthlyWeatherParams& p, WeatherRngState& rng);

// CSV I/O. Parameter tables: header row then 12 rows
//   month,p_wet_given_wet,p_wet_given_dry,rain_mean,tmax_mean,tmax_sd,
//   tmin_mean,tmin_sd,wet_temp_depression,srad_mean,srad_sd,wet_srad_factor
// Traces: header row then up to 366 rows
//   day,rain,srad,tmax,tmin
std::array<MonthlyWeatherParams, 12> parse_weather_params_csv(const std::string& text);
std::array<MonthlyWeatherParams, 12> load_weather_params_csv(const std::string& path);
std::vector<DailyWeather> parse_weather_trace_csv(const std::string& text);
std::vector<DailyWeather> load_weather_trace_csv(const std::string& path);
std::string format_weather_trace_csv(const std::vector<DailyWeather>& trace);

// Built-in calibration-free monthly tables.
const std::array<MonthlyWeatherParams, 12>& ames_like_weather();
const std::array<MonthlyWeatherParams, 12>& gainesville_like_weather();

} // namespace nitrogym
