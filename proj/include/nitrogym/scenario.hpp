#pragma once

#include "nitrogym/crop_model.hpp"
#include "nitrogym/reward.hpp"
#include "nitrogym/weather.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace nitrogym {

enum class Location { Iowa, Florida };

std::string to_string(Location loc);
Location location_from_string(const std::string& s);

struct ScenarioConfig {
    Location location = Location::Iowa;
    int start_doy = 115;                 // simulation start, day of year
    int planting_doy = 147;
    std::optional<int> latest_harvest_doy = 297;
    double density = 7.6;                // plants/m2
    double irrigation = 0.0;             // mm/d, must stay 0
    WeatherMode weather_mode = WeatherMode::FixedTrace;
    std::uint64_t weather_seed = 1999;   // selects the fixed trace
    std::string weather_trace_file;      // optional CSV overriding the generated trace
    RewardConfig reward;
    int action_frequency = 1;            // days between permitted applications
    int max_days = 250;                  // hard episode cap
    CropParams crop;
    SoilParams soil;

    // Throws ConfigError when an invariant does not hold.
    void validate() const;

    static ScenarioConfig iowa();
    static ScenarioConfig florida();
    static ScenarioConfig preset(Location loc);
};

// Monthly weather table for the scenario's location.
const std::array<MonthlyWeatherParams, 12>& weather_table(Location loc);

// Weather model described by the scenario: the fixed trace (generated from
// weather_seed or loaded from weather_trace_file) or the stochastic generator.
WeatherModel make_weather_model(const ScenarioConfig& cfg);

} // namespace nitrogym
