#include "nitrogym/scenario.hpp"

#include "nitrogym/errors.hpp"

namespace nitrogym {

std::string to_string(Location loc)
{
    return loc == Location::Iowa ? "iowa" : "florida";
}

Location location_from_string(const std::string& s)
{
    if (s == "iowa" || s == "Iowa") return Location::Iowa;
    if (s == "florida" || s == "Florida") return Location::Florida;
    throw ConfigError("unknown location: " + s + " (expected iowa|florida)");
}

void ScenarioConfig::validate() const
{
    auto doy_ok = [](int d) { return d >= 1 && d <= 366; };
    if (!doy_ok(start_doy) || !doy_ok(planting_doy)) throw ConfigError("dates must be days of year in [1,366]");
    if (planting_doy <= start_doy) throw ConfigError("planting date must come after the simulation start");
    if (latest_harvest_doy) {
        if (!doy_ok(*latest_harvest_doy)) throw ConfigError("latest harvest must be a day of year in [1,366]");
        if (*latest_harvest_doy <= planting_doy) throw ConfigError("latest harvest must come after planting");
    }
    if (!(soil.depth_cm > 0.0)) throw ConfigError("soil depth must be > 0");
    if (!(density > 0.0)) throw ConfigError("plant density must be > 0");
    if (irrigation != 0.0) throw ConfigError("irrigation is not supported; it must be 0");
    if (action_frequency < 1) throw ConfigError("action frequency must be >= 1 day");
    if (max_days < 1) throw ConfigError("max_days must be >= 1");
    if (start_doy + max_days > 2 * 366) throw ConfigError("episodes may not span more than one year boundary");
    const auto& c = crop;
    if (!(c.gdd_emergence <= c.gdd_end_juvenile && c.gdd_end_juvenile <= c.gdd_flowering &&
          c.gdd_flowering <= c.gdd_grain_fill && c.gdd_grain_fill < c.gdd_maturity && c.gdd_emergence >= 0.0))
        throw ConfigError("stage GDD thresholds must be nondecreasing");
    if (!(c.phyllochron > 0.0) || !(c.max_leaves > 0.0)) throw ConfigError("phyllochron and max_leaves must be > 0");
    reward.validate();
    (void)initial_soil(soil); // validates soil parameters
}

ScenarioConfig ScenarioConfig::iowa()
{
    ScenarioConfig c;
    c.location = Location::Iowa;
    c.start_doy = 115;         // Apr 25
    c.planting_doy = 147;      // May 27
    c.latest_harvest_doy = 297; // Oct 24
    c.density = 7.6;
    c.weather_seed = 1999;
    c.reward.threshold = 240.0;
    c.soil.depth_cm = 151.0;
    c.soil.wilting_point = 0.13;
    c.soil.field_capacity = 0.30;
    c.soil.saturation = 0.45;
    c.soil.drainage_coeff = 0.3;
    c.soil.initial_nitrate = 90.0;
    return c;
}

ScenarioConfig ScenarioConfig::florida()
{
    ScenarioConfig c;
    c.location = Location::Florida;
    c.start_doy = 30;          // Jan 30
    c.planting_doy = 57;       // Feb 26
    c.latest_harvest_doy.reset(); // harvested at maturity
    c.density = 7.2;
    c.weather_seed = 1982;
    c.reward.threshold = 160.0;
    c.soil.depth_cm = 180.0;
    // Unirrigated fine sand: water-limited growth, a flat N response and heavy
    // leaching. Fitted to vstage-5 rows of 40, 80 and 160 kg/ha.
    c.soil.wilting_point = 0.03;
    c.soil.field_capacity = 0.05;
    c.soil.saturation = 0.37;
    c.soil.drainage_coeff = 1.0;
    c.soil.initial_water = 0.45;
    c.soil.initial_nitrate = 30.0;
    c.soil.organic_n = 1500.0;
    c.soil.mineralization_rate = 0.2;
    c.soil.runoff_threshold = 60.0;
    c.soil.evaporation_coeff = 0.3;
    c.crop.gdd_maturity = 1600.0;
    c.crop.uptake_rate = 0.2;
    c.crop.water_uptake_rate = 0.16;
    c.crop.transpiration_coeff = 0.5;
    return c;
}

ScenarioConfig ScenarioConfig::preset(Location loc)
{
    return loc == Location::Iowa ? iowa() : florida();
}

const std::array<MonthlyWeatherParams, 12>& weather_table(Location loc)
{
    return loc == Location::Iowa ? ames_like_weather() : gainesville_like_weather();
}

WeatherModel make_weather_model(const ScenarioConfig& cfg)
{
    if (!cfg.weather_trace_file.empty()) {
        if (cfg.weather_mode != WeatherMode::FixedTrace)
            throw ConfigError("weather_trace_file requires fixed-trace weather mode");
        return WeatherModel(weather_table(cfg.location), load_weather_trace_csv(cfg.weather_trace_file));
    }
    return WeatherModel(weather_table(cfg.location), cfg.weather_mode, cfg.weather_seed);
}

} // namespace nitrogym
