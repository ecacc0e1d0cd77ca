#pragma once

#include "nitrogym/crop_model.hpp"
#include "nitrogym/reward.hpp"
#include "nitrogym/scenario.hpp"
#include "nitrogym/state.hpp"
#include "nitrogym/weather.hpp"

#include <cstdint>

namespace nitrogym {

struct Action {
    double n_applied = 0.0; // kg/ha
};

struct StepResult {
    StateVector next_state;
    double reward = 0.0;
    RewardBreakdown reward_breakdown;
    bool done = false;
    double requested = 0.0; // kg/ha asked for by the policy
    double applied = 0.0;   // kg/ha actually applied after frequency gating
    DailyFluxes fluxes;
};

// Episodic daily-step nitrogen management environment. The state reports the
// most recently simulated day; reset() reports the day before the start.
// Not thread-safe; use one instance per worker.
class NitrogenEnv {
public:
    explicit NitrogenEnv(ScenarioConfig config);

    StateVector reset(std::uint64_t seed);
    StateVector reset(const ScenarioConfig& config, std::uint64_t seed);

    StepResult step(Action action);
    StepResult step(double n_applied) { return step(Action{n_applied}); }

    // Whether an application requested on the upcoming day would be applied.
    bool application_permitted() const;

    const ScenarioConfig& config() const { return config_; }
    const StateVector& state() const { return state_; }
    const CropState& crop() const { return crop_; }
    const SoilState& soil() const { return soil_; }
    const WeatherModel& weather_model() const { return weather_; }
    bool done() const { return done_; }
    int day_of_year() const; // day about to be simulated

private:
    StateVector make_state(const DailyWeather& w) const;

    ScenarioConfig config_;
    WeatherModel weather_;
    WeatherRngState rng_;
    CropState crop_;
    SoilState soil_;
    StateVector state_;
    bool done_ = true;
    bool started_ = false;
};

// Action frequency gate relative to the first simulated day.
inline bool application_day(int dap, int frequency) { return frequency <= 1 || dap % frequency == 0; }

} // namespace nitrogym
