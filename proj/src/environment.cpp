#include "nitrogym/environment.hpp"

#include "nitrogym/errors.hpp"

#include <cmath>

namespace nitrogym {

namespace {

int wrap_doy(int doy)
{
    while (doy > 365) doy -= 365;
    while (doy < 1) doy += 365;
    return doy;
}

} // namespace

NitrogenEnv::NitrogenEnv(ScenarioConfig config)
    : config_((config.validate(), std::move(config))), weather_(make_weather_model(config_))
{
}

StateVector NitrogenEnv::reset(const ScenarioConfig& config, std::uint64_t seed)
{
    config.validate();
    config_ = config;
    weather_ = make_weather_model(config_);
    return reset(seed);
}

StateVector NitrogenEnv::reset(std::uint64_t seed)
{
    rng_ = WeatherRngState(seed);
    crop_ = initial_crop(config_.density);
    soil_ = initial_soil(config_.soil);
    state_ = StateVector{};
    done_ = false;
    started_ = true;

    const DailyWeather before_start = generate_weather(weather_, wrap_doy(config_.start_doy - 1), rng_);
    crop_.dtt = std::max(0.0, 0.5 * (before_start.tmax + before_start.tmin) - config_.crop.base_temp);
    state_ = make_state(before_start);
    return state_;
}

int NitrogenEnv::day_of_year() const
{
    return wrap_doy(config_.start_doy + state_.dap);
}

bool NitrogenEnv::application_permitted() const
{
    return application_day(state_.dap, config_.action_frequency);
}

StepResult NitrogenEnv::step(Action action)
{
    if (!started_ || done_) throw EpisodeFinishedError("step() called on a finished episode; call reset()");
    if (!(action.n_applied >= 0.0) || !std::isfinite(action.n_applied))
        throw DomainError("action must be a finite amount >= 0");

    StepResult r;
    r.requested = action.n_applied;
    r.applied = application_permitted() ? action.n_applied : 0.0;

    const int doy = day_of_year();
    if (doy == config_.planting_doy) crop_ = sow(crop_);
    const DailyWeather w = generate_weather(weather_, doy, rng_);
    DayResult day = advance_day(crop_, soil_, w, r.applied, config_.crop, config_.soil);
    crop_ = day.crop;
    soil_ = day.soil;
    r.fluxes = day.fluxes;

    StateVector prev = state_;
    state_ = make_state(w);
    state_.dap = prev.dap + 1;
    state_.cumsumfert = prev.cumsumfert + r.applied;
    state_.cleach = prev.cleach + day.fluxes.tleachd;
    state_.cnox = prev.cnox + day.fluxes.tnoxd;
    state_.wtnup = prev.wtnup + day.fluxes.trnu;
    state_.totaml = prev.totaml + day.fluxes.volatilized;
    state_.tleachd = day.fluxes.tleachd;
    state_.tnoxd = day.fluxes.tnoxd;
    state_.trnu = day.fluxes.trnu;
    state_.es = day.fluxes.es;
    state_.runoff = day.fluxes.runoff;

    const bool mature = crop_.istage == GrowthStage::Mature;
    const bool harvest_date = config_.latest_harvest_doy && doy == *config_.latest_harvest_doy;
    done_ = mature || harvest_date || state_.dap >= config_.max_days;

    r.reward_breakdown =
        daily_reward(r.applied, day.fluxes.tleachd, state_.cumsumfert, done_, crop_.topwt, config_.reward);
    r.reward = r.reward_breakdown.total;
    r.done = done_;
    r.next_state = state_;
    return r;
}

StateVector NitrogenEnv::make_state(const DailyWeather& w) const
{
    StateVector s = state_;
    s.dtt = crop_.dtt;
    s.istage = static_cast<int>(crop_.istage);
    s.vstage = crop_.vstage;
    s.pltpop = crop_.pltpop;
    s.rain = w.rain;
    s.srad = w.srad;
    s.tmax = w.tmax;
    s.tmin = w.tmin;
    s.nstres = crop_.nstres;
    s.pcngrn = crop_.pcngrn;
    s.swfac = crop_.swfac;
    s.grnwt = crop_.grnwt;
    s.xlai = crop_.xlai;
    s.topwt = crop_.topwt;
    s.wtdep = soil_.depth();
    s.rtdep = crop_.rtdep;
    s.sw = soil_.sw;
    return s;
}

} // namespace nitrogym
