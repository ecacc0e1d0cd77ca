#include "nitrogym/environment.hpp"
#include "nitrogym/errors.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace nitrogym;

namespace {

bool close_rel(double a, double b, double tol = 1e-9)
{
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

TEST_CASE("reset gives a zeroed day-0 state")
{
    NitrogenEnv iowa(ScenarioConfig::iowa());
    const StateVector s = iowa.reset(7);
    CHECK(s.dap == 0);
    CHECK(s.cumsumfert == 0.0);
    CHECK(s.pltpop == doctest::Approx(7.6));
    CHECK(s.cleach == 0.0);
    CHECK(s.cnox == 0.0);
    CHECK(s.wtnup == 0.0);
    CHECK(s.totaml == 0.0);
    CHECK(s.topwt == 0.0);

    NitrogenEnv florida(ScenarioConfig::florida());
    const StateVector f = florida.reset(7);
    CHECK(f.pltpop == doctest::Approx(7.2));
    CHECK(florida.soil().depth() == doctest::Approx(180.0));
    CHECK(f.wtdep == doctest::Approx(180.0));
}

TEST_CASE("reset twice is bitwise identical")
{
    NitrogenEnv env(ScenarioConfig::florida());
    const StateVector a = env.reset(7);
    env.step(40.0);
    const StateVector b = env.reset(7);
    CHECK(a == b);
}

TEST_CASE("invalid scenarios are rejected")
{
    auto cfg = ScenarioConfig::iowa();
    cfg.planting_doy = cfg.start_doy;
    CHECK_THROWS_AS(NitrogenEnv{cfg}, ConfigError);
    cfg = ScenarioConfig::iowa();
    cfg.density = -1.0;
    CHECK_THROWS_AS(NitrogenEnv{cfg}, ConfigError);
    cfg = ScenarioConfig::iowa();
    cfg.soil.depth_cm = 0.0;
    CHECK_THROWS_AS(NitrogenEnv{cfg}, ConfigError);
    cfg = ScenarioConfig::iowa();
    cfg.irrigation = 5.0;
    CHECK_THROWS_AS(NitrogenEnv{cfg}, ConfigError);
    NitrogenEnv env(ScenarioConfig::iowa());
    cfg = ScenarioConfig::iowa();
    cfg.action_frequency = 0;
    CHECK_THROWS_AS(env.reset(cfg, 1), ConfigError);
}

TEST_CASE("step errors")
{
    NitrogenEnv env(ScenarioConfig::iowa());
    CHECK_THROWS_AS(env.step(0.0), EpisodeFinishedError); // never reset
    env.reset(1);
    CHECK_THROWS_AS(env.step(-1.0), DomainError);
    CHECK_THROWS_AS(env.step(std::nan("")), DomainError);
    while (!env.step(0.0).done) {
    }
    CHECK(env.done());
    CHECK_THROWS_AS(env.step(0.0), EpisodeFinishedError);
}

TEST_CASE("a zero action on a leach-free, non-harvest day earns nothing")
{
    NitrogenEnv env(ScenarioConfig::iowa());
    env.reset(1);
    bool seen = false;
    while (!env.done()) {
        const StepResult r = env.step(0.0);
        if (!r.done && r.fluxes.tleachd == 0.0) {
            CHECK(r.reward == 0.0);
            seen = true;
        } else if (!r.done) {
            CHECK(r.reward == doctest::Approx(-0.1 * r.fluxes.tleachd));
        }
    }
    CHECK(seen);
}

TEST_CASE("off-schedule applications are zeroed")
{
    auto cfg = ScenarioConfig::iowa();
    cfg.action_frequency = 10;
    NitrogenEnv env(cfg);
    env.reset(1);
    for (int d = 0; d < 3; ++d) env.step(0.0);
    CHECK_FALSE(env.application_permitted());
    const StepResult r = env.step(160.0); // day 3
    CHECK(r.requested == 160.0);
    CHECK(r.applied == 0.0);
    CHECK(r.next_state.cumsumfert == 0.0);
    CHECK(r.reward_breakdown.fert_term == 0.0);

    env.reset(1);
    int dap = 0;
    while (!env.done()) {
        const StepResult s = env.step(40.0);
        if (s.applied != 0.0) CHECK(dap % 10 == 0);
        else CHECK(dap % 10 != 0);
        ++dap;
    }
}

TEST_CASE("default episodes last between 100 and 200 days")
{
    for (const auto& cfg : {ScenarioConfig::iowa(), ScenarioConfig::florida()}) {
        NitrogenEnv env(cfg);
        for (double n : {0.0, 240.0}) {
            env.reset(1);
            int doy = 0;
            StepResult r;
            bool first = true;
            while (!env.done()) {
                doy = env.day_of_year();
                r = env.step(first ? n : 0.0);
                first = false;
            }
            CHECK(r.next_state.dap >= 100);
            CHECK(r.next_state.dap <= 200);
            if (cfg.latest_harvest_doy) CHECK(doy <= *cfg.latest_harvest_doy);
            CHECK(r.reward_breakdown.yield_term == doctest::Approx(0.1 * r.next_state.topwt));
        }
    }
}

TEST_CASE("done fires exactly once, on the terminal step")
{
    NitrogenEnv env(ScenarioConfig::florida());
    env.reset(3);
    int dones = 0, harvests = 0;
    while (!env.done()) {
        const StepResult r = env.step(0.0);
        dones += r.done ? 1 : 0;
        harvests += r.reward_breakdown.yield_term != 0.0 ? 1 : 0;
    }
    CHECK(dones == 1);
    CHECK(harvests == 1);
}

TEST_CASE("state invariants and running sums hold along random episodes")
{
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick(0, 4);
    for (auto cfg : {ScenarioConfig::iowa(), ScenarioConfig::florida()}) {
        cfg.weather_mode = WeatherMode::Stochastic;
        NitrogenEnv env(cfg);
        for (int ep = 0; ep < 5; ++ep) {
            StateVector prev = env.reset(static_cast<std::uint64_t>(ep));
            double sum_applied = 0.0, sum_leach = 0.0, sum_nox = 0.0, sum_up = 0.0, sum_vol = 0.0;
            bool reproductive = false;
            while (!env.done()) {
                const StepResult r = env.step(40.0 * pick(rng));
                const StateVector& s = r.next_state;
                sum_applied += r.applied;
                sum_leach += s.tleachd;
                sum_nox += s.tnoxd;
                sum_up += s.trnu;
                sum_vol += r.fluxes.volatilized;
                CHECK(close_rel(s.cumsumfert, sum_applied));
                CHECK(close_rel(s.cleach, sum_leach));
                CHECK(close_rel(s.cnox, sum_nox));
                CHECK(close_rel(s.wtnup, sum_up));
                CHECK(close_rel(s.totaml, sum_vol));
                CHECK(s.tmax >= s.tmin);
                CHECK(s.dap == prev.dap + 1);
                CHECK(s.cumsumfert >= prev.cumsumfert);
                CHECK(s.cleach >= prev.cleach);
                CHECK(s.cnox >= prev.cnox);
                CHECK(s.wtnup >= prev.wtnup);
                CHECK(s.totaml >= prev.totaml);
                for (double v : {s.nstres, s.swfac, s.pcngrn}) {
                    CHECK(v >= 0.0);
                    CHECK(v <= 1.0);
                }
                CHECK(s.xlai >= 0.0);
                CHECK(s.rtdep >= 0.0);
                CHECK(s.grnwt <= s.topwt);
                if (!reproductive) CHECK(s.vstage >= prev.vstage);
                reproductive = reproductive || s.istage >= static_cast<int>(GrowthStage::Flowering);
                prev = s;
            }
        }
    }
}

TEST_CASE("identical config, seed and actions give identical trajectories")
{
    auto cfg = ScenarioConfig::iowa();
    cfg.weather_mode = WeatherMode::Stochastic;
    NitrogenEnv a(cfg), b(cfg);
    a.reset(5);
    b.reset(5);
    int d = 0;
    while (!a.done()) {
        const double n = (d++ % 17 == 0) ? 80.0 : 0.0;
        const StepResult ra = a.step(n), rb = b.step(n);
        CHECK(ra.next_state == rb.next_state);
        CHECK(ra.reward == rb.reward);
    }
    CHECK(b.done());
}

TEST_CASE("application_day gate")
{
    CHECK(application_day(0, 1));
    CHECK(application_day(7, 1));
    CHECK(application_day(0, 10));
    CHECK_FALSE(application_day(3, 10));
    CHECK(application_day(20, 10));
}

TEST_CASE("location presets round-trip through their names")
{
    CHECK(location_from_string(to_string(Location::Florida)) == Location::Florida);
    CHECK_THROWS_AS(location_from_string("kansas"), ConfigError);
}
