#include "nitrogym/crop_model.hpp"
#include "nitrogym/errors.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

using namespace nitrogym;

namespace {

// Emerged crop with a full canopy, rooted through the profile.
CropState growing_crop(const SoilState& soil)
{
    CropState c = sow(initial_crop(7.6));
    c.istage = GrowthStage::Vegetative;
    c.gdd = 400.0;
    c.vstage = (400.0 - 60.0) / 43.0;
    c.xlai = 3.0;
    c.topwt = 3000.0;
    c.rtdep = soil.depth();
    return c;
}

DailyWeather day(double rain, double srad, double tmax, double tmin)
{
    return {rain, srad, tmax, tmin};
}

} // namespace

TEST_CASE("phenology: thermal time from the daily mean above base")
{
    CropParams p;
    CropState c = sow(initial_crop(7.6));
    CHECK(phenology_update(c, day(0, 20, 30, 18), p).dtt == doctest::Approx(16.0).epsilon(1e-15));
    CHECK(phenology_update(c, day(0, 20, 10, 2), p).dtt == 0.0);
}

TEST_CASE("phenology: 215 degree days after emergence is vstage 5")
{
    CropParams p;
    CropState c = sow(initial_crop(7.6));
    c.istage = GrowthStage::Emerged;
    c.gdd = p.gdd_emergence + 215.0 - 10.0;
    const CropState next = phenology_update(c, day(0, 20, 28, 8), p); // dtt = 10
    CHECK(next.vstage == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("phenology: stages and leaves never go backwards")
{
    CropParams p;
    CropState c = sow(initial_crop(7.6));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> t(-5.0, 35.0);
    for (int i = 0; i < 400; ++i) {
        double a = t(rng), b = t(rng);
        if (a < b) std::swap(a, b);
        const CropState n = phenology_update(c, day(0, 15, a, b), p);
        CHECK(n.dtt >= 0.0);
        CHECK(n.istage >= c.istage);
        CHECK(n.vstage >= c.vstage);
        CHECK(n.vstage <= p.max_leaves);
        c = n;
    }
    CHECK(c.istage == GrowthStage::Mature);
}

TEST_CASE("fallow crops only record thermal time")
{
    CropParams p;
    const CropState c = initial_crop(7.6);
    const CropState n = phenology_update(c, day(0, 20, 30, 20), p);
    CHECK(n.gdd == 0.0);
    CHECK(n.istage == GrowthStage::Fallow);
}

TEST_CASE("no radiation, no growth")
{
    SoilParams sp;
    CropParams cp;
    const SoilState soil = initial_soil(sp);
    const CropState crop = growing_crop(soil);
    const DayResult r = advance_day(crop, soil, day(0, 0, 28, 16), 0.0, cp, sp);
    CHECK(r.fluxes.growth == 0.0);
    CHECK(r.crop.topwt == crop.topwt);
}

TEST_CASE("no soil nitrate, heavy rain: nothing leaches")
{
    SoilParams sp;
    sp.initial_nitrate = 0.0;
    sp.organic_n = 0.0;
    CropParams cp;
    const SoilState soil = initial_soil(sp);
    const DayResult r = advance_day(initial_crop(7.6), soil, day(120, 10, 25, 15), 0.0, cp, sp);
    CHECK(r.fluxes.drainage > 0.0);
    CHECK(r.fluxes.tleachd == 0.0);
}

TEST_CASE("dry day at field capacity: no drainage, no leaching")
{
    SoilParams sp;
    sp.initial_water = 1.0;
    CropParams cp;
    const SoilState soil = initial_soil(sp);
    const DayResult r = advance_day(initial_crop(7.6), soil, day(0, 20, 28, 14), 0.0, cp, sp);
    CHECK(r.fluxes.drainage == 0.0);
    CHECK(r.fluxes.tleachd == 0.0);
}

TEST_CASE("volatilization only on rain-free application days")
{
    SoilParams sp;
    CropParams cp;
    const SoilState soil = initial_soil(sp);
    const DayResult dry = advance_day(initial_crop(7.6), soil, day(0, 20, 25, 12), 100.0, cp, sp);
    const DayResult wet = advance_day(initial_crop(7.6), soil, day(5, 20, 25, 12), 100.0, cp, sp);
    CHECK(dry.fluxes.volatilized == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(wet.fluxes.volatilized == 0.0);
}

TEST_CASE("daily nitrogen and water balances close")
{
    SoilParams sp;
    CropParams cp;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SoilState soil = initial_soil(sp);
    CropState crop = sow(initial_crop(7.6));
    for (int i = 0; i < 200; ++i) {
        const double tmin = 5.0 + 15.0 * u(rng);
        const DailyWeather w = day(u(rng) < 0.3 ? 80.0 * u(rng) : 0.0, 5.0 + 20.0 * u(rng), tmin + 12.0 * u(rng), tmin);
        const double n = u(rng) < 0.1 ? 160.0 * u(rng) : 0.0;
        const DayResult r = advance_day(crop, soil, w, n, cp, sp);
        CHECK(oracle::nitrogen_balance(soil, r.soil, r.fluxes).relative() < 1e-12);
        CHECK(oracle::water_balance(soil, r.soil, r.fluxes).relative() < 1e-12);
        for (std::size_t k = 0; k < kSoilLayers; ++k) {
            CHECK(r.soil.nitrate[k] >= 0.0);
            CHECK(r.soil.sw[k] >= 0.0);
            CHECK(r.soil.sw[k] <= r.soil.saturation[k] + 1e-12);
        }
        CHECK(r.crop.grnwt <= r.crop.topwt);
        CHECK(r.crop.rtdep <= r.soil.depth() + 1e-9);
        soil = r.soil;
        crop = r.crop;
    }
}

TEST_CASE("more fertilizer never lowers end-of-day soil nitrate")
{
    SoilParams sp;
    CropParams cp;
    const SoilState soil = initial_soil(sp);
    const CropState crop = growing_crop(soil);
    for (double rain : {0.0, 10.0, 90.0}) {
        double previous = -1.0;
        for (double n = 0.0; n <= 200.0; n += 10.0) {
            const DayResult r = advance_day(crop, soil, day(rain, 22, 30, 18), n, cp, sp);
            CHECK(r.soil.total_nitrate() >= previous);
            previous = r.soil.total_nitrate();
        }
    }
}

TEST_CASE("stress indices: abundant supply gives 1, no soil N gives 0")
{
    CropParams cp;
    SoilParams rich;
    rich.initial_nitrate = 500.0;
    SoilState soil = initial_soil(rich);
    CropState crop = growing_crop(soil);
    DayResult r = advance_day(crop, soil, day(10, 20, 28, 16), 0.0, cp, rich);
    CHECK(r.fluxes.n_demand > 0.0);
    CHECK(r.crop.nstres == doctest::Approx(1.0));
    CHECK(r.crop.swfac == doctest::Approx(1.0));

    SoilParams poor;
    poor.initial_nitrate = 0.0;
    poor.organic_n = 0.0;
    soil = initial_soil(poor);
    crop = growing_crop(soil);
    r = advance_day(crop, soil, day(10, 20, 28, 16), 0.0, cp, poor);
    CHECK(r.fluxes.n_demand > 0.0);
    CHECK(r.crop.nstres == 0.0);
}

TEST_CASE("broken input invariants raise a domain error")
{
    SoilParams sp;
    CropParams cp;
    SoilState soil = initial_soil(sp);
    const CropState crop = initial_crop(7.6);
    CHECK_THROWS_AS(advance_day(crop, soil, day(0, 10, 20, 10), -1.0, cp, sp), DomainError);
    CHECK_THROWS_AS(advance_day(crop, soil, day(0, 10, 5, 10), 0.0, cp, sp), DomainError);
    CHECK_THROWS_AS(advance_day(crop, soil, day(-1, 10, 20, 10), 0.0, cp, sp), DomainError);
    soil.nitrate[1] = -0.5;
    CHECK_THROWS_AS(advance_day(crop, soil, day(0, 10, 20, 10), 0.0, cp, sp), DomainError);
    soil = initial_soil(sp);
    CropState bad = crop;
    bad.topwt = 10.0;
    bad.grnwt = 20.0;
    CHECK_THROWS_AS(advance_day(bad, soil, day(0, 10, 20, 10), 0.0, cp, sp), DomainError);
}

TEST_CASE("three layers span the configured depth")
{
    SoilParams sp;
    sp.depth_cm = 180.0;
    const SoilState s = initial_soil(sp);
    CHECK(s.depth() == doctest::Approx(180.0));
    CHECK(s.thickness.size() == 3);
    sp.depth_cm = 0.0;
    CHECK_THROWS_AS(initial_soil(sp), ConfigError);
}

TEST_CASE("root fractions fill layers top-down")
{
    SoilParams sp;
    sp.depth_cm = 100.0; // 20/30/50
    const SoilState s = initial_soil(sp);
    const auto f = root_fractions(s, 35.0);
    CHECK(f[0] == 1.0);
    CHECK(f[1] == doctest::Approx(0.5));
    CHECK(f[2] == 0.0);
}
