#include "nitrogym/crop_model.hpp"

#include "nitrogym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nitrogym {

namespace {

void check_inputs(const CropState& crop, const SoilState& soil, const DailyWeather& w, double n_applied)
{
    auto fail = [](const std::string& what) { throw DomainError("advance_day: " + what); };
    if (!(n_applied >= 0.0)) fail("n_applied must be >= 0");
    if (w.rain < 0.0 || w.srad < 0.0 || w.tmax < w.tmin) fail("weather violates rain>=0, srad>=0, tmax>=tmin");
    for (std::size_t i = 0; i < kSoilLayers; ++i) {
        if (soil.sw[i] < 0.0 || soil.sw[i] > soil.saturation[i] + 1e-12) fail("sw outside [0, saturation]");
        if (soil.nitrate[i] < 0.0) fail("negative nitrate");
        if (!(soil.thickness[i] > 0.0)) fail("layer thickness must be > 0");
    }
    if (soil.organic_n < 0.0) fail("negative organic N");
    if (crop.xlai < 0.0 || crop.topwt < 0.0 || crop.grnwt < 0.0 || crop.rtdep < 0.0 || crop.gdd < 0.0)
        fail("negative crop state");
    if (crop.grnwt > crop.topwt) fail("grnwt exceeds topwt");
    if (crop.rtdep > soil.depth() + 1e-9) fail("root depth exceeds soil depth");
}

double n_concentration(const CropState& crop, const CropParams& p)
{
    const double span = p.gdd_maturity - p.gdd_emergence;
    const double frac = span > 0.0 ? std::clamp((crop.gdd - p.gdd_emergence) / span, 0.0, 1.0) : 1.0;
    return p.n_conc_early + (p.n_conc_late - p.n_conc_early) * frac;
}

// Water balance. Updates soil.sw and fills the water terms of `fx`.
// `outflow` receives the drainage leaving each layer downward (mm).
// Returns the water stress index (actual / potential transpiration).
double water_balance(SoilState& soil, const CropState& crop, const DailyWeather& w, const SoilParams& sp,
                   const CropParams& cp, DailyFluxes& fx, LayerArray& outflow)
{
    LayerArray water{}, fc{}, sat{}, wp{};
    for (std::size_t i = 0; i < kSoilLayers; ++i) {
        const double mm_per_unit = soil.thickness[i] * 10.0;
        water[i] = soil.sw[i] * mm_per_unit;
        fc[i] = soil.field_capacity[i] * mm_per_unit;
        sat[i] = soil.saturation[i] * mm_per_unit;
        wp[i] = soil.wilting_point[i] * mm_per_unit;
    }

    fx.rain = w.rain;
    fx.runoff = std::max(0.0, w.rain - sp.runoff_threshold);
    double incoming = w.rain - fx.runoff;
    for (std::size_t i = 0; i < kSoilLayers && incoming > 0.0; ++i) {
        const double take = std::min(incoming, sat[i] - water[i]);
        water[i] += take;
        incoming -= take;
    }
    fx.runoff += incoming; // saturation excess

    // Soil evaporation from the evaporative zone of the top layer.
    const double zone = std::min(1.0, sp.evaporation_depth / soil.thickness[0]);
    const double air_dry = 0.5 * wp[0];
    const double available_surface = std::max(0.0, (water[0] - air_dry) * zone);
    fx.es = std::min(available_surface, sp.evaporation_coeff * w.srad / 2.45);
    water[0] -= fx.es;

    // Transpiration from the rooted part of each layer.
    double potential_ep = 0.0;
    if (crop.istage >= GrowthStage::Emerged && crop.istage < GrowthStage::Mature)
        potential_ep = cp.transpiration_coeff * w.srad / 2.45 * (1.0 - std::exp(-cp.extinction * crop.xlai));
    LayerArray extractable{};
    const LayerArray roots = root_fractions(soil, crop.rtdep);
    for (std::size_t i = 0; i < kSoilLayers; ++i)
        extractable[i] = cp.water_uptake_rate * std::max(0.0, water[i] - wp[i]) * roots[i];
    const double total_extractable = std::accumulate(extractable.begin(), extractable.end(), 0.0);
    fx.ep = std::min(potential_ep, total_extractable);
    if (fx.ep > 0.0)
        for (std::size_t i = 0; i < kSoilLayers; ++i) water[i] -= fx.ep * extractable[i] / total_extractable;

    // Drainage cascades downward; a layer only accepts what fits below saturation.
    for (std::size_t i = 0; i < kSoilLayers; ++i) {
        double d = sp.drainage_coeff * std::max(0.0, water[i] - fc[i]);
        if (i + 1 < kSoilLayers) {
            d = std::min(d, sat[i + 1] - water[i + 1]);
            d = std::max(d, 0.0);
            water[i + 1] += d;
        } else {
            fx.drainage = d;
        }
        water[i] -= d;
        outflow[i] = d;
    }

    for (std::size_t i = 0; i < kSoilLayers; ++i)
        soil.sw[i] = water[i] / (soil.thickness[i] * 10.0);
    return potential_ep > 0.0 ? fx.ep / potential_ep : 1.0;
}

} // namespace

double SoilState::total_water_mm() const
{
    double s = 0.0;
    for (std::size_t i = 0; i < kSoilLayers; ++i) s += layer_water_mm(i);
    return s;
}

double SoilState::total_nitrate() const
{
    return std::accumulate(nitrate.begin(), nitrate.end(), 0.0);
}

double SoilState::depth() const
{
    return std::accumulate(thickness.begin(), thickness.end(), 0.0);
}

SoilState initial_soil(const SoilParams& p)
{
    if (!(p.depth_cm > 0.0)) throw ConfigError("soil depth must be > 0");
    if (!(p.wilting_point >= 0.0 && p.wilting_point < p.field_capacity && p.field_capacity < p.saturation &&
          p.saturation <= 1.0))
        throw ConfigError("soil water limits must satisfy 0 <= wp < fc < saturation <= 1");
    const double frac_sum = std::accumulate(p.layer_fraction.begin(), p.layer_fraction.end(), 0.0);
    if (std::abs(frac_sum - 1.0) > 1e-9) throw ConfigError("soil layer fractions must sum to 1");
    const double share_sum = std::accumulate(p.initial_nitrate_share.begin(), p.initial_nitrate_share.end(), 0.0);
    if (std::abs(share_sum - 1.0) > 1e-9) throw ConfigError("initial nitrate shares must sum to 1");
    if (p.initial_nitrate < 0.0 || p.organic_n < 0.0) throw ConfigError("initial soil N pools must be >= 0");
    if (p.drainage_coeff <= 0.0 || p.drainage_coeff > 1.0) throw ConfigError("drainage_coeff must lie in (0,1]");

    SoilState s;
    const double init_sw = p.wilting_point + std::clamp(p.initial_water, 0.0, 1.0) * (p.field_capacity - p.wilting_point);
    for (std::size_t i = 0; i < kSoilLayers; ++i) {
        if (!(p.layer_fraction[i] > 0.0)) throw ConfigError("soil layer fractions must be > 0");
        s.thickness[i] = p.depth_cm * p.layer_fraction[i];
        s.wilting_point[i] = p.wilting_point;
        s.field_capacity[i] = p.field_capacity;
        s.saturation[i] = p.saturation;
        s.sw[i] = init_sw;
        s.nitrate[i] = p.initial_nitrate * p.initial_nitrate_share[i];
    }
    s.organic_n = p.organic_n;
    return s;
}

CropState initial_crop(double plant_density)
{
    if (!(plant_density > 0.0)) throw ConfigError("plant density must be > 0");
    CropState c;
    c.pltpop = plant_density;
    return c;
}

CropState sow(CropState crop)
{
    if (crop.istage == GrowthStage::Fallow) crop.istage = GrowthStage::Sown;
    return crop;
}

LayerArray root_fractions(const SoilState& soil, double rtdep)
{
    LayerArray f{};
    double top = 0.0;
    for (std::size_t i = 0; i < kSoilLayers; ++i) {
        const double bottom = top + soil.thickness[i];
        f[i] = std::clamp((rtdep - top) / soil.thickness[i], 0.0, 1.0);
        top = bottom;
    }
    return f;
}

CropState phenology_update(const CropState& crop, const DailyWeather& weather, const CropParams& p)
{
    CropState c = crop;
    c.dtt = std::max(0.0, 0.5 * (weather.tmax + weather.tmin) - p.base_temp);
    if (c.istage == GrowthStage::Fallow || c.istage == GrowthStage::Mature) return c;

    c.gdd += c.dtt;
    const std::array<std::pair<GrowthStage, double>, 5> thresholds = {{
        {GrowthStage::Emerged, p.gdd_emergence},
        {GrowthStage::Vegetative, p.gdd_end_juvenile},
        {GrowthStage::Flowering, p.gdd_flowering},
        {GrowthStage::GrainFill, p.gdd_grain_fill},
        {GrowthStage::Mature, p.gdd_maturity},
    }};
    for (const auto& [stage, gdd] : thresholds)
        if (c.gdd >= gdd && c.istage < stage) c.istage = stage;

    if (c.istage >= GrowthStage::Emerged)
        c.vstage = std::max(crop.vstage, std::min(p.max_leaves, (c.gdd - p.gdd_emergence) / p.phyllochron));
    return c;
}

DayResult advance_day(const CropState& crop, const SoilState& soil, const DailyWeather& w, double n_applied,
                      const CropParams& cp, const SoilParams& sp)
{
    check_inputs(crop, soil, w, n_applied);

    DayResult out{crop, soil, {}};
    SoilState& s = out.soil;
    DailyFluxes& fx = out.fluxes;

    // (1) fertilizer
    fx.fertilizer = n_applied;
    fx.volatilized = w.rain > 0.0 ? 0.0 : sp.volatilization_fraction * n_applied;
    s.nitrate[0] += n_applied - fx.volatilized;

    // (2) water
    LayerArray outflow{};
    const double swfac = water_balance(s, crop, w, sp, cp, fx, outflow);

    // (3) mineralization
    const double tavg = 0.5 * (w.tmax + w.tmin);
    fx.mineralized = std::min(s.organic_n, sp.mineralization_rate * std::pow(sp.mineralization_q10, (tavg - 20.0) / 10.0));
    s.organic_n -= fx.mineralized;
    s.nitrate[0] += fx.mineralized;

    // (4) leaching: nitrate moves with each layer's drainage
    for (std::size_t i = 0; i < kSoilLayers; ++i) {
        const double q = outflow[i];
        if (q <= 0.0) continue;
        const double moved = s.nitrate[i] * q / (s.layer_water_mm(i) + q);
        s.nitrate[i] -= moved;
        if (i + 1 < kSoilLayers) s.nitrate[i + 1] += moved;
        else fx.tleachd = moved;
    }

    // (5) denitrification near saturation
    for (std::size_t i = 0; i < kSoilLayers; ++i) {
        if (s.sw[i] > sp.denitrification_saturation * s.saturation[i]) {
            const double loss = sp.denitrification_fraction * s.nitrate[i];
            s.nitrate[i] -= loss;
            fx.tnoxd += loss;
        }
    }

    // (6) phenology and roots
    CropState& c = out.crop;
    const double vstage_before = crop.vstage;
    c = phenology_update(crop, w, cp);
    c.swfac = swfac;
    const bool growing = c.istage >= GrowthStage::Emerged && crop.istage < GrowthStage::Mature;
    if (c.istage >= GrowthStage::Sown && crop.istage < GrowthStage::Mature && c.dtt > 0.0)
        c.rtdep = std::min(s.depth(), c.rtdep + cp.root_growth);

    // (7) canopy and growth; stress carries yesterday's N index and today's water index
    const double stress = std::min(crop.nstres, swfac);
    if (growing) {
        if (c.istage < GrowthStage::Flowering) {
            c.xlai += std::max(0.0, c.vstage - vstage_before) * cp.leaf_area_per_leaf * c.pltpop * stress;
        } else if (c.istage >= GrowthStage::GrainFill) {
            if (crop.istage < GrowthStage::GrainFill) c.lai_at_grain_fill = c.xlai;
            const double span = cp.gdd_maturity - cp.gdd_grain_fill;
            const double frac = span > 0.0 ? std::clamp((c.gdd - cp.gdd_grain_fill) / span, 0.0, 1.0) : 1.0;
            c.xlai = c.lai_at_grain_fill * (1.0 - (1.0 - cp.senescence_floor) * frac);
        }
        const double intercepted = 1.0 - std::exp(-cp.extinction * c.xlai);
        fx.potential_growth = cp.rue * cp.par_fraction * w.srad * intercepted * 10.0; // g/m2 -> kg/ha
        fx.growth = fx.potential_growth * stress;
        c.topwt += fx.growth;
        double grain_increment = 0.0;
        if (c.istage >= GrowthStage::Flowering) {
            grain_increment = cp.grain_partition * fx.growth;
            c.grnwt += grain_increment;
        }

        // (8) N uptake from the rooted zone
        fx.n_demand = fx.potential_growth * n_concentration(c, cp);
        const LayerArray roots = root_fractions(s, c.rtdep);
        LayerArray reachable{};
        for (std::size_t i = 0; i < kSoilLayers; ++i) reachable[i] = s.nitrate[i] * roots[i];
        const double total_reachable = std::accumulate(reachable.begin(), reachable.end(), 0.0);
        fx.trnu = std::min(cp.uptake_rate * total_reachable, fx.n_demand);
        if (fx.trnu > 0.0)
            for (std::size_t i = 0; i < kSoilLayers; ++i)
                s.nitrate[i] -= fx.trnu * reachable[i] / total_reachable;
        c.nstres = fx.n_demand > 0.0 ? fx.trnu / fx.n_demand : 1.0;
        c.plant_n += fx.trnu;
        c.grain_n += cp.grain_n_conc * grain_increment * c.nstres;
        c.pcngrn = c.grnwt > 0.0 ? c.grain_n / c.grnwt : 0.0;
    } else {
        c.nstres = 1.0;
    }
    return out;
}

} // namespace nitrogym
