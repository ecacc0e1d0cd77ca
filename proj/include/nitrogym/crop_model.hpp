#pragma once

#include "nitrogym/weather.hpp"

#include <array>
#include <cstddef>

namespace nitrogym {

inline constexpr std::size_t kSoilLayers = 3;
using LayerArray = std::array<double, kSoilLayers>;

// Phenological stage index. Values only ever increase within a season.
enum class GrowthStage : int {
    Fallow = 0,     // before planting
    Sown = 1,       // planted, not yet emerged
    Emerged = 2,    // emergence to end of juvenile phase
    Vegetative = 3, // end of juvenile phase to flowering
    Flowering = 4,
    GrainFill = 5,
    Mature = 6,
};

struct CropParams {
    double base_temp = 8.0;     // degC
    double phyllochron = 43.0;  // degC d per leaf
    double max_leaves = 20.0;
    // Cumulative GDD after sowing at which each stage begins.
    double gdd_emergence = 60.0;
    double gdd_end_juvenile = 250.0;
    double gdd_flowering = 760.0;
    double gdd_grain_fill = 860.0;
    double gdd_maturity = 1650.0;

    double rue = 3.3;              // g dry matter per MJ intercepted PAR
    double par_fraction = 0.5;     // PAR share of global radiation
    double extinction = 0.6;
    double leaf_area_per_leaf = 0.035; // m2 per leaf per plant
    double senescence_floor = 0.2;     // LAI fraction retained at maturity
    double grain_partition = 0.5;
    double grain_n_conc = 0.0125;
    double n_conc_early = 0.025;   // N demand per unit potential biomass at emergence
    double n_conc_late = 0.003;    // ... and at maturity
    double uptake_rate = 0.3;      // 1/d, fraction of root-zone nitrate reachable per day
    double root_growth = 1.5;      // cm per day with positive dtt
    double transpiration_coeff = 0.6;
    double water_uptake_rate = 0.12; // 1/d, fraction of plant-available water extractable
};

struct SoilParams {
    double depth_cm = 151.0;
    LayerArray layer_fraction = {0.2, 0.3, 0.5};
    double wilting_point = 0.13;
    double field_capacity = 0.30;
    double saturation = 0.45;
    double drainage_coeff = 0.3;  // share of water above field capacity draining per day
    double initial_water = 1.0;   // 0 = wilting point, 1 = field capacity
    double initial_nitrate = 60.0; // kg N/ha over the profile
    LayerArray initial_nitrate_share = {0.5, 0.3, 0.2};
    double organic_n = 3000.0;    // kg N/ha
    double runoff_threshold = 40.0; // mm
    double evaporation_coeff = 0.6;
    double evaporation_depth = 10.0; // cm of the top layer that can dry by evaporation
    double volatilization_fraction = 0.02;
    double mineralization_rate = 0.05; // kg N/ha/d at 20 degC
    double mineralization_q10 = 2.0;
    double denitrification_fraction = 0.02;
    double denitrification_saturation = 0.95;
};

struct SoilState {
    LayerArray thickness{};  // cm
    LayerArray sw{};         // cm3/cm3
    LayerArray nitrate{};    // kg N/ha
    LayerArray wilting_point{};
    LayerArray field_capacity{};
    LayerArray saturation{};
    double organic_n = 0.0;

    double layer_water_mm(std::size_t i) const { return sw[i] * thickness[i] * 10.0; }
    double total_water_mm() const;
    double total_nitrate() const;
    double depth() const;
};

struct CropState {
    GrowthStage istage = GrowthStage::Fallow;
    double gdd = 0.0;      // cumulative since sowing
    double dtt = 0.0;      // today's thermal time
    double vstage = 0.0;
    double pltpop = 0.0;
    double xlai = 0.0;
    double lai_at_grain_fill = 0.0;
    double topwt = 0.0;
    double grnwt = 0.0;
    double rtdep = 0.0;
    double plant_n = 0.0;
    double grain_n = 0.0;
    double pcngrn = 0.0;
    double nstres = 1.0;
    double swfac = 1.0;
};

struct DailyFluxes {
    double fertilizer = 0.0;   // kg N/ha added
    double volatilized = 0.0;
    double mineralized = 0.0;
    double tleachd = 0.0;
    double tnoxd = 0.0;
    double trnu = 0.0;
    double rain = 0.0;         // mm
    double runoff = 0.0;
    double es = 0.0;
    double ep = 0.0;           // transpiration
    double drainage = 0.0;     // out of the profile bottom
    double potential_growth = 0.0; // kg/ha
    double growth = 0.0;
    double n_demand = 0.0;
};

struct DayResult {
    CropState crop;
    SoilState soil;
    DailyFluxes fluxes;
};

SoilState initial_soil(const SoilParams& params);
CropState initial_crop(double plant_density);

// Puts a fallow crop in the ground. No-op for a crop that is already sown.
CropState sow(CropState crop);

// Thermal time, cumulative GDD, istage and vstage. Fallow and mature crops
// only get today's dtt.
CropState phenology_update(const CropState& crop, const DailyWeather& weather, const CropParams& params);

// One simulated day. Order: fertilizer + volatilization, water balance,
// mineralization, leaching, denitrification, phenology, growth, N uptake.
DayResult advance_day(const CropState& crop, const SoilState& soil, const DailyWeather& weather, double n_applied,
                      const CropParams& crop_params, const SoilParams& soil_params);

// Fraction of each layer occupied by roots.
LayerArray root_fractions(const SoilState& soil, double rtdep);

} // namespace nitrogym
