#pragma once

#include "nitrogym/crop_model.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace nitrogym {

// Daily state in the order of the state table.
struct StateVector {
    double cumsumfert = 0.0; // kg/ha
    int dap = 0;             // days after simulation start
    double dtt = 0.0;        // degC d
    int istage = 0;
    double vstage = 0.0;
    double pltpop = 0.0;     // plants/m2
    double rain = 0.0;       // mm/d
    double srad = 0.0;       // MJ/m2/d
    double tmax = 0.0;
    double tmin = 0.0;
    double nstres = 1.0;
    double pcngrn = 0.0;
    double swfac = 1.0;
    double tleachd = 0.0;    // kg/ha/d
    double grnwt = 0.0;      // kg/ha
    double cleach = 0.0;
    double cnox = 0.0;
    double tnoxd = 0.0;
    double trnu = 0.0;
    double wtnup = 0.0;
    double xlai = 0.0;
    double topwt = 0.0;
    double es = 0.0;         // mm/d
    double runoff = 0.0;
    double wtdep = 0.0;      // cm
    double rtdep = 0.0;
    double totaml = 0.0;     // kg N/ha
    LayerArray sw{};         // cm3/cm3 per layer

    bool operator==(const StateVector&) const = default;
};

enum class StateField : int {
    cumsumfert, dap, dtt, istage, vstage, pltpop, rain, srad, tmax, tmin,
    nstres, pcngrn, swfac, tleachd, grnwt, cleach, cnox, tnoxd, trnu, wtnup,
    xlai, topwt, es, runoff, wtdep, rtdep, totaml, sw,
};

inline constexpr std::size_t kStateFieldCount = 28;

struct FieldInfo {
    StateField field;
    std::string_view name;
    std::string_view unit;
    // Fixed affine scaling used when feeding networks: (x - offset) / scale.
    double offset;
    double scale;
};

const std::array<FieldInfo, kStateFieldCount>& state_fields();
const FieldInfo& field_info(StateField f);
StateField field_from_name(std::string_view name);

// Scalar fields read directly; `sw` has one value per layer.
std::vector<double> field_values(const StateVector& s, StateField f);

class ObservationMask {
public:
    ObservationMask() = default;
    explicit ObservationMask(std::vector<StateField> fields);

    // Throws MaskError on an unknown name.
    static ObservationMask from_names(const std::vector<std::string>& names);
    static ObservationMask full();
    static ObservationMask partial();
    static ObservationMask from_kind(const std::string& kind); // "full" | "partial"

    const std::vector<StateField>& fields() const { return fields_; }
    std::vector<std::string> names() const;
    // Length of the flattened observation.
    std::size_t size() const;
    bool operator==(const ObservationMask&) const = default;

private:
    std::vector<StateField> fields_;
};

// Values in mask order; `sw` expands to one entry per soil layer.
std::vector<double> observe(const StateVector& state, const ObservationMask& mask);

// observe() followed by the fixed per-field affine scaling.
std::vector<double> observe_normalized(const StateVector& state, const ObservationMask& mask);

} // namespace nitrogym
