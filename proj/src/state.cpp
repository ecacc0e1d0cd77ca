#include "nitrogym/state.hpp"

#include "nitrogym/errors.hpp"

#include <algorithm>

namespace nitrogym {

namespace {

// Offsets/scales span plausible ranges for both preset sites.
constexpr std::array<FieldInfo, kStateFieldCount> kFields = {{
    {StateField::cumsumfert, "cumsumfert", "kg/ha", 0.0, 200.0},
    {StateField::dap, "dap", "d", 0.0, 100.0},
    {StateField::dtt, "dtt", "degC d", 0.0, 10.0},
    {StateField::istage, "istage", "-", 0.0, 3.0},
    {StateField::vstage, "vstage", "leaves", 0.0, 10.0},
    {StateField::pltpop, "pltpop", "plants/m2", 0.0, 8.0},
    {StateField::rain, "rain", "mm/d", 0.0, 20.0},
    {StateField::srad, "srad", "MJ/m2/d", 0.0, 20.0},
    {StateField::tmax, "tmax", "degC", 0.0, 30.0},
    {StateField::tmin, "tmin", "degC", 0.0, 20.0},
    {StateField::nstres, "nstres", "-", 0.0, 1.0},
    {StateField::pcngrn, "pcngrn", "-", 0.0, 0.01},
    {StateField::swfac, "swfac", "-", 0.0, 1.0},
    {StateField::tleachd, "tleachd", "kg/ha/d", 0.0, 2.0},
    {StateField::grnwt, "grnwt", "kg/ha", 0.0, 5000.0},
    {StateField::cleach, "cleach", "kg/ha", 0.0, 50.0},
    {StateField::cnox, "cnox", "kg/ha", 0.0, 20.0},
    {StateField::tnoxd, "tnoxd", "kg/ha/d", 0.0, 1.0},
    {StateField::trnu, "trnu", "kg/ha/d", 0.0, 5.0},
    {StateField::wtnup, "wtnup", "kg/ha", 0.0, 200.0},
    {StateField::xlai, "xlai", "m2/m2", 0.0, 3.0},
    {StateField::topwt, "topwt", "kg/ha", 0.0, 10000.0},
    {StateField::es, "es", "mm/d", 0.0, 3.0},
    {StateField::runoff, "runoff", "mm/d", 0.0, 10.0},
    {StateField::wtdep, "wtdep", "cm", 0.0, 200.0},
    {StateField::rtdep, "rtdep", "cm", 0.0, 100.0},
    {StateField::totaml, "totaml", "kg N/ha", 0.0, 5.0},
    {StateField::sw, "sw", "cm3/cm3", 0.0, 0.3},
}};

constexpr std::array<StateField, 10> kPartialFields = {
    StateField::cumsumfert, StateField::dap, StateField::dtt, StateField::istage, StateField::vstage,
    StateField::pltpop, StateField::rain, StateField::srad, StateField::tmax, StateField::tmin,
};

double scalar_value(const StateVector& s, StateField f)
{
    switch (f) {
    case StateField::cumsumfert: return s.cumsumfert;
    case StateField::dap: return s.dap;
    case StateField::dtt: return s.dtt;
    case StateField::istage: return s.istage;
    case StateField::vstage: return s.vstage;
    case StateField::pltpop: return s.pltpop;
    case StateField::rain: return s.rain;
    case StateField::srad: return s.srad;
    case StateField::tmax: return s.tmax;
    case StateField::tmin: return s.tmin;
    case StateField::nstres: return s.nstres;
    case StateField::pcngrn: return s.pcngrn;
    case StateField::swfac: return s.swfac;
    case StateField::tleachd: return s.tleachd;
    case StateField::grnwt: return s.grnwt;
    case StateField::cleach: return s.cleach;
    case StateField::cnox: return s.cnox;
    case StateField::tnoxd: return s.tnoxd;
    case StateField::trnu: return s.trnu;
    case StateField::wtnup: return s.wtnup;
    case StateField::xlai: return s.xlai;
    case StateField::topwt: return s.topwt;
    case StateField::es: return s.es;
    case StateField::runoff: return s.runoff;
    case StateField::wtdep: return s.wtdep;
    case StateField::rtdep: return s.rtdep;
    case StateField::totaml: return s.totaml;
    case StateField::sw: break;
    }
    throw MaskError("sw is not a scalar field");
}

} // namespace

const std::array<FieldInfo, kStateFieldCount>& state_fields() { return kFields; }

const FieldInfo& field_info(StateField f) { return kFields[static_cast<std::size_t>(f)]; }

StateField field_from_name(std::string_view name)
{
    for (const auto& info : kFields)
        if (info.name == name) return info.field;
    throw MaskError("unknown state field: " + std::string(name));
}

std::vector<double> field_values(const StateVector& s, StateField f)
{
    if (f == StateField::sw) return {s.sw.begin(), s.sw.end()};
    return {scalar_value(s, f)};
}

ObservationMask::ObservationMask(std::vector<StateField> fields) : fields_(std::move(fields))
{
    for (auto f : fields_)
        if (static_cast<std::size_t>(f) >= kStateFieldCount) throw MaskError("state field out of range");
}

ObservationMask ObservationMask::from_names(const std::vector<std::string>& names)
{
    std::vector<StateField> fields;
    fields.reserve(names.size());
    for (const auto& n : names) fields.push_back(field_from_name(n));
    return ObservationMask(std::move(fields));
}

ObservationMask ObservationMask::full()
{
    std::vector<StateField> fields;
    for (const auto& info : kFields) fields.push_back(info.field);
    return ObservationMask(std::move(fields));
}

ObservationMask ObservationMask::partial()
{
    return ObservationMask(std::vector<StateField>(kPartialFields.begin(), kPartialFields.end()));
}

ObservationMask ObservationMask::from_kind(const std::string& kind)
{
    if (kind == "full") return full();
    if (kind == "partial") return partial();
    throw ConfigError("unknown observation kind: " + kind + " (expected full|partial)");
}

std::vector<std::string> ObservationMask::names() const
{
    std::vector<std::string> out;
    for (auto f : fields_) out.emplace_back(field_info(f).name);
    return out;
}

std::size_t ObservationMask::size() const
{
    std::size_t n = 0;
    for (auto f : fields_) n += f == StateField::sw ? kSoilLayers : 1;
    return n;
}

std::vector<double> observe(const StateVector& state, const ObservationMask& mask)
{
    std::vector<double> out;
    out.reserve(mask.size());
    for (auto f : mask.fields()) {
        auto v = field_values(state, f);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

std::vector<double> observe_normalized(const StateVector& state, const ObservationMask& mask)
{
    std::vector<double> out;
    out.reserve(mask.size());
    for (auto f : mask.fields()) {
        const auto& info = field_info(f);
        for (double v : field_values(state, f)) out.push_back((v - info.offset) / info.scale);
    }
    return out;
}

} // namespace nitrogym
