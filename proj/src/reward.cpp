#include "nitrogym/reward.hpp"

#include "nitrogym/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nitrogym {

void RewardConfig::validate() const
{
    if (w1 < 0.0 || w2 < 0.0 || w3 < 0.0 || w4 < 0.0) throw ConfigError("reward weights must be >= 0");
    if (!(threshold >= 0.0)) throw ConfigError("reward threshold must be >= 0");
}

RewardBreakdown daily_reward(double n_applied, double tleachd, double cumsumfert_incl_today, bool is_harvest,
                             double yield, const RewardConfig& cfg)
{
    if (!(n_applied >= 0.0) || !(tleachd >= 0.0) || !(cumsumfert_incl_today >= 0.0) || !(yield >= 0.0))
        throw DomainError("daily_reward: inputs must be >= 0");

    RewardBreakdown b;
    b.yield_term = is_harvest ? cfg.w1 * yield : 0.0;
    b.fert_term = cfg.w2 * n_applied;
    b.leach_term = cfg.w3 * tleachd;
    double overage = 0.0;
    if (n_applied != 0.0 && std::isfinite(cfg.threshold)) {
        overage = cumsumfert_incl_today - cfg.threshold;
        if (cfg.clamp_overage) overage = std::max(0.0, overage);
    }
    b.overage_term = cfg.w4 * overage;
    b.total = b.yield_term - b.fert_term - b.leach_term - b.overage_term;
    return b;
}

double episode_reward(std::span<const RewardBreakdown> per_day)
{
    if (per_day.empty()) throw DomainError("episode_reward: empty episode");
    double sum = 0.0;
    for (const auto& b : per_day) sum += b.total;
    return sum;
}

double reward_identity(double yield, double total_n, double total_leach, double total_overage, const RewardConfig& cfg)
{
    return cfg.w1 * yield - cfg.w2 * total_n - cfg.w3 * total_leach - cfg.w4 * total_overage;
}

} // namespace nitrogym
