#pragma once

#include <limits>
#include <span>

namespace nitrogym {

// Weights of the daily reward
//   r_t = [harvest] w1*Y - w2*a_t - w3*leach_t - w4*P_t
// where P_t = (cumulative N including today - threshold) on days with a_t != 0.
struct RewardConfig {
    double w1 = 0.1;
    double w2 = 0.1;
    double w3 = 0.1;
    double w4 = 1.0;
    double threshold = 240.0; // kg/ha
    bool clamp_overage = true;

    void validate() const;
};

struct RewardBreakdown {
    double yield_term = 0.0;
    double fert_term = 0.0;
    double leach_term = 0.0;
    double overage_term = 0.0;
    double total = 0.0;
};

RewardBreakdown daily_reward(double n_applied, double tleachd, double cumsumfert_incl_today, bool is_harvest,
                             double yield, const RewardConfig& cfg);

// Undiscounted sum of daily totals.
double episode_reward(std::span<const RewardBreakdown> per_day);

// Closed form of the episode reward: w1*Y - w2*sum(N) - w3*sum(leach) - w4*sum(P).
double reward_identity(double yield, double total_n, double total_leach, double total_overage, const RewardConfig& cfg);

} // namespace nitrogym
