#include "nitrogym/policies.hpp"

#include "nitrogym/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nitrogym {

double action_amount(int index)
{
    if (index < 0 || index >= kNumActions) throw DomainError("action index out of range: " + std::to_string(index));
    return kActionAmounts[static_cast<std::size_t>(index)];
}

double epsilon_schedule(int episode, double decay)
{
    if (episode < 0) throw DomainError("epsilon_schedule: episode must be >= 0");
    if (!(decay > 0.0 && decay < 1.0)) throw DomainError("epsilon_schedule: decay must lie in (0,1)");
    return std::pow(decay, episode);
}

int discretize_action_index(double amount)
{
    if (std::isnan(amount)) throw DomainError("discretize_action: NaN amount");
    const double a = std::clamp(amount, kSacActionLow, kSacActionHigh);
    int best = 0;
    double best_dist = std::abs(a - kActionAmounts[0]);
    for (int i = 1; i < kNumActions; ++i) {
        const double d = std::abs(a - kActionAmounts[static_cast<std::size_t>(i)]);
        if (d < best_dist) {
            best = i;
            best_dist = d;
        }
    }
    return best;
}

double discretize_action(double amount)
{
    return kActionAmounts[static_cast<std::size_t>(discretize_action_index(amount))];
}

double baseline_vstage5(const StateVector& state, double amount, bool already_fired)
{
    if (!(amount >= 0.0)) throw DomainError("baseline amount must be >= 0");
    return !already_fired && state.vstage >= kBaselineVstage ? amount : 0.0;
}

Vstage5Baseline::Vstage5Baseline(double amount) : amount_(amount)
{
    if (!(amount >= 0.0)) throw DomainError("baseline amount must be >= 0");
}

double Vstage5Baseline::act(const StateVector& state)
{
    const double a = baseline_vstage5(state, amount_, fired_);
    if (!fired_ && state.vstage >= kBaselineVstage) fired_ = true;
    return a;
}

} // namespace nitrogym
