#pragma once

#include "nitrogym/state.hpp"

#include <array>

namespace nitrogym {

// Discrete fertilizer amounts, kg/ha.
inline constexpr std::array<double, 5> kActionAmounts = {0.0, 40.0, 80.0, 120.0, 160.0};
inline constexpr int kNumActions = static_cast<int>(kActionAmounts.size());

inline constexpr double kSacActionLow = 0.0;
inline constexpr double kSacActionHigh = 200.0;

double action_amount(int index); // throws DomainError outside [0, 5)

// Geometric exploration schedule decay^episode.
double epsilon_schedule(int episode, double decay);

// Nearest element of kActionAmounts to a continuous amount clamped to
// [0, 200]; exact midpoints go to the smaller amount.
double discretize_action(double amount);
int discretize_action_index(double amount);

// Fixed-stage baseline: applies `amount` once, on the first day with
// vstage >= 5.
class Vstage5Baseline {
public:
    explicit Vstage5Baseline(double amount);

    double amount() const { return amount_; }
    bool fired() const { return fired_; }
    void reset() { fired_ = false; }
    double act(const StateVector& state);

private:
    double amount_;
    bool fired_ = false;
};

// Stateless form: amount on a vstage >= 5 day when not yet fired, else 0.
double baseline_vstage5(const StateVector& state, double amount, bool already_fired);

inline constexpr double kBaselineVstage = 5.0;

} // namespace nitrogym
