#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the code under test beyond reading plain state.

#include "nitrogym/crop_model.hpp"
#include "nitrogym/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline double profile_water_mm(const nitrogym::SoilState& s)
{
    double w = 0.0;
    for (std::size_t i = 0; i < nitrogym::kSoilLayers; ++i) w += s.sw[i] * s.thickness[i] * 10.0;
    return w;
}

inline double profile_nitrate(const nitrogym::SoilState& s)
{
    double n = 0.0;
    for (double x : s.nitrate) n += x;
    return n;
}

struct Balance {
    double residual = 0.0; // inputs - outputs - change in storage
    double scale = 0.0;    // sum of magnitudes of every term
    double relative() const { return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual); }
};

// fertilizer + mineralization = dNitrate + uptake + leaching + denitrification + volatilization
inline Balance nitrogen_balance(const nitrogym::SoilState& before, const nitrogym::SoilState& after,
                                const nitrogym::DailyFluxes& f)
{
    const double d = profile_nitrate(after) - profile_nitrate(before);
    const double in = f.fertilizer + f.mineralized;
    const double out = f.trnu + f.tleachd + f.tnoxd + f.volatilized;
    return {in - out - d, std::abs(f.fertilizer) + std::abs(f.mineralized) + std::abs(f.trnu) + std::abs(f.tleachd) +
                              std::abs(f.tnoxd) + std::abs(f.volatilized) + std::abs(d) + profile_nitrate(before)};
}

// rain = dStorage + runoff + evaporation + transpiration + drainage
inline Balance water_balance(const nitrogym::SoilState& before, const nitrogym::SoilState& after,
                             const nitrogym::DailyFluxes& f)
{
    const double d = profile_water_mm(after) - profile_water_mm(before);
    const double out = f.runoff + f.es + f.ep + f.drainage;
    return {f.rain - out - d, std::abs(f.rain) + std::abs(f.runoff) + std::abs(f.es) + std::abs(f.ep) +
                                  std::abs(f.drainage) + std::abs(d) + profile_water_mm(before)};
}

// Central finite-difference gradient of sum(upstream .* f(params)) with
// respect to every parameter.
inline std::vector<double> finite_difference_gradient(nitrogym::ParamSet params, const std::vector<double>& input,
                                                      const std::vector<double>& upstream, double h)
{
    auto objective = [&](const nitrogym::ParamSet& p) {
        const auto y = nitrogym::forward(p, input);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += upstream[i] * y[i];
        return s;
    };
    std::vector<double> g(params.size());
    auto v = params.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double orig = v[i];
        v[i] = orig + h;
        const double up = objective(params);
        v[i] = orig - h;
        const double down = objective(params);
        v[i] = orig;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

// Deterministic chain: states 0..n-1, start at 0, actions 0 (left) and 1
// (right). Moving right from n-2 reaches the terminal state n-1 with reward
// 1; stepping left from 0 stays at 0. Every other step pays `step_cost`.
// Episodes are cut at `horizon` steps.
struct ChainMdp {
    int n = 5;
    double step_reward = 0.0;
    double terminal_reward = 1.0;
    int horizon = 20;

    struct Step {
        int next;
        double reward;
        bool done;
    };
    Step step(int s, int a) const
    {
        const int next = a == 1 ? s + 1 : std::max(0, s - 1);
        if (next == n - 1) return {next, terminal_reward, true};
        return {next, step_reward, false};
    }
};

// Value iteration on the chain; returns the optimal action per
// non-terminal state (ties to the lower index) and the optimal values.
inline std::vector<int> chain_optimal_policy(const ChainMdp& m, double gamma, std::vector<double>* values = nullptr)
{
    std::vector<double> v(static_cast<std::size_t>(m.n), 0.0);
    for (int it = 0; it < 10000; ++it) {
        double delta = 0.0;
        for (int s = 0; s < m.n - 1; ++s) {
            double best = -1e300;
            for (int a = 0; a < 2; ++a) {
                const auto r = m.step(s, a);
                best = std::max(best, r.reward + (r.done ? 0.0 : gamma * v[static_cast<std::size_t>(r.next)]));
            }
            delta = std::max(delta, std::abs(best - v[static_cast<std::size_t>(s)]));
            v[static_cast<std::size_t>(s)] = best;
        }
        if (delta < 1e-14) break;
    }
    std::vector<int> pi(static_cast<std::size_t>(m.n - 1));
    for (int s = 0; s < m.n - 1; ++s) {
        double best = -1e300;
        for (int a = 0; a < 2; ++a) {
            const auto r = m.step(s, a);
            const double q = r.reward + (r.done ? 0.0 : gamma * v[static_cast<std::size_t>(r.next)]);
            if (q > best + 1e-12) {
                best = q;
                pi[static_cast<std::size_t>(s)] = a;
            }
        }
    }
    if (values) *values = v;
    return pi;
}

inline std::vector<double> one_hot(int index, int size)
{
    std::vector<double> v(static_cast<std::size_t>(size), 0.0);
    v[static_cast<std::size_t>(index)] = 1.0;
    return v;
}

// Nearest element of a sorted set by exhaustive search; ties go to the
// earlier (smaller) element.
inline double brute_force_nearest(double x, const std::vector<double>& set)
{
    double best = set.front();
    for (double c : set)
        if (std::abs(x - c) < std::abs(x - best)) best = c;
    return best;
}

} // namespace oracle
