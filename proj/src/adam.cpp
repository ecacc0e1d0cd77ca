#include "nitrogym/adam.hpp"

#include "nitrogym/errors.hpp"

#include <cmath>

namespace nitrogym {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state)
{
    if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size())
        throw ShapeError("adam_step: parameter, gradient and moment sizes differ");
    for (double g : grads)
        if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");

    const auto& c = state.config;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grads[i];
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / correction1;
        const double v_hat = state.v[i] / correction2;
        params[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
}

} // namespace nitrogym
