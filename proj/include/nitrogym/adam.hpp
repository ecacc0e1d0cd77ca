#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nitrogym {

struct AdamConfig {
    double learning_rate = 5e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t step = 0;

    AdamState() = default;
    AdamState(std::size_t n, AdamConfig cfg) : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

// Bias-corrected Adam update in place. Throws NumericError on non-finite
// gradients and ShapeError on size mismatch.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

} // namespace nitrogym
