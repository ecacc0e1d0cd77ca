#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace nitrogym {

enum class Activation { Relu, Tanh, Linear };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct MlpSpec {
    std::vector<int> layer_sizes;           // input, hidden..., output
    Activation hidden = Activation::Relu;
    Activation output = Activation::Linear; // only linear outputs are supported

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    std::size_t num_layers() const { return layer_sizes.size() - 1; } // weight layers
    std::size_t parameter_count() const;
    void validate() const; // throws ShapeError
    bool operator==(const MlpSpec&) const = default;
};

using RowMatrixMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMatrixMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

// Flat parameter storage: for each layer the weight matrix (out x in,
// row-major) followed by its bias vector.
class ParamSet {
public:
    ParamSet() = default;
    explicit ParamSet(MlpSpec spec); // zero-initialized
    ParamSet(MlpSpec spec, std::vector<double> values);

    // Uniform fan-in/fan-out scaling, zero biases.
    static ParamSet glorot_uniform(const MlpSpec& spec, std::mt19937_64& rng);

    const MlpSpec& spec() const { return spec_; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    RowMatrixMap weight(std::size_t layer);
    ConstRowMatrixMap weight(std::size_t layer) const;
    VectorMap bias(std::size_t layer);
    ConstVectorMap bias(std::size_t layer) const;

    // Offsets of a layer's weights and bias inside values().
    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const;

    bool all_finite() const;
    bool operator==(const ParamSet& o) const { return spec_ == o.spec_ && values_ == o.values_; }

private:
    void build_offsets();

    MlpSpec spec_;
    // Fixed alignment keeps Eigen's vectorized reductions in the same order
    // whichever thread or arena allocated the storage.
    std::vector<double, Eigen::aligned_allocator<double>> values_;
    std::vector<std::size_t> offsets_;
};

// Post-activation outputs of every layer for one batch (column per sample);
// activations[0] is the input.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> activations;
    const Eigen::MatrixXd& output() const { return activations.back(); }
};

std::vector<double> forward(const ParamSet& params, std::span<const double> input);
Eigen::MatrixXd forward_batch(const ParamSet& params, const Eigen::MatrixXd& inputs);
ForwardCache forward_cached(const ParamSet& params, const Eigen::MatrixXd& inputs);

// Reverse-mode gradients of sum_b <upstream_b, output_b> with respect to the
// flat parameters (same layout as ParamSet). If `input_grad` is given it
// receives the gradient with respect to the inputs.
std::vector<double> backward(const ParamSet& params, const ForwardCache& cache, const Eigen::MatrixXd& upstream,
                             Eigen::MatrixXd* input_grad = nullptr);

// Single-sample convenience form.
std::vector<double> backward(const ParamSet& params, std::span<const double> input, std::span<const double> upstream);

// Same-shape polyak average: target <- tau * online + (1 - tau) * target.
void polyak_update(ParamSet& target, const ParamSet& online, double tau);

} // namespace nitrogym
