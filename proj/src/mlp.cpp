#include "nitrogym/mlp.hpp"

#include "nitrogym/errors.hpp"

#include <cmath>

namespace nitrogym {

namespace {

void apply_activation(Eigen::MatrixXd& z, Activation a)
{
    switch (a) {
    case Activation::Relu: z = z.cwiseMax(0.0); break;
    case Activation::Tanh: z = z.array().tanh().matrix(); break;
    case Activation::Linear: break;
    }
}

// d(activation)/d(pre-activation), expressed through the post-activation value.
void scale_by_derivative(Eigen::MatrixXd& grad, const Eigen::MatrixXd& post, Activation a)
{
    switch (a) {
    case Activation::Relu: grad = (post.array() > 0.0).select(grad, 0.0); break;
    case Activation::Tanh: grad.array() *= 1.0 - post.array().square(); break;
    case Activation::Linear: break;
    }
}

Activation layer_activation(const MlpSpec& spec, std::size_t layer)
{
    return layer + 1 == spec.num_layers() ? spec.output : spec.hidden;
}

} // namespace

std::string to_string(Activation a)
{
    switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Linear: return "linear";
    }
    return "?";
}

Activation activation_from_string(const std::string& s)
{
    if (s == "relu") return Activation::Relu;
    if (s == "tanh") return Activation::Tanh;
    if (s == "linear") return Activation::Linear;
    throw ShapeError("unknown activation: " + s);
}

std::size_t MlpSpec::parameter_count() const
{
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
        n += static_cast<std::size_t>(layer_sizes[l + 1]) * (layer_sizes[l] + 1);
    return n;
}

void MlpSpec::validate() const
{
    if (layer_sizes.size() < 2) throw ShapeError("an MLP needs at least an input and an output layer");
    for (int s : layer_sizes)
        if (s < 1) throw ShapeError("layer sizes must be >= 1");
    if (hidden == Activation::Linear && layer_sizes.size() > 2)
        throw ShapeError("hidden activation must be relu or tanh");
    if (output != Activation::Linear) throw ShapeError("output activation must be linear");
}

ParamSet::ParamSet(MlpSpec spec) : spec_(std::move(spec))
{
    spec_.validate();
    values_.assign(spec_.parameter_count(), 0.0);
    build_offsets();
}

ParamSet::ParamSet(MlpSpec spec, std::vector<double> values)
    : spec_(std::move(spec)), values_(values.begin(), values.end())
{
    spec_.validate();
    if (values_.size() != spec_.parameter_count())
        throw ShapeError("parameter vector has " + std::to_string(values_.size()) + " values, spec needs " +
                         std::to_string(spec_.parameter_count()));
    build_offsets();
}

void ParamSet::build_offsets()
{
    offsets_.clear();
    std::size_t off = 0;
    for (std::size_t l = 0; l < spec_.num_layers(); ++l) {
        offsets_.push_back(off);
        off += static_cast<std::size_t>(spec_.layer_sizes[l + 1]) * (spec_.layer_sizes[l] + 1);
    }
}

std::size_t ParamSet::bias_offset(std::size_t layer) const
{
    return offsets_[layer] + static_cast<std::size_t>(spec_.layer_sizes[layer + 1]) * spec_.layer_sizes[layer];
}

ParamSet ParamSet::glorot_uniform(const MlpSpec& spec, std::mt19937_64& rng)
{
    ParamSet p(spec);
    for (std::size_t l = 0; l < spec.num_layers(); ++l) {
        const double fan_in = spec.layer_sizes[l];
        const double fan_out = spec.layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        auto w = p.weight(l);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    }
    return p;
}

RowMatrixMap ParamSet::weight(std::size_t l)
{
    return {values_.data() + offsets_[l], spec_.layer_sizes[l + 1], spec_.layer_sizes[l]};
}

ConstRowMatrixMap ParamSet::weight(std::size_t l) const
{
    return {values_.data() + offsets_[l], spec_.layer_sizes[l + 1], spec_.layer_sizes[l]};
}

VectorMap ParamSet::bias(std::size_t l)
{
    return {values_.data() + bias_offset(l), spec_.layer_sizes[l + 1]};
}

ConstVectorMap ParamSet::bias(std::size_t l) const
{
    return {values_.data() + bias_offset(l), spec_.layer_sizes[l + 1]};
}

bool ParamSet::all_finite() const
{
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

ForwardCache forward_cached(const ParamSet& params, const Eigen::MatrixXd& inputs)
{
    const auto& spec = params.spec();
    if (inputs.rows() != spec.input_size())
        throw ShapeError("input has " + std::to_string(inputs.rows()) + " features, network expects " +
                         std::to_string(spec.input_size()));
    ForwardCache cache;
    cache.activations.reserve(spec.num_layers() + 1);
    cache.activations.push_back(inputs);
    for (std::size_t l = 0; l < spec.num_layers(); ++l) {
        Eigen::MatrixXd z = params.weight(l) * cache.activations.back();
        z.colwise() += params.bias(l);
        apply_activation(z, layer_activation(spec, l));
        cache.activations.push_back(std::move(z));
    }
    return cache;
}

Eigen::MatrixXd forward_batch(const ParamSet& params, const Eigen::MatrixXd& inputs)
{
    const auto& spec = params.spec();
    if (inputs.rows() != spec.input_size())
        throw ShapeError("input has " + std::to_string(inputs.rows()) + " features, network expects " +
                         std::to_string(spec.input_size()));
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < spec.num_layers(); ++l) {
        Eigen::MatrixXd z = params.weight(l) * a;
        z.colwise() += params.bias(l);
        apply_activation(z, layer_activation(spec, l));
        a = std::move(z);
    }
    return a;
}

std::vector<double> forward(const ParamSet& params, std::span<const double> input)
{
    Eigen::MatrixXd x = ConstVectorMap(input.data(), static_cast<Eigen::Index>(input.size()));
    Eigen::MatrixXd y = forward_batch(params, x);
    return {y.data(), y.data() + y.size()};
}

std::vector<double> backward(const ParamSet& params, const ForwardCache& cache, const Eigen::MatrixXd& upstream,
                             Eigen::MatrixXd* input_grad)
{
    const auto& spec = params.spec();
    const auto& out = cache.output();
    if (upstream.rows() != out.rows() || upstream.cols() != out.cols())
        throw ShapeError("upstream gradient shape does not match network output");

    std::vector<double> grads(params.size(), 0.0);
    Eigen::MatrixXd delta = upstream;
    for (std::size_t l = spec.num_layers(); l-- > 0;) {
        scale_by_derivative(delta, cache.activations[l + 1], layer_activation(spec, l));
        RowMatrixMap gw(grads.data() + params.weight_offset(l), spec.layer_sizes[l + 1], spec.layer_sizes[l]);
        VectorMap gb(grads.data() + params.bias_offset(l), spec.layer_sizes[l + 1]);
        // Both are evaluated into aligned temporaries first: Eigen peels
        // unaligned destinations, and the peeled row sums add in a different
        // order, which would make results depend on heap layout.
        const Eigen::MatrixXd w_grad = delta * cache.activations[l].transpose();
        const Eigen::VectorXd b_grad = delta.rowwise().sum();
        gw = w_grad;
        gb = b_grad;
        if (l > 0 || input_grad) {
            Eigen::MatrixXd next = params.weight(l).transpose() * delta;
            delta = std::move(next);
        }
    }
    if (input_grad) *input_grad = std::move(delta);
    return grads;
}

std::vector<double> backward(const ParamSet& params, std::span<const double> input, std::span<const double> upstream)
{
    Eigen::MatrixXd x = ConstVectorMap(input.data(), static_cast<Eigen::Index>(input.size()));
    Eigen::MatrixXd g = ConstVectorMap(upstream.data(), static_cast<Eigen::Index>(upstream.size()));
    return backward(params, forward_cached(params, x), g);
}

void polyak_update(ParamSet& target, const ParamSet& online, double tau)
{
    if (!(target.spec() == online.spec())) throw ShapeError("polyak_update: network shapes differ");
    auto t = target.values();
    auto o = online.values();
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau * o[i] + (1.0 - tau) * t[i];
}

} // namespace nitrogym
