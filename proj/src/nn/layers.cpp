#include "vqalab/nn/layers.hpp"

namespace vqalab::nn {

Linear::Linear(std::size_t in, std::size_t out, const InitMode& mode, std::uint64_t stream)
    : weight(Var::param(init_weights(in, out, mode, stream))),
      bias(Var::param(Tensor::zeros({out}))) {}

Linear::Linear(Tensor w, Tensor b) : weight(Var::param(std::move(w))), bias(Var::param(std::move(b))) {
    if (weight.value().rank() != 2 || bias.value().size() != weight.value().shape()[1])
        throw ShapeError("Linear: weight/bias shapes incompatible");
}

Var apply_act(const Var& x, Act act) {
    switch (act) {
        case Act::none: return x;
        case Act::tanh: return tanh_op(x);
        case Act::relu: return relu_op(x);
        case Act::sigmoid: return sigmoid_op(x);
        case Act::softmax: return softmax_rows(x);
    }
    throw ConfigError("unknown activation");
}

Mlp::Mlp(MlpConfig config, const InitMode& mode, std::uint64_t stream) : config_(std::move(config)) {
    if (config_.dims.size() < 2) throw ConfigError("Mlp: need at least input and output dims");
    for (std::size_t i = 0; i + 1 < config_.dims.size(); ++i)
        layers_.emplace_back(config_.dims[i], config_.dims[i + 1], mode,
                             stream * 131ull + i + 1);
}

Var Mlp::forward(const Var& input, bool train, Rng* rng) const {
    if (input.value().cols() != config_.dims[0])
        throw ShapeError("Mlp: input dim " + std::to_string(input.value().cols()) +
                         " does not match layer 0 input dim " + std::to_string(config_.dims[0]));
    Var x = input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (x.value().cols() != layers_[i].in_dim())
            throw ShapeError("Mlp: shape mismatch at layer " + std::to_string(i));
        x = layers_[i].apply(x);
        bool last = (i + 1 == layers_.size());
        if (!last) {
            if (config_.layernorm) x = layernorm_rows(x);
            x = apply_act(x, config_.hidden_act);
            if (config_.dropout_rate > 0.0 && train) {
                if (!rng) throw ConfigError("Mlp: dropout requires an rng in train mode");
                x = dropout(x, config_.dropout_rate, *rng, train);
            }
        } else {
            x = apply_act(x, config_.final_act);
        }
    }
    check_finite(x.value(), "Mlp forward output");
    return x;
}

std::vector<Var> Mlp::parameters() const {
    std::vector<Var> ps;
    for (const Linear& l : layers_) {
        ps.push_back(l.weight);
        ps.push_back(l.bias);
    }
    return ps;
}

}  // namespace vqalab::nn
