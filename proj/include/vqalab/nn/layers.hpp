#pragma once

#include <string>
#include <vector>

#include "vqalab/nn/autodiff.hpp"
#include "vqalab/nn/init.hpp"

namespace vqalab::nn {

enum class Act { none, tanh, relu, sigmoid, softmax };

struct Linear {
    Var weight;  // [in, out]
    Var bias;    // [out]

    Linear() = default;
    Linear(std::size_t in, std::size_t out, const InitMode& mode, std::uint64_t stream);
    // Hand-set parameters (tests, toy traces).
    Linear(Tensor w, Tensor b);

    Var apply(const Var& x) const { return add_rows(matmul(x, weight), bias); }
    std::size_t in_dim() const { return weight.value().shape()[0]; }
    std::size_t out_dim() const { return weight.value().shape()[1]; }
};

struct MlpConfig {
    std::vector<std::size_t> dims;  // [in, h1, ..., out]
    Act hidden_act = Act::relu;
    Act final_act = Act::none;
    double dropout_rate = 0.0;  // applied after each hidden activation
    bool layernorm = false;     // applied after each hidden pre-activation
};

// Plain fully connected stack. Shape mismatches are reported with the
// offending layer index.
class Mlp {
public:
    Mlp() = default;
    Mlp(MlpConfig config, const InitMode& mode, std::uint64_t stream);

    Var forward(const Var& input, bool train, Rng* rng = nullptr) const;
    std::vector<Var> parameters() const;
    std::vector<Linear>& layers() { return layers_; }
    const MlpConfig& config() const { return config_; }

private:
    MlpConfig config_;
    std::vector<Linear> layers_;
};

Var apply_act(const Var& x, Act act);

}  // namespace vqalab::nn
