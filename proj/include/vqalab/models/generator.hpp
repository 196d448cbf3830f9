#pragma once

#include <string>
#include <vector>

#include "vqalab/nn/layers.hpp"

namespace vqalab::models {

enum class GeneratorArch { simp, full };
enum class NoiseMode { N0, N1, N2 };

const char* arch_name(GeneratorArch a);
GeneratorArch arch_from_name(const std::string& name);
const char* noise_mode_name(NoiseMode m);
NoiseMode noise_mode_from_name(const std::string& name);

struct GeneratorSpec {
    GeneratorArch arch = GeneratorArch::full;
    NoiseMode noise_mode = NoiseMode::N0;
    std::size_t noise_dim = 8;  // Z, used by N1
    std::size_t fused_dim = 0;  // d_f (input condition width)
    std::size_t answer_vocab = 32;  // K
    std::vector<std::size_t> hidden = {256, 256, 256};  // full arch only
    double dropout_rate = 0.1;
    bool layernorm = false;
    nn::InitMode init;

    std::size_t input_dim() const {
        return noise_mode == NoiseMode::N1 ? fused_dim + noise_dim : fused_dim;
    }
};

// Answer-score generator. simp: one linear layer. full: three ReLU layers and
// a linear head. Noise enters per the configured mode: none (N0), concatenated
// (N1), or added to the condition (N2).
class Generator {
public:
    Generator() = default;
    Generator(GeneratorSpec spec, std::uint64_t stream);

    // Scores of length K. In eval mode (train=false) no noise is drawn and the
    // forward is a pure function of the condition.
    nn::Var forward(const nn::Var& fused, nn::Rng& rng, bool train) const;

    std::vector<nn::Var> parameters() const { return mlp_.parameters(); }
    const GeneratorSpec& spec() const { return spec_; }
    nn::Mlp& mlp() { return mlp_; }

private:
    GeneratorSpec spec_;
    nn::Mlp mlp_;
};

}  // namespace vqalab::models
