#pragma once

#include <string>
#include <vector>

#include "vqalab/nn/layers.hpp"

namespace vqalab::models {

enum class ConditionSource { fused, raw_concat };

const char* condition_source_name(ConditionSource s);
ConditionSource condition_source_from_name(const std::string& name);

struct DiscriminatorSpec {
    std::vector<std::size_t> hidden = {256, 128};
    std::size_t answer_vocab = 32;   // K
    std::size_t condition_dim = 0;
    ConditionSource condition_source = ConditionSource::fused;
    double input_noise_std = 0.1;    // sigma_d, train mode only
    double dropout_rate = 0.1;
    bool layernorm = false;
    bool softmax_answer_input = false;  // softmax generator scores before D sees them
    nn::InitMode init;
};

// Matching-aware discriminator: scores an (answer, condition) pair with a
// single sigmoid output in (0,1).
class Discriminator {
public:
    Discriminator() = default;
    Discriminator(DiscriminatorSpec spec, std::uint64_t stream);

    nn::Var forward(const nn::Var& answer, const nn::Var& condition, nn::Rng& rng,
                    bool train) const;
    // Variable-noise variant used by the decaying input-noise schedule.
    nn::Var forward_with_noise(const nn::Var& answer, const nn::Var& condition, nn::Rng& rng,
                               bool train, double noise_std) const;

    std::vector<nn::Var> parameters() const { return mlp_.parameters(); }
    const DiscriminatorSpec& spec() const { return spec_; }
    nn::Mlp& mlp() { return mlp_; }

private:
    DiscriminatorSpec spec_;
    nn::Mlp mlp_;
};

}  // namespace vqalab::models
