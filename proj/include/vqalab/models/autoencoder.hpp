#pragma once

#include <vector>

#include "vqalab/nn/layers.hpp"

namespace vqalab::models {

struct AutoencoderSpec {
    std::size_t input_dim = 0;   // concatenated image+question feature width
    std::size_t code_dim = 0;    // must be < input_dim
    std::size_t answer_vocab = 32;
    std::vector<std::size_t> encoder_hidden = {128};
    std::vector<std::size_t> classifier_hidden = {128};
    double dropout_rate = 0.0;
    nn::InitMode init;
};

struct AutoencoderOutput {
    nn::Var code;
    nn::Var reconstruction;
    nn::Var scores;
};

// Bottleneck embedding of the concatenated features plus a classifier head on
// the code.
class AutoencoderClassifier {
public:
    AutoencoderClassifier() = default;
    AutoencoderClassifier(AutoencoderSpec spec, std::uint64_t stream);

    AutoencoderOutput forward(const nn::Var& concat_features, nn::Rng& rng, bool train) const;

    std::vector<nn::Var> parameters() const;
    std::vector<nn::Var> autoencoder_parameters() const;  // encoder + decoder only
    const AutoencoderSpec& spec() const { return spec_; }

private:
    AutoencoderSpec spec_;
    nn::Mlp encoder_, decoder_, classifier_;
};

}  // namespace vqalab::models
