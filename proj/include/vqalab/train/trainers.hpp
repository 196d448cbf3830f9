#pragma once

#include <vector>

#include "vqalab/models/autoencoder.hpp"
#include "vqalab/models/coattention.hpp"
#include "vqalab/train/gan_cls.hpp"

namespace vqalab::train {

// Lowest index wins ties.
std::size_t argmax(const nn::Tensor& scores);

// Eval-mode answer prediction for the generator family (no noise, no dropout).
int predict_generator(const VqaEncoder& encoder, const models::Generator& generator,
                      const data::VqaRecord& rec);

// ---- autoencoder route ----------------------------------------------------

struct AutoencoderTrainConfig {
    double alpha = 0.01;
    std::size_t batch = 32;
    std::size_t steps = 2000;
    double lambda = 1.0;  // weight of the classification term
};

struct AutoencoderVqaModel {
    nn::RnnEncoder rnn;
    models::AutoencoderClassifier autoencoder;

    nn::Var concat_features(const data::VqaRecord& rec) const;
    int predict(const data::VqaRecord& rec) const;
    std::vector<nn::Var> parameters() const;
};

// Minimizes MSE(reconstruction) + lambda * cross-entropy(scores).
std::vector<LossRow> train_autoencoder_vqa(AutoencoderVqaModel& model,
                                           const std::vector<data::VqaRecord>& dataset,
                                           const AutoencoderTrainConfig& cfg, nn::Rng& rng);

// ---- co-attention route -----------------------------------------------------

struct AttentionTrainConfig {
    double alpha = 0.01;
    std::size_t batch = 32;
    std::size_t steps = 2000;
};

struct AttentionVqaModel {
    nn::Var embed;  // [vocab, word_dim] learned word features
    models::CoattentionModel model;
    std::size_t regions = 4;

    models::CoattentionOutput forward(const data::VqaRecord& rec, nn::Rng& rng, bool train) const;
    int predict(const data::VqaRecord& rec) const;
    std::vector<nn::Var> parameters() const;
};

AttentionVqaModel make_attention_model(std::size_t vocab, std::size_t word_dim,
                                       std::size_t regions, models::CoattentionSpec spec,
                                       std::uint64_t stream);

// Cross-entropy training of the co-attention scores.
std::vector<LossRow> train_attention(AttentionVqaModel& model,
                                     const std::vector<data::VqaRecord>& dataset,
                                     const AttentionTrainConfig& cfg, nn::Rng& rng);

}  // namespace vqalab::train
