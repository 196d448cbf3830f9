#pragma once

#include <vector>

#include "vqalab/data/dataset.hpp"
#include "vqalab/fusion/fusion.hpp"
#include "vqalab/models/discriminator.hpp"
#include "vqalab/models/generator.hpp"
#include "vqalab/nn/rnn.hpp"

namespace vqalab::train {

struct VqaEncoderConfig {
    std::size_t vocab = 32;
    std::size_t embed_dim = 16;
    std::size_t rnn_hidden = 32;
    std::size_t d_i = 32;
    fusion::Strategy strategy = fusion::Strategy::simple;
    std::size_t d_f = 64;
    std::size_t d_s = 128;
    nn::InitMode init;
};

// Shared image-question encoder: trained RNN over the question tokens plus one
// of the fusion strategies over (image features, question feature).
class VqaEncoder {
public:
    VqaEncoder() = default;
    VqaEncoder(const VqaEncoderConfig& cfg, std::uint64_t stream);

    nn::Var encode(const data::VqaRecord& rec) const;
    std::size_t out_dim() const { return fuser_.out_dim(); }
    std::vector<nn::Var> parameters() const;
    const VqaEncoderConfig& config() const { return cfg_; }
    nn::RnnEncoder& rnn() { return rnn_; }
    const nn::RnnEncoder& rnn() const { return rnn_; }
    fusion::Fuser& fuser() { return fuser_; }

private:
    VqaEncoderConfig cfg_;
    nn::RnnEncoder rnn_;
    fusion::Fuser fuser_;
};

struct GanClsConfig {
    double alpha = 0.01;
    std::size_t batch = 32;
    std::size_t steps = 2000;
    double disc_noise_start = 0.1;  // sigma_d decays linearly to disc_noise_end
    double disc_noise_end = 0.0;
    double clamp_eps = 1e-7;
    // The update direction as literally written descends both objectives;
    // default follows GAN convention and ascends them instead.
    bool descent_updates = false;
    bool smooth_targets = false;
    double smooth = 0.9;
};

struct StepLosses {
    double l_d = 0.0;
    double l_g = 0.0;
    long saturation = 0;
};

struct LossRow {
    std::size_t step;
    double l_d;  // task loss for non-adversarial trainers
    double l_g;
    long saturation;
};

struct GanClsState {
    models::Generator generator;
    models::Discriminator discriminator;
    VqaEncoder encoder;
    std::size_t step = 0;
    GanClsConfig config;
    std::uint64_t seed = 0;
    std::vector<LossRow> loss_log;

    std::vector<nn::Var> generator_side_params();  // G + encoder
    std::vector<nn::Var> discriminator_params();
    std::vector<nn::Var> all_params();
};

// One GAN-CLS minibatch step: discriminator update from (s_r, s_w, s_f), then
// generator (and encoder) update from the refreshed s_f. Appends to the loss
// log and advances the step counter.
StepLosses gan_cls_step(GanClsState& state, const std::vector<const data::VqaRecord*>& batch,
                        nn::Rng& step_rng);

// Loss evaluation on the same batch/noise stream without any parameter update.
StepLosses eval_gan_losses(GanClsState& state, const std::vector<const data::VqaRecord*>& batch,
                           nn::Rng& step_rng);

struct PretrainPlan {
    bool pretrain_generator = false;
    bool pretrain_discriminator = false;
    double g_input_noise_std = 0.1;
    double d_input_noise_std = 0.1;
    std::size_t pretrain_steps = 0;
};

// Softmax-classifier pretraining of the generator (and encoder) with Gaussian
// noise added to the fused embedding. Returns per-step cross-entropy.
std::vector<double> pretrain_generator(GanClsState& state,
                                       const std::vector<data::VqaRecord>& dataset,
                                       const PretrainPlan& plan, nn::Rng& rng);

// Trains the discriminator to separate matched from mismatched (answer,
// condition) pairs under input noise; the encoder stays frozen.
std::vector<double> pretrain_discriminator(GanClsState& state,
                                           const std::vector<data::VqaRecord>& dataset,
                                           const PretrainPlan& plan, nn::Rng& rng);

// One-hot (or smoothed) answer embedding presented to the discriminator.
nn::Tensor answer_embedding(int answer, std::size_t vocab, bool smooth, double smooth_value);

}  // namespace vqalab::train
