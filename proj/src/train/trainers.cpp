#include "vqalab/train/trainers.hpp"

#include <algorithm>

#include "vqalab/nn/optim.hpp"

namespace vqalab::train {

using nn::Rng;
using nn::Tensor;
using nn::Var;

std::size_t argmax(const Tensor& scores) {
    return static_cast<std::size_t>(
        std::max_element(scores.data().begin(), scores.data().end()) - scores.data().begin());
}

int predict_generator(const VqaEncoder& encoder, const models::Generator& generator,
                      const data::VqaRecord& rec) {
    Rng unused(0);
    Var h = encoder.encode(rec);
    Var scores = generator.forward(h, unused, false);
    return static_cast<int>(argmax(scores.value()));
}

namespace {

std::vector<const data::VqaRecord*> draw_batch(const std::vector<data::VqaRecord>& dataset,
                                               std::size_t batch, Rng& rng) {
    std::vector<const data::VqaRecord*> out(batch);
    for (auto& p : out) p = &dataset[rng.below(dataset.size())];
    return out;
}

}  // namespace

// ---- autoencoder route ------------------------------------------------------

Var AutoencoderVqaModel::concat_features(const data::VqaRecord& rec) const {
    Var img = Var::constant(Tensor::vec(rec.image_features));
    return nn::concat_vec(img, rnn.encode(rec.question_tokens));
}

int AutoencoderVqaModel::predict(const data::VqaRecord& rec) const {
    Rng unused(0);
    auto out = autoencoder.forward(concat_features(rec), unused, false);
    return static_cast<int>(argmax(out.scores.value()));
}

std::vector<Var> AutoencoderVqaModel::parameters() const {
    std::vector<Var> ps = rnn.parameters();
    for (const Var& p : autoencoder.parameters()) ps.push_back(p);
    return ps;
}

std::vector<LossRow> train_autoencoder_vqa(AutoencoderVqaModel& model,
                                           const std::vector<data::VqaRecord>& dataset,
                                           const AutoencoderTrainConfig& cfg, Rng& rng) {
    if (dataset.empty()) throw ConfigError("train_autoencoder_vqa: dataset is empty");
    std::vector<LossRow> log;
    log.reserve(cfg.steps);
    auto params = model.parameters();
    nn::Sgd opt{cfg.alpha};
    for (std::size_t s = 0; s < cfg.steps; ++s) {
        auto batch = draw_batch(dataset, cfg.batch, rng);
        nn::Tape tape;
        Var loss;
        std::vector<Var> score_rows;
        std::vector<int> labels;
        for (const data::VqaRecord* rec : batch) {
            Var input = model.concat_features(*rec);
            auto out = model.autoencoder.forward(input, rng, true);
            Var rec_loss = nn::mse_against(out.reconstruction, input.value());
            loss = loss.defined() ? nn::add(loss, rec_loss) : rec_loss;
            score_rows.push_back(out.scores);
            labels.push_back(rec->ground_truth);
        }
        loss = nn::scale(loss, 1.0 / static_cast<double>(batch.size()));
        if (cfg.lambda != 0.0) {
            Var ce = nn::cross_entropy_with_logits(nn::concat_rows(score_rows), labels);
            loss = nn::add(loss, nn::scale(ce, cfg.lambda));
        }
        double value = loss.value()[0];
        if (!std::isfinite(value))
            throw NumericalError("train_autoencoder_vqa: loss not finite (last good step " +
                                 std::to_string(s == 0 ? 0 : s - 1) + ")");
        nn::Sgd::zero_grads(params);
        tape.backward_scalar(loss);
        opt.step(params);
        log.push_back({s, value, 0.0, 0});
    }
    return log;
}

// ---- co-attention route -------------------------------------------------------

models::CoattentionOutput AttentionVqaModel::forward(const data::VqaRecord& rec, Rng& rng,
                                                     bool train) const {
    std::vector<Var> words;
    words.reserve(rec.question_tokens.size());
    for (int tok : rec.question_tokens) {
        if (tok < 0 || static_cast<std::size_t>(tok) >= embed.value().rows())
            throw ConfigError("attention: out-of-vocabulary token");
        words.push_back(nn::lookup_row(embed, static_cast<std::size_t>(tok)));
    }
    std::vector<Var> region_vars;
    for (auto& r : data::split_regions(rec, regions))
        region_vars.push_back(Var::constant(Tensor::vec(std::move(r))));
    return model.forward(words, region_vars, rng, train);
}

int AttentionVqaModel::predict(const data::VqaRecord& rec) const {
    Rng unused(0);
    return static_cast<int>(argmax(forward(rec, unused, false).scores.value()));
}

std::vector<Var> AttentionVqaModel::parameters() const {
    std::vector<Var> ps = {embed};
    for (const Var& p : model.parameters()) ps.push_back(p);
    return ps;
}

AttentionVqaModel make_attention_model(std::size_t vocab, std::size_t word_dim,
                                       std::size_t regions, models::CoattentionSpec spec,
                                       std::uint64_t stream) {
    AttentionVqaModel m;
    m.embed = Var::param(nn::init_weights(vocab, word_dim, spec.init, stream * 401ull + 9));
    m.model = models::CoattentionModel(std::move(spec), stream);
    m.regions = regions;
    return m;
}

std::vector<LossRow> train_attention(AttentionVqaModel& model,
                                     const std::vector<data::VqaRecord>& dataset,
                                     const AttentionTrainConfig& cfg, Rng& rng) {
    if (dataset.empty()) throw ConfigError("train_attention: dataset is empty");
    std::vector<LossRow> log;
    log.reserve(cfg.steps);
    auto params = model.parameters();
    nn::Sgd opt{cfg.alpha};
    for (std::size_t s = 0; s < cfg.steps; ++s) {
        auto batch = draw_batch(dataset, cfg.batch, rng);
        nn::Tape tape;
        std::vector<Var> score_rows;
        std::vector<int> labels;
        for (const data::VqaRecord* rec : batch) {
            score_rows.push_back(model.forward(*rec, rng, true).scores);
            labels.push_back(rec->ground_truth);
        }
        Var loss = nn::cross_entropy_with_logits(nn::concat_rows(score_rows), labels);
        double value = loss.value()[0];
        if (!std::isfinite(value))
            throw NumericalError("train_attention: loss not finite (last good step " +
                                 std::to_string(s == 0 ? 0 : s - 1) + ")");
        nn::Sgd::zero_grads(params);
        tape.backward_scalar(loss);
        opt.step(params);
        log.push_back({s, value, 0.0, 0});
    }
    return log;
}

}  // namespace vqalab::train
