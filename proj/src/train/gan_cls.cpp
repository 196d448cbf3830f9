#include "vqalab/train/gan_cls.hpp"

#include <algorithm>
#include <cmath>

#include "vqalab/nn/optim.hpp"
#include "vqalab/train/mismatch.hpp"

namespace vqalab::train {

using nn::Rng;
using nn::Tensor;
using nn::Var;

// ---- VqaEncoder ----------------------------------------------------------------

VqaEncoder::VqaEncoder(const VqaEncoderConfig& cfg, std::uint64_t stream)
    : cfg_(cfg),
      rnn_(cfg.vocab, cfg.embed_dim, cfg.rnn_hidden, cfg.init, stream * 17ull + 1),
      fuser_(cfg.strategy, cfg.d_i, cfg.rnn_hidden, cfg.d_f, cfg.d_s, cfg.init,
             stream * 17ull + 2) {}

Var VqaEncoder::encode(const data::VqaRecord& rec) const {
    Var img = Var::constant(Tensor::vec(rec.image_features));
    Var q = rnn_.encode(rec.question_tokens);
    return fuser_.fuse(img, q);
}

std::vector<Var> VqaEncoder::parameters() const {
    std::vector<Var> ps = rnn_.parameters();
    for (const Var& p : fuser_.parameters()) ps.push_back(p);
    return ps;
}

// ---- GanClsState ------------------------------------------------------------------

std::vector<Var> GanClsState::generator_side_params() {
    std::vector<Var> ps = generator.parameters();
    for (const Var& p : encoder.parameters()) ps.push_back(p);
    return ps;
}

std::vector<Var> GanClsState::discriminator_params() { return discriminator.parameters(); }

std::vector<Var> GanClsState::all_params() {
    std::vector<Var> ps = generator_side_params();
    for (const Var& p : discriminator_params()) ps.push_back(p);
    return ps;
}

// ---- GAN-CLS step -------------------------------------------------------------------

Tensor answer_embedding(int answer, std::size_t vocab, bool smooth, double smooth_value) {
    Tensor x({vocab});
    if (smooth) {
        double off = (1.0 - smooth_value) / static_cast<double>(vocab - 1);
        for (double& v : x.data()) v = off;
        x[static_cast<std::size_t>(answer)] = smooth_value;
    } else {
        x[static_cast<std::size_t>(answer)] = 1.0;
    }
    return x;
}

namespace {

Var one_minus(const Var& s) {
    return nn::add_const(nn::scale(s, -1.0), Tensor::full(s.value().shape(), 1.0));
}

// Condition the discriminator sees, per its configured source.
Tensor condition_value(const GanClsState& st, const data::VqaRecord& rec) {
    if (st.discriminator.spec().condition_source == models::ConditionSource::raw_concat) {
        Var q = st.encoder.rnn().encode(rec.question_tokens);
        std::vector<double> c = rec.image_features;
        c.insert(c.end(), q.value().data().begin(), q.value().data().end());
        return Tensor::vec(std::move(c));
    }
    return st.encoder.encode(rec).value();
}

Var condition_live(const GanClsState& st, const data::VqaRecord& rec, const Var& fused) {
    if (st.discriminator.spec().condition_source == models::ConditionSource::raw_concat) {
        Var img = Var::constant(Tensor::vec(rec.image_features));
        return nn::concat_vec(img, st.encoder.rnn().encode(rec.question_tokens));
    }
    return fused;
}

StepLosses run_gan_batch(GanClsState& st, const std::vector<const data::VqaRecord*>& batch,
                         Rng& rng, bool update) {
    const GanClsConfig& cfg = st.config;
    std::size_t b = batch.size();
    if (b < 2) throw ConfigError("gan_cls_step: batch must hold at least 2 records");

    double frac = cfg.steps <= 1 ? 1.0
                                 : std::min(1.0, static_cast<double>(st.step) /
                                                     static_cast<double>(cfg.steps));
    double sigma_d = cfg.disc_noise_start + (cfg.disc_noise_end - cfg.disc_noise_start) * frac;

    std::vector<int> answers(b);
    for (std::size_t i = 0; i < b; ++i) answers[i] = batch[i]->ground_truth;
    std::vector<std::size_t> partner = sample_mismatched(answers, rng);

    std::size_t k = st.generator.spec().answer_vocab;
    std::vector<Tensor> x(b);
    for (std::size_t i = 0; i < b; ++i)
        x[i] = answer_embedding(answers[i], k, cfg.smooth_targets, cfg.smooth);

    StepLosses out;
    long saturation = 0;

    // Phase D: generator and encoder frozen (their outputs enter as constants).
    {
        std::vector<Tensor> h(b), cond(b), xhat(b);
        for (std::size_t i = 0; i < b; ++i) {
            h[i] = st.encoder.encode(*batch[i]).value();
            cond[i] = condition_value(st, *batch[i]);
            xhat[i] = st.generator.forward(Var::constant(h[i]), rng, true).value();
        }
        nn::Tape tape;
        Var loss_sum;
        for (std::size_t i = 0; i < b; ++i) {
            Var xi = Var::constant(x[i]);
            Var ci = Var::constant(cond[i]);
            Var ci_bad = Var::constant(cond[partner[i]]);
            Var s_r = st.discriminator.forward_with_noise(xi, ci, rng, true, sigma_d);
            Var s_w = st.discriminator.forward_with_noise(xi, ci_bad, rng, true, sigma_d);
            Var s_f = st.discriminator.forward_with_noise(Var::constant(xhat[i]), ci, rng, true,
                                                          sigma_d);
            Var term = nn::add(nn::log_clamped(s_r, cfg.clamp_eps, &saturation),
                               nn::scale(nn::add(nn::log_clamped(one_minus(s_w), cfg.clamp_eps,
                                                                 &saturation),
                                                 nn::log_clamped(one_minus(s_f), cfg.clamp_eps,
                                                                 &saturation)),
                                         0.5));
            loss_sum = loss_sum.defined() ? nn::add(loss_sum, term) : term;
        }
        Var l_d = nn::scale(loss_sum, 1.0 / static_cast<double>(b));
        out.l_d = l_d.value()[0];
        if (!std::isfinite(out.l_d))
            throw NumericalError("gan_cls_step: L_D is not finite (last good step " +
                                 std::to_string(st.step == 0 ? 0 : st.step - 1) + ")");
        if (update) {
            auto all = st.all_params();
            nn::Sgd::zero_grads(all);
            tape.backward_scalar(l_d);
            auto d_params = st.discriminator_params();
            // Ascend L_D (descend its negation) unless running the update
            // direction exactly as written.
            nn::Sgd{cfg.descent_updates ? cfg.alpha : -cfg.alpha}.step(d_params);
        }
    }

    // Phase G: discriminator frozen, s_f recomputed against the updated D.
    {
        nn::Tape tape;
        Var loss_sum;
        for (std::size_t i = 0; i < b; ++i) {
            Var fused = st.encoder.encode(*batch[i]);
            Var xhat = st.generator.forward(fused, rng, true);
            Var cond = condition_live(st, *batch[i], fused);
            Var s_f = st.discriminator.forward_with_noise(xhat, cond, rng, true, sigma_d);
            Var term = nn::log_clamped(s_f, cfg.clamp_eps, &saturation);
            loss_sum = loss_sum.defined() ? nn::add(loss_sum, term) : term;
        }
        Var l_g = nn::scale(loss_sum, 1.0 / static_cast<double>(b));
        out.l_g = l_g.value()[0];
        if (!std::isfinite(out.l_g))
            throw NumericalError("gan_cls_step: L_G is not finite (last good step " +
                                 std::to_string(st.step == 0 ? 0 : st.step - 1) + ")");
        if (update) {
            auto all = st.all_params();
            nn::Sgd::zero_grads(all);
            tape.backward_scalar(l_g);
            auto g_params = st.generator_side_params();
            nn::Sgd{cfg.descent_updates ? cfg.alpha : -cfg.alpha}.step(g_params);
        }
    }

    out.saturation = saturation;
    return out;
}

}  // namespace

StepLosses gan_cls_step(GanClsState& state, const std::vector<const data::VqaRecord*>& batch,
                        Rng& step_rng) {
    StepLosses losses = run_gan_batch(state, batch, step_rng, true);
    state.loss_log.push_back({state.step, losses.l_d, losses.l_g, losses.saturation});
    ++state.step;
    return losses;
}

StepLosses eval_gan_losses(GanClsState& state, const std::vector<const data::VqaRecord*>& batch,
                           Rng& step_rng) {
    return run_gan_batch(state, batch, step_rng, false);
}

// ---- pretraining ---------------------------------------------------------------------

namespace {

std::vector<const data::VqaRecord*> draw_batch(const std::vector<data::VqaRecord>& dataset,
                                               std::size_t batch, Rng& rng) {
    std::vector<const data::VqaRecord*> out(batch);
    for (auto& p : out) p = &dataset[rng.below(dataset.size())];
    return out;
}

}  // namespace

std::vector<double> pretrain_generator(GanClsState& state,
                                       const std::vector<data::VqaRecord>& dataset,
                                       const PretrainPlan& plan, Rng& rng) {
    std::vector<double> losses;
    if (!plan.pretrain_generator || plan.pretrain_steps == 0) return losses;
    if (dataset.empty()) throw ConfigError("pretrain_generator: dataset is empty");
    losses.reserve(plan.pretrain_steps);
    auto params = state.generator_side_params();
    nn::Sgd opt{state.config.alpha};
    for (std::size_t s = 0; s < plan.pretrain_steps; ++s) {
        auto batch = draw_batch(dataset, state.config.batch, rng);
        nn::Tape tape;
        std::vector<Var> rows;
        std::vector<int> labels;
        rows.reserve(batch.size());
        for (const data::VqaRecord* rec : batch) {
            Var h = state.encoder.encode(*rec);
            if (plan.g_input_noise_std > 0.0) {
                Tensor eps({h.value().size()});
                for (double& v : eps.data()) v = rng.normal(0.0, plan.g_input_noise_std);
                h = nn::add_const(h, eps);
            }
            rows.push_back(state.generator.forward(h, rng, true));
            labels.push_back(rec->ground_truth);
        }
        Var loss = nn::cross_entropy_with_logits(nn::concat_rows(rows), labels);
        losses.push_back(loss.value()[0]);
        nn::Sgd::zero_grads(params);
        tape.backward_scalar(loss);
        opt.step(params);
    }
    return losses;
}

std::vector<double> pretrain_discriminator(GanClsState& state,
                                           const std::vector<data::VqaRecord>& dataset,
                                           const PretrainPlan& plan, Rng& rng) {
    std::vector<double> losses;
    if (!plan.pretrain_discriminator || plan.pretrain_steps == 0) return losses;
    if (dataset.size() < 2) throw ConfigError("pretrain_discriminator: need at least 2 records");
    losses.reserve(plan.pretrain_steps);
    auto params = state.discriminator_params();
    nn::Sgd opt{state.config.alpha};
    std::size_t k = state.generator.spec().answer_vocab;
    for (std::size_t s = 0; s < plan.pretrain_steps; ++s) {
        auto batch = draw_batch(dataset, state.config.batch, rng);
        std::vector<int> answers(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) answers[i] = batch[i]->ground_truth;
        std::vector<std::size_t> partner;
        try {
            partner = sample_mismatched(answers, rng);
        } catch (const ConfigError&) {
            continue;  // degenerate batch, skip
        }
        nn::Tape tape;
        Var loss_sum;
        long sat = 0;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            Var xi = Var::constant(answer_embedding(answers[i], k, state.config.smooth_targets,
                                                    state.config.smooth));
            Var cond = Var::constant(condition_value(state, *batch[i]));
            Var cond_bad = Var::constant(condition_value(state, *batch[partner[i]]));
            Var s_match = state.discriminator.forward_with_noise(xi, cond, rng, true,
                                                                 plan.d_input_noise_std);
            Var s_mismatch = state.discriminator.forward_with_noise(xi, cond_bad, rng, true,
                                                                    plan.d_input_noise_std);
            Var term = nn::add(nn::log_clamped(s_match, state.config.clamp_eps, &sat),
                               nn::log_clamped(one_minus(s_mismatch), state.config.clamp_eps, &sat));
            loss_sum = loss_sum.defined() ? nn::add(loss_sum, term) : term;
        }
        // binary cross-entropy (negated log-likelihood), minimized
        Var loss = nn::scale(loss_sum, -1.0 / static_cast<double>(batch.size()));
        losses.push_back(loss.value()[0]);
        nn::Sgd::zero_grads(params);
        tape.backward_scalar(loss);
        opt.step(params);
    }
    return losses;
}

}  // namespace vqalab::train
