#include "vqalab/app/gradsuite.hpp"

#include <cmath>

#include "vqalab/fusion/fusion.hpp"
#include "vqalab/models/autoencoder.hpp"
#include "vqalab/models/coattention.hpp"
#include "vqalab/models/discriminator.hpp"
#include "vqalab/models/generator.hpp"
#include "vqalab/nn/rnn.hpp"

namespace vqalab::app {

using nn::Rng;
using nn::Tensor;
using nn::Var;

namespace {

constexpr double kTol = 1e-4;

Tensor random_vec(std::size_t n, Rng& rng) {
    Tensor t({n});
    for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
    return t;
}

// Central differences are only valid away from the kinks of relu, signed-sqrt
// and friends; a correct gradient passes at almost every point, so each case
// may redraw its data a few times before the result counts as a failure.
struct Suite {
    std::vector<GradSuiteResult>& out;
    std::uint64_t seed;
    double step;

    void check(const std::string& name,
               const std::function<nn::GradCheckReport(Rng&)>& run_case) {
        std::uint64_t tag = 1469598103934665603ull;
        for (char c : name) tag = (tag ^ static_cast<unsigned char>(c)) * 1099511628211ull;
        nn::GradCheckReport best;
        best.max_rel_err = std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt < 5; ++attempt) {
            Rng rng(Rng::derive(seed, tag + static_cast<std::uint64_t>(attempt)));
            nn::GradCheckReport rep = run_case(rng);
            if (rep.max_rel_err < best.max_rel_err) best = rep;
            if (best.passed(kTol)) break;
        }
        out.push_back({name, seed, best});
    }
};

// Pre-normalization MCB values this close to zero put the signed square root
// in its ill-conditioned region; such draws are rejected.
constexpr double kMcbMargin = 3e-3;

bool mcb_safe(const fusion::McbFusion& mcb, const Var& a, const Var& b) {
    Var raw = mcb.fuse_raw(a, b);
    for (double v : raw.value().data())
        if (std::abs(v) < kMcbMargin) return false;
    return true;
}

void run_seed(std::vector<GradSuiteResult>& out, std::uint64_t seed, double step) {
    Suite s{out, seed, step};
    nn::InitMode init{nn::InitTag::I2, seed};
    Rng unused(0);

    // One Mlp per activation/normalization variant covers linear, bias and the
    // nonlinearity in a single scalar loss.
    struct ActCase {
        const char* name;
        nn::Act hidden;
        nn::Act final;
        bool layernorm;
    };
    for (const ActCase& ac : std::initializer_list<ActCase>{
             {"mlp_tanh", nn::Act::tanh, nn::Act::none, false},
             {"mlp_relu", nn::Act::relu, nn::Act::none, false},
             {"mlp_sigmoid", nn::Act::sigmoid, nn::Act::sigmoid, false},
             {"mlp_softmax", nn::Act::tanh, nn::Act::softmax, false},
             {"mlp_layernorm", nn::Act::tanh, nn::Act::none, true}}) {
        s.check(ac.name, [&](Rng& rng) {
            nn::Mlp mlp({{5, 4, 3}, ac.hidden, ac.final, 0.0, ac.layernorm}, init, seed * 7 + 1);
            Tensor x = random_vec(5, rng);
            Tensor target = random_vec(3, rng);
            return nn::gradient_check(
                [&] { return nn::mse_against(mlp.forward(Var::constant(x), false), target); },
                mlp.parameters(), step);
        });
    }

    s.check("rnn_encoder", [&](Rng& rng) {
        nn::RnnEncoder rnn(6, 3, 4, init, seed * 7 + 2);
        nn::Linear head(4, 3, init, seed * 7 + 3);
        std::vector<int> tokens(4);
        for (int& t : tokens) t = static_cast<int>(rng.below(6));
        std::vector<Var> params = rnn.parameters();
        params.push_back(head.weight);
        params.push_back(head.bias);
        return nn::gradient_check(
            [&] {
                return nn::cross_entropy_with_logits(
                    nn::concat_rows({head.apply(rnn.encode(tokens))}), {1});
            },
            params, step);
    });

    for (fusion::Strategy strat :
         {fusion::Strategy::simple, fusion::Strategy::full, fusion::Strategy::mcb}) {
        s.check(std::string("fusion_") + fusion::strategy_name(strat), [&](Rng& rng) {
            // Upstream projections give the parameter-free mcb path something
            // to differentiate; width 8 matches d_s so every sketch bucket is
            // live.
            nn::Linear up_i(4, 8, init, seed * 7 + 4), up_q(3, 8, init, seed * 7 + 5);
            fusion::Fuser fuser(strat, 8, 8, 5, 8, init, seed * 7 + 6);
            Tensor img = random_vec(4, rng), q = random_vec(3, rng);
            if (strat == fusion::Strategy::mcb) {
                for (int attempt = 0; attempt < 500; ++attempt) {
                    Var vi = nn::tanh_op(up_i.apply(Var::constant(img)));
                    Var vq = nn::tanh_op(up_q.apply(Var::constant(q)));
                    if (mcb_safe(fuser.mcb(), vi, vq)) break;
                    img = random_vec(4, rng);
                    q = random_vec(3, rng);
                }
            }
            Tensor target = random_vec(fuser.out_dim(), rng);
            std::vector<Var> params = {up_i.weight, up_i.bias, up_q.weight, up_q.bias};
            for (const Var& p : fuser.parameters()) params.push_back(p);
            return nn::gradient_check(
                [&, img, q, target] {
                    Var vi = nn::tanh_op(up_i.apply(Var::constant(img)));
                    Var vq = nn::tanh_op(up_q.apply(Var::constant(q)));
                    return nn::mse_against(fuser.fuse(vi, vq), target);
                },
                params, step);
        });
    }

    for (models::GeneratorArch arch : {models::GeneratorArch::simp, models::GeneratorArch::full}) {
        s.check(std::string("generator_") + models::arch_name(arch), [&](Rng& rng) {
            models::GeneratorSpec gs;
            gs.arch = arch;
            gs.noise_mode = models::NoiseMode::N0;
            gs.fused_dim = 5;
            gs.answer_vocab = 4;
            gs.hidden = {6, 6, 6};
            gs.dropout_rate = 0.0;
            gs.init = init;
            models::Generator gen(gs, seed * 7 + 7);
            Tensor fused = random_vec(5, rng);
            return nn::gradient_check(
                [&, fused] {
                    Var scores = gen.forward(Var::constant(fused), unused, false);
                    return nn::cross_entropy_with_logits(nn::concat_rows({scores}), {2});
                },
                gen.parameters(), step);
        });
    }

    s.check("discriminator", [&](Rng& rng) {
        models::DiscriminatorSpec ds;
        ds.hidden = {6};
        ds.answer_vocab = 4;
        ds.condition_dim = 5;
        ds.input_noise_std = 0.0;
        ds.dropout_rate = 0.0;
        ds.init = init;
        models::Discriminator disc(ds, seed * 7 + 8);
        Tensor ans = random_vec(4, rng), cond = random_vec(5, rng);
        long sat = 0;
        return nn::gradient_check(
            [&, ans, cond] {
                Var sc = disc.forward(Var::constant(ans), Var::constant(cond), unused, false);
                return nn::scale(nn::log_clamped(sc, 1e-7, &sat), -1.0);
            },
            disc.parameters(), step);
    });

    s.check("autoencoder", [&](Rng& rng) {
        models::AutoencoderSpec as;
        as.input_dim = 6;
        as.code_dim = 3;
        as.answer_vocab = 4;
        as.encoder_hidden = {5};
        as.classifier_hidden = {5};
        as.init = init;
        models::AutoencoderClassifier ae(as, seed * 7 + 9);
        Tensor x = random_vec(6, rng);
        return nn::gradient_check(
            [&, x] {
                auto o = ae.forward(Var::constant(x), unused, false);
                Var mse = nn::mse_against(o.reconstruction, x);
                Var ce = nn::cross_entropy_with_logits(nn::concat_rows({o.scores}), {1});
                return nn::add(mse, ce);
            },
            ae.parameters(), step);
    });

    for (models::Combiner comb : {models::Combiner::addition, models::Combiner::mcb}) {
        s.check(std::string("coattention_") + models::combiner_name(comb), [&](Rng& rng) {
            models::CoattentionSpec cs;
            cs.word_dim = 3;
            cs.region_dim = 4;
            cs.att_dim = 4;
            cs.sketch_dim = 4;  // == att_dim: all buckets live
            cs.answer_vocab = 4;
            cs.classifier_hidden = {5};
            cs.combiner = comb;
            cs.init = init;
            models::CoattentionModel coatt(cs, seed * 7 + 10);
            std::vector<Tensor> words = {random_vec(3, rng), random_vec(3, rng),
                                         random_vec(3, rng)};
            std::vector<Tensor> regions = {random_vec(4, rng), random_vec(4, rng)};
            if (comb == models::Combiner::mcb) {
                auto safe_pairs = [&] {
                    for (const Tensor& wt : words)
                        for (const Tensor& rt : regions) {
                            Var u = nn::tanh_op(coatt.proj_q().apply(Var::constant(wt)));
                            Var w = nn::tanh_op(coatt.proj_v().apply(Var::constant(rt)));
                            if (!mcb_safe(coatt.mcb(), u, w)) return false;
                        }
                    return true;
                };
                for (int attempt = 0; attempt < 500 && !safe_pairs(); ++attempt) {
                    for (Tensor& wt : words) wt = random_vec(3, rng);
                    for (Tensor& rt : regions) rt = random_vec(4, rng);
                }
            }
            return nn::gradient_check(
                [&] {
                    std::vector<Var> w, r;
                    for (const Tensor& t : words) w.push_back(Var::constant(t));
                    for (const Tensor& t : regions) r.push_back(Var::constant(t));
                    auto o = coatt.forward(w, r, unused, false);
                    return nn::cross_entropy_with_logits(nn::concat_rows({o.scores}), {3});
                },
                coatt.parameters(), step);
        });
    }
}

}  // namespace

std::vector<GradSuiteResult> run_grad_suite(const std::vector<std::uint64_t>& seeds,
                                            double step) {
    std::vector<GradSuiteResult> out;
    for (std::uint64_t seed : seeds) run_seed(out, seed, step);
    return out;
}

}  // namespace vqalab::app
