#include "vqalab/fusion/fusion.hpp"

#include "vqalab/signal/fft.hpp"

namespace vqalab::fusion {

using nn::Var;

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::simple: return "simple";
        case Strategy::full: return "full";
        case Strategy::mcb: return "mcb";
    }
    return "?";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "simple") return Strategy::simple;
    if (name == "full") return Strategy::full;
    if (name == "mcb") return Strategy::mcb;
    throw ConfigError("unknown fusion strategy: " + name);
}

Var sketch_op(const Var& x, const signal::SketchPlan& plan) {
    if (x.value().rank() != 1) throw ShapeError("sketch_op: expects a vector");
    std::vector<double> out = signal::count_sketch(x.value().data(), plan);
    return nn::make_op(nn::Tensor::vec(std::move(out)), {x},
                       [&plan](const nn::Tensor& g, std::vector<Var>& ps) {
                           ps[0].accumulate_grad(
                               nn::Tensor::vec(signal::count_sketch_transpose(g.data(), plan)));
                       });
}

Var circular_convolve_op(const Var& a, const Var& b) {
    std::vector<double> out = signal::circular_convolve(a.value().data(), b.value().data());
    return nn::make_op(nn::Tensor::vec(std::move(out)), {a, b},
                       [](const nn::Tensor& g, std::vector<Var>& ps) {
                           if (ps[0].requires_grad())
                               ps[0].accumulate_grad(nn::Tensor::vec(
                                   signal::circular_correlate(g.data(), ps[1].value().data())));
                           if (ps[1].requires_grad())
                               ps[1].accumulate_grad(nn::Tensor::vec(
                                   signal::circular_correlate(g.data(), ps[0].value().data())));
                       });
}

// ---- SimpleFusion ------------------------------------------------------------

SimpleFusion::SimpleFusion(std::size_t d_img, std::size_t d_q, std::size_t d_f,
                           const nn::InitMode& mode, std::uint64_t stream)
    : proj_img_(d_img, d_f, mode, stream * 31ull + 1),
      proj_q_(d_q, d_f, mode, stream * 31ull + 2) {}

Var SimpleFusion::fuse(const Var& v_img, const Var& v_q) const {
    Var u = nn::tanh_op(proj_img_.apply(v_img));
    Var v = nn::tanh_op(proj_q_.apply(v_q));
    return nn::mul(u, v);
}

std::vector<Var> SimpleFusion::parameters() const {
    return {proj_img_.weight, proj_img_.bias, proj_q_.weight, proj_q_.bias};
}

// ---- FullFusion --------------------------------------------------------------

FullFusion::FullFusion(std::size_t d_img, std::size_t d_q, std::size_t d_f,
                       const nn::InitMode& mode, std::uint64_t stream)
    : proj_img_(d_img, d_f, mode, stream * 37ull + 1),
      proj_q_(d_q, d_f, mode, stream * 37ull + 2),
      gate_(2 * d_f, d_f, mode, stream * 37ull + 3),
      out_(2 * d_f, d_f, mode, stream * 37ull + 4) {}

Var FullFusion::fuse(const Var& v_img, const Var& v_q) const {
    Var u = nn::tanh_op(proj_img_.apply(v_img));
    Var v = nn::tanh_op(proj_q_.apply(v_q));
    Var p = nn::mul(u, v);
    Var uv = nn::concat_vec(u, v);
    Var gate = nn::sigmoid_op(gate_.apply(uv));
    Var attn = nn::mul(gate, nn::add(u, v));
    return nn::tanh_op(out_.apply(nn::concat_vec(p, attn)));
}

std::vector<Var> FullFusion::parameters() const {
    return {proj_img_.weight, proj_img_.bias, proj_q_.weight, proj_q_.bias,
            gate_.weight,     gate_.bias,     out_.weight,    out_.bias};
}

// ---- McbFusion ---------------------------------------------------------------

McbFusion::McbFusion(std::size_t d_img, std::size_t d_q, std::size_t d_s, std::uint64_t seed)
    : plan_img_(signal::SketchPlan::create(d_img, d_s, nn::Rng::derive(seed, 11))),
      plan_q_(signal::SketchPlan::create(d_q, d_s, nn::Rng::derive(seed, 12))) {}

McbFusion::McbFusion(signal::SketchPlan plan_img, signal::SketchPlan plan_q)
    : plan_img_(std::move(plan_img)), plan_q_(std::move(plan_q)) {
    if (plan_img_.sketch_dim != plan_q_.sketch_dim)
        throw ShapeError("McbFusion: plans must share sketch_dim");
}

Var McbFusion::fuse_raw(const Var& v_img, const Var& v_q) const {
    return circular_convolve_op(sketch_op(v_img, plan_img_), sketch_op(v_q, plan_q_));
}

Var McbFusion::fuse(const Var& v_img, const Var& v_q) const {
    return nn::l2_normalize(nn::signed_sqrt(fuse_raw(v_img, v_q)));
}

// ---- Fuser ---------------------------------------------------------------------

Fuser::Fuser(Strategy strategy, std::size_t d_img, std::size_t d_q, std::size_t d_f,
             std::size_t d_s, const nn::InitMode& mode, std::uint64_t stream)
    : strategy_(strategy) {
    switch (strategy_) {
        case Strategy::simple: simple_ = SimpleFusion(d_img, d_q, d_f, mode, stream); break;
        case Strategy::full: full_ = FullFusion(d_img, d_q, d_f, mode, stream); break;
        case Strategy::mcb:
            mcb_ = McbFusion(d_img, d_q, d_s, nn::Rng::derive(mode.seed, stream));
            break;
    }
}

Var Fuser::fuse(const Var& v_img, const Var& v_q) const {
    switch (strategy_) {
        case Strategy::simple: return simple_.fuse(v_img, v_q);
        case Strategy::full: return full_.fuse(v_img, v_q);
        case Strategy::mcb: return mcb_.fuse(v_img, v_q);
    }
    throw ConfigError("Fuser: unknown strategy");
}

std::size_t Fuser::out_dim() const {
    switch (strategy_) {
        case Strategy::simple: return simple_.out_dim();
        case Strategy::full: return full_.out_dim();
        case Strategy::mcb: return mcb_.out_dim();
    }
    return 0;
}

std::vector<Var> Fuser::parameters() const {
    switch (strategy_) {
        case Strategy::simple: return simple_.parameters();
        case Strategy::full: return full_.parameters();
        case Strategy::mcb: return {};
    }
    return {};
}

}  // namespace vqalab::fusion
