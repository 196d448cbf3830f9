#pragma once

#include <string>
#include <vector>

#include "vqalab/nn/layers.hpp"
#include "vqalab/signal/sketch.hpp"

namespace vqalab::fusion {

enum class Strategy { simple, full, mcb };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// Autodiff wrappers around the signal kernels. Both are fixed linear maps, so
// their backwards are the transpose / adjoint.
nn::Var sketch_op(const nn::Var& x, const signal::SketchPlan& plan);
nn::Var circular_convolve_op(const nn::Var& a, const nn::Var& b);

// out = tanh(W_i v_img + b_i) (*) tanh(W_q v_q + b_q)
class SimpleFusion {
public:
    SimpleFusion() = default;
    SimpleFusion(std::size_t d_img, std::size_t d_q, std::size_t d_f,
                 const nn::InitMode& mode, std::uint64_t stream);
    nn::Var fuse(const nn::Var& v_img, const nn::Var& v_q) const;
    std::size_t out_dim() const { return proj_img_.out_dim(); }
    std::vector<nn::Var> parameters() const;

    nn::Linear& proj_img() { return proj_img_; }
    nn::Linear& proj_q() { return proj_q_; }

private:
    nn::Linear proj_img_, proj_q_;
};

// u = tanh(W_i v_img), v = tanh(W_q v_q), p = u (*) v,
// a = sigmoid(W_a [u; v]) (*) (u + v), out = tanh(W_o [p; a]).
class FullFusion {
public:
    FullFusion() = default;
    FullFusion(std::size_t d_img, std::size_t d_q, std::size_t d_f,
               const nn::InitMode& mode, std::uint64_t stream);
    nn::Var fuse(const nn::Var& v_img, const nn::Var& v_q) const;
    std::size_t out_dim() const { return out_.out_dim(); }
    std::vector<nn::Var> parameters() const;

    nn::Linear& proj_img() { return proj_img_; }
    nn::Linear& proj_q() { return proj_q_; }
    nn::Linear& gate() { return gate_; }
    nn::Linear& out_proj() { return out_; }

private:
    nn::Linear proj_img_, proj_q_, gate_, out_;
};

// Compact bilinear pooling: circular convolution of the two count sketches,
// then signed square root and L2 normalization.
class McbFusion {
public:
    McbFusion() = default;
    McbFusion(std::size_t d_img, std::size_t d_q, std::size_t d_s, std::uint64_t seed);
    McbFusion(signal::SketchPlan plan_img, signal::SketchPlan plan_q);

    nn::Var fuse(const nn::Var& v_img, const nn::Var& v_q) const;
    // Bilinear core without signed-sqrt/normalization (oracle surface).
    nn::Var fuse_raw(const nn::Var& v_img, const nn::Var& v_q) const;

    std::size_t out_dim() const { return plan_img_.sketch_dim; }
    const signal::SketchPlan& plan_img() const { return plan_img_; }
    const signal::SketchPlan& plan_q() const { return plan_q_; }

private:
    signal::SketchPlan plan_img_, plan_q_;
};

// Tagged union over the three strategies with one fuse() surface.
class Fuser {
public:
    Fuser() = default;
    Fuser(Strategy strategy, std::size_t d_img, std::size_t d_q, std::size_t d_f,
          std::size_t d_s, const nn::InitMode& mode, std::uint64_t stream);

    nn::Var fuse(const nn::Var& v_img, const nn::Var& v_q) const;
    std::size_t out_dim() const;
    std::vector<nn::Var> parameters() const;
    Strategy strategy() const { return strategy_; }

    SimpleFusion& simple() { return simple_; }
    FullFusion& full() { return full_; }
    const McbFusion& mcb() const { return mcb_; }

private:
    Strategy strategy_ = Strategy::simple;
    SimpleFusion simple_;
    FullFusion full_;
    McbFusion mcb_;
};

}  // namespace vqalab::fusion
