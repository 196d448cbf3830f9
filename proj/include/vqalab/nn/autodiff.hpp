#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "vqalab/nn/rng.hpp"
#include "vqalab/nn/tensor.hpp"

namespace vqalab::nn {

class Var;

namespace detail {
struct Node {
    Tensor value;
    Tensor grad;  // allocated on first accumulate
    bool requires_grad = false;
    bool has_grad = false;
    std::function<void()> backprop;  // set only for recorded interior nodes
};
using NodePtr = std::shared_ptr<Node>;
}  // namespace detail

// Handle to an autodiff node. Cheap to copy; copies alias the same node.
class Var {
public:
    Var() = default;

    static Var constant(Tensor t);
    // Trainable leaf; persists across tapes and accumulates gradients.
    static Var param(Tensor t);

    bool defined() const { return static_cast<bool>(n_); }
    const Tensor& value() const { return n_->value; }
    Tensor& mutable_value() { return n_->value; }
    bool requires_grad() const { return n_ && n_->requires_grad; }

    // Zero tensor of the value's shape when no gradient has been accumulated.
    Tensor grad() const;
    void accumulate_grad(const Tensor& g);
    void zero_grad();

    // Same value, no gradient connection.
    Var detach() const;

    std::size_t size() const { return n_->value.size(); }

private:
    explicit Var(detail::NodePtr n) : n_(std::move(n)) {}
    detail::NodePtr n_;
    friend class Tape;
    friend Var make_op(Tensor, std::vector<Var>,
                       std::function<void(const Tensor&, std::vector<Var>&)>);
};

// Records the forward trace for one backward pass. Tapes nest; ops attach to
// the innermost active tape on the current thread. A tape may be consumed by
// backward() exactly once.
class Tape {
public:
    Tape();
    ~Tape();
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    static Tape* current();

    void backward(const Var& output, const Tensor& upstream);
    // Seeds with d(loss)/d(loss) = 1; loss must be a single-element tensor.
    void backward_scalar(const Var& loss);

private:
    void record(detail::NodePtr n);
    std::vector<detail::NodePtr> trace_;
    bool consumed_ = false;
    Tape* prev_;
    friend Var make_op(Tensor, std::vector<Var>,
                       std::function<void(const Tensor&, std::vector<Var>&)>);
};

// Generic op factory: computes nothing itself, just wires `value` into the
// graph. `backward` receives the upstream gradient and the parent handles and
// must call accumulate_grad on each parent that needs it.
Var make_op(Tensor value, std::vector<Var> parents,
            std::function<void(const Tensor& grad_out, std::vector<Var>& parents)> backward);

// ---- core ops -------------------------------------------------------------

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);  // elementwise
Var scale(const Var& a, double c);
Var add_const(const Var& a, const Tensor& t);  // e.g. injected noise

// a: [n,k] or [k]; b: [k,m]. Result keeps a's rank.
Var matmul(const Var& a, const Var& b);
// Broadcast-add a length-m bias to every row of an [n,m] (or [m]) tensor.
Var add_rows(const Var& m, const Var& bias);

Var tanh_op(const Var& a);
Var relu_op(const Var& a);
Var sigmoid_op(const Var& a);

Var softmax_rows(const Var& a);
Var layernorm_rows(const Var& a);

// ln(clamp(x, eps, 1-eps)); entries that hit the clamp get zero gradient and
// bump *saturation_count when provided.
Var log_clamped(const Var& a, double eps, long* saturation_count);

// Mean cross-entropy of row logits against integer labels.
Var cross_entropy_with_logits(const Var& logits, const std::vector<int>& labels);
// Mean squared error against a constant target.
Var mse_against(const Var& a, const Tensor& target);

Var sum(const Var& a);
Var mean(const Var& a);

Var concat_vec(const Var& a, const Var& b);
Var concat_rows(const std::vector<Var>& rows);  // stack row vectors into [n,d]
Var reshape(const Var& a, std::vector<std::size_t> shape);
Var slice_row(const Var& m, std::size_t row);

// Row `id` of an embedding table; gradient scatters back into that row.
Var lookup_row(const Var& table, std::size_t id);

// Inverted dropout; identity when rate==0 or !train.
Var dropout(const Var& a, double rate, Rng& rng, bool train);

Var signed_sqrt(const Var& a);
Var l2_normalize(const Var& a);  // zero input passes through unchanged

}  // namespace vqalab::nn
