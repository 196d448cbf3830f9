#include "vqalab/nn/optim.hpp"

namespace vqalab::nn {

void Sgd::step(std::vector<Var>& params) const {
    for (Var& p : params) {
        Tensor g = p.grad();
        if (!g.all_finite()) throw NumericalError("sgd_step: non-finite gradient");
        Tensor& v = p.mutable_value();
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= alpha * g[i];
    }
}

void Sgd::zero_grads(std::vector<Var>& params) {
    for (Var& p : params) p.zero_grad();
}

}  // namespace vqalab::nn
