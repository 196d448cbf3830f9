#pragma once

#include <vector>

#include "vqalab/nn/autodiff.hpp"

namespace vqalab::nn {

// Plain SGD on stored losses: p <- p - alpha * grad. Rejects non-finite
// gradients with a NumericalError.
struct Sgd {
    double alpha = 0.01;

    void step(std::vector<Var>& params) const;
    static void zero_grads(std::vector<Var>& params);
};

}  // namespace vqalab::nn
