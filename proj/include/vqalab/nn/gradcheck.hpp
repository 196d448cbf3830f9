#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vqalab/nn/autodiff.hpp"

namespace vqalab::nn {

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::size_t entries_checked = 0;
    std::size_t worst_param = 0;
    std::size_t worst_entry = 0;
    bool passed(double tol) const { return max_rel_err < tol; }
};

// Central-difference oracle: `build_loss` must rebuild the scalar loss graph
// from scratch on every call and be deterministic (fix any noise/dropout
// before calling). Compares d(loss)/d(param) against (f(p+h)-f(p-h))/2h.
GradCheckReport gradient_check(const std::function<Var()>& build_loss,
                               std::vector<Var> params, double step = 1e-5);

}  // namespace vqalab::nn
