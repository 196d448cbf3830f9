#include "vqalab/nn/gradcheck.hpp"

#include <cmath>

#include "vqalab/nn/optim.hpp"

namespace vqalab::nn {

GradCheckReport gradient_check(const std::function<Var()>& build_loss,
                               std::vector<Var> params, double step) {
    Sgd::zero_grads(params);
    std::vector<Tensor> analytic;
    {
        Tape tape;
        Var loss = build_loss();
        tape.backward_scalar(loss);
    }
    analytic.reserve(params.size());
    for (Var& p : params) analytic.push_back(p.grad());

    GradCheckReport report;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor& v = params[pi].mutable_value();
        for (std::size_t i = 0; i < v.size(); ++i) {
            double orig = v[i];
            v[i] = orig + step;
            double up = build_loss().value()[0];
            v[i] = orig - step;
            double down = build_loss().value()[0];
            v[i] = orig;
            double fd = (up - down) / (2.0 * step);
            double a = analytic[pi][i];
            double denom = std::max({std::abs(a), std::abs(fd), 1e-6});
            double rel = std::abs(a - fd) / denom;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst_param = pi;
                report.worst_entry = i;
            }
            ++report.entries_checked;
        }
    }
    Sgd::zero_grads(params);
    return report;
}

}  // namespace vqalab::nn
