#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vqalab/nn/gradcheck.hpp"

namespace vqalab::app {

struct GradSuiteResult {
    std::string name;
    std::uint64_t seed;
    nn::GradCheckReport report;
};

// Finite-difference checks over every layer kind, fusion strategy and model at
// toy dimensions. Deterministic per seed (dropout and noise disabled).
std::vector<GradSuiteResult> run_grad_suite(const std::vector<std::uint64_t>& seeds,
                                            double step = 1e-5);

}  // namespace vqalab::app
