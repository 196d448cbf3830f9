#pragma once

#include <cstdint>
#include <string>

#include "vqalab/nn/rng.hpp"
#include "vqalab/nn/tensor.hpp"

namespace vqalab::nn {

enum class InitTag { I1, I2 };

struct InitMode {
    InitTag tag = InitTag::I1;
    std::uint64_t seed = 0;
};

// I1: Gaussian(0, 0.02) with samples clipped to [-0.04, 0.04].
// I2: uniform on [-a, a], a = sqrt(6 / (fan_in + fan_out)).
// Deterministic for a fixed mode; `stream` separates layers sharing one mode.
Tensor init_weights(std::size_t fan_in, std::size_t fan_out, const InitMode& mode,
                    std::uint64_t stream);

const char* init_tag_name(InitTag tag);
InitTag init_tag_from_name(const std::string& name);

}  // namespace vqalab::nn
