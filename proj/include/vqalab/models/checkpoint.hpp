#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vqalab/nn/autodiff.hpp"

namespace vqalab::models {

// Flat versioned binary record: fixed header, then parameter tensors in
// declaration order as little-endian 64-bit floats.
struct CheckpointHeader {
    std::uint32_t arch_tag = 0;  // method/arch discriminant, caller-defined
    std::uint32_t init_tag = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> dims;  // caller-defined dimension list
};

void save_checkpoint(const std::string& path, const CheckpointHeader& header,
                     const std::vector<nn::Var>& params);

// Loads into existing parameters; shapes must match exactly.
CheckpointHeader load_checkpoint(const std::string& path, std::vector<nn::Var>& params);

CheckpointHeader read_checkpoint_header(const std::string& path);

}  // namespace vqalab::models
