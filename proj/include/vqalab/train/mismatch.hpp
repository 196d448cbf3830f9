#pragma once

#include <vector>

#include "vqalab/nn/rng.hpp"

namespace vqalab::train {

// For each batch element, the index of another element whose ground-truth
// answer differs; no element keeps its own tuple. Throws ConfigError when no
// valid pairing exists (e.g. all answers identical).
std::vector<std::size_t> sample_mismatched(const std::vector<int>& answers, nn::Rng& rng);

}  // namespace vqalab::train
