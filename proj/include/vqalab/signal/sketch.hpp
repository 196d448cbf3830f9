#pragma once

#include <cstdint>
#include <vector>

namespace vqalab::signal {

// Count sketch: a fixed sparse linear map built from a seeded index hash and
// sign hash, materialized as lookup tables so the plan is pure data.
struct SketchPlan {
    std::size_t input_dim = 0;
    std::size_t sketch_dim = 0;  // power of two
    std::vector<std::size_t> index;  // [input_dim] -> [0, sketch_dim)
    std::vector<double> sign;        // [input_dim] -> {-1, +1}
    std::uint64_t seed = 0;

    static SketchPlan create(std::size_t input_dim, std::size_t sketch_dim, std::uint64_t seed);
};

std::vector<double> count_sketch(const std::vector<double>& x, const SketchPlan& plan);

// Transpose of the sketch map: pulls a sketch-space gradient back to input space.
std::vector<double> count_sketch_transpose(const std::vector<double>& g, const SketchPlan& plan);

// Plan for the flattened outer product x (x) y (row-major, index i*dim_y + j):
// h(i,j) = (h1(i) + h2(j)) mod d_s, s(i,j) = s1(i) * s2(j). With this plan,
// count_sketch(outer(x, y)) == circular_convolve(count_sketch(x), count_sketch(y)).
SketchPlan product_plan(const SketchPlan& a, const SketchPlan& b);

}  // namespace vqalab::signal
