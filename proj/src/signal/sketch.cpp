#include "vqalab/signal/sketch.hpp"

#include "vqalab/common.hpp"
#include "vqalab/nn/rng.hpp"
#include "vqalab/signal/fft.hpp"

namespace vqalab::signal {

SketchPlan SketchPlan::create(std::size_t input_dim, std::size_t sketch_dim, std::uint64_t seed) {
    if (input_dim == 0) throw ConfigError("SketchPlan: input_dim must be positive");
    if (!is_power_of_two(sketch_dim))
        throw ConfigError("SketchPlan: sketch_dim must be a power of two");
    SketchPlan plan;
    plan.input_dim = input_dim;
    plan.sketch_dim = sketch_dim;
    plan.seed = seed;
    nn::Rng rng(nn::Rng::derive(seed, 0x5ce7c4));
    // Balanced bucket assignment: rounds of shuffled bucket permutations, then
    // a final shuffle. Every bucket is hit once before any repeats, so no
    // sketch coordinate is structurally dead when input_dim >= sketch_dim.
    plan.index.reserve(input_dim);
    while (plan.index.size() < input_dim) {
        std::vector<std::size_t> pool(sketch_dim);
        for (std::size_t b = 0; b < sketch_dim; ++b) pool[b] = b;
        for (std::size_t i = sketch_dim - 1; i > 0; --i)
            std::swap(pool[i], pool[rng.below(i + 1)]);
        for (std::size_t b : pool)
            if (plan.index.size() < input_dim) plan.index.push_back(b);
    }
    for (std::size_t i = input_dim - 1; i > 0; --i)
        std::swap(plan.index[i], plan.index[rng.below(i + 1)]);
    plan.sign.resize(input_dim);
    for (std::size_t i = 0; i < input_dim; ++i)
        plan.sign[i] = (rng.next_u64() & 1ull) ? 1.0 : -1.0;
    return plan;
}

std::vector<double> count_sketch(const std::vector<double>& x, const SketchPlan& plan) {
    if (x.size() != plan.input_dim) throw ShapeError("count_sketch: dimension mismatch");
    std::vector<double> out(plan.sketch_dim, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) out[plan.index[i]] += plan.sign[i] * x[i];
    return out;
}

std::vector<double> count_sketch_transpose(const std::vector<double>& g, const SketchPlan& plan) {
    if (g.size() != plan.sketch_dim) throw ShapeError("count_sketch_transpose: dimension mismatch");
    std::vector<double> out(plan.input_dim, 0.0);
    for (std::size_t i = 0; i < plan.input_dim; ++i) out[i] = plan.sign[i] * g[plan.index[i]];
    return out;
}

SketchPlan product_plan(const SketchPlan& a, const SketchPlan& b) {
    if (a.sketch_dim != b.sketch_dim)
        throw ShapeError("product_plan: sketch dimensions differ");
    SketchPlan plan;
    plan.input_dim = a.input_dim * b.input_dim;
    plan.sketch_dim = a.sketch_dim;
    plan.seed = a.seed ^ (b.seed << 1);
    plan.index.resize(plan.input_dim);
    plan.sign.resize(plan.input_dim);
    for (std::size_t i = 0; i < a.input_dim; ++i)
        for (std::size_t j = 0; j < b.input_dim; ++j) {
            std::size_t k = i * b.input_dim + j;
            plan.index[k] = (a.index[i] + b.index[j]) & (plan.sketch_dim - 1);
            plan.sign[k] = a.sign[i] * b.sign[j];
        }
    return plan;
}

}  // namespace vqalab::signal
