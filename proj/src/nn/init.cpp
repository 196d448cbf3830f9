#include "vqalab/nn/init.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vqalab/common.hpp"

namespace vqalab::nn {

Tensor init_weights(std::size_t fan_in, std::size_t fan_out, const InitMode& mode,
                    std::uint64_t stream) {
    if (fan_in == 0 || fan_out == 0) throw ConfigError("init_weights: dims must be positive");
    Rng rng(Rng::derive(mode.seed, stream));
    Tensor w({fan_in, fan_out});
    if (mode.tag == InitTag::I1) {
        constexpr double kSigma = 0.02;
        for (double& v : w.data())
            v = std::clamp(rng.normal(0.0, kSigma), -2.0 * kSigma, 2.0 * kSigma);
    } else {
        double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& v : w.data()) v = rng.uniform(-a, a);
    }
    return w;
}

const char* init_tag_name(InitTag tag) { return tag == InitTag::I1 ? "I1" : "I2"; }

InitTag init_tag_from_name(const std::string& name) {
    if (name == "I1") return InitTag::I1;
    if (name == "I2") return InitTag::I2;
    throw ConfigError("unknown init tag: " + name);
}

}  // namespace vqalab::nn
