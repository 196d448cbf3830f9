#include "vqalab/models/generator.hpp"

namespace vqalab::models {

const char* arch_name(GeneratorArch a) { return a == GeneratorArch::simp ? "simp" : "full"; }

GeneratorArch arch_from_name(const std::string& name) {
    if (name == "simp") return GeneratorArch::simp;
    if (name == "full") return GeneratorArch::full;
    throw ConfigError("unknown generator arch: " + name);
}

const char* noise_mode_name(NoiseMode m) {
    switch (m) {
        case NoiseMode::N0: return "N0";
        case NoiseMode::N1: return "N1";
        case NoiseMode::N2: return "N2";
    }
    return "?";
}

NoiseMode noise_mode_from_name(const std::string& name) {
    if (name == "N0") return NoiseMode::N0;
    if (name == "N1") return NoiseMode::N1;
    if (name == "N2") return NoiseMode::N2;
    throw ConfigError("unknown noise mode: " + name);
}

Generator::Generator(GeneratorSpec spec, std::uint64_t stream) : spec_(std::move(spec)) {
    if (spec_.fused_dim == 0) throw ConfigError("Generator: fused_dim must be set");
    nn::MlpConfig cfg;
    cfg.dims.push_back(spec_.input_dim());
    if (spec_.arch == GeneratorArch::full)
        cfg.dims.insert(cfg.dims.end(), spec_.hidden.begin(), spec_.hidden.end());
    cfg.dims.push_back(spec_.answer_vocab);
    cfg.hidden_act = nn::Act::relu;
    cfg.final_act = nn::Act::none;
    cfg.dropout_rate = spec_.dropout_rate;
    cfg.layernorm = spec_.layernorm;
    mlp_ = nn::Mlp(cfg, spec_.init, stream * 7919ull + 1);
}

nn::Var Generator::forward(const nn::Var& fused, nn::Rng& rng, bool train) const {
    if (fused.value().size() != spec_.fused_dim)
        throw ShapeError("Generator: fused dim mismatch");
    nn::Var input = fused;
    switch (spec_.noise_mode) {
        case NoiseMode::N0: break;
        case NoiseMode::N1: {
            nn::Tensor z({spec_.noise_dim});
            if (train)
                for (double& v : z.data()) v = rng.normal();
            input = nn::concat_vec(fused, nn::Var::constant(std::move(z)));
            break;
        }
        case NoiseMode::N2: {
            nn::Tensor z({spec_.fused_dim});
            if (train)
                for (double& v : z.data()) v = rng.normal();
            input = nn::add_const(fused, z);
            break;
        }
    }
    return mlp_.forward(input, train, &rng);
}

}  // namespace vqalab::models
