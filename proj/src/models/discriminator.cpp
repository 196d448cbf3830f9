#include "vqalab/models/discriminator.hpp"

namespace vqalab::models {

const char* condition_source_name(ConditionSource s) {
    return s == ConditionSource::fused ? "fused" : "raw-concat";
}

ConditionSource condition_source_from_name(const std::string& name) {
    if (name == "fused") return ConditionSource::fused;
    if (name == "raw-concat") return ConditionSource::raw_concat;
    throw ConfigError("unknown condition source: " + name);
}

Discriminator::Discriminator(DiscriminatorSpec spec, std::uint64_t stream)
    : spec_(std::move(spec)) {
    if (spec_.condition_dim == 0) throw ConfigError("Discriminator: condition_dim must be set");
    nn::MlpConfig cfg;
    cfg.dims.push_back(spec_.answer_vocab + spec_.condition_dim);
    cfg.dims.insert(cfg.dims.end(), spec_.hidden.begin(), spec_.hidden.end());
    cfg.dims.push_back(1);
    cfg.hidden_act = nn::Act::relu;
    cfg.final_act = nn::Act::sigmoid;
    cfg.dropout_rate = spec_.dropout_rate;
    cfg.layernorm = spec_.layernorm;
    mlp_ = nn::Mlp(cfg, spec_.init, stream * 6007ull + 1);
}

nn::Var Discriminator::forward(const nn::Var& answer, const nn::Var& condition, nn::Rng& rng,
                               bool train) const {
    return forward_with_noise(answer, condition, rng, train, spec_.input_noise_std);
}

nn::Var Discriminator::forward_with_noise(const nn::Var& answer, const nn::Var& condition,
                                          nn::Rng& rng, bool train, double noise_std) const {
    if (answer.value().size() != spec_.answer_vocab)
        throw ShapeError("Discriminator: answer dim mismatch");
    if (condition.value().size() != spec_.condition_dim)
        throw ShapeError("Discriminator: condition dim mismatch");
    nn::Var a = spec_.softmax_answer_input ? nn::softmax_rows(answer) : answer;
    nn::Var input = nn::concat_vec(a, condition);
    if (train && noise_std > 0.0) {
        nn::Tensor eps({input.value().size()});
        for (double& v : eps.data()) v = rng.normal(0.0, noise_std);
        input = nn::add_const(input, eps);
    }
    return mlp_.forward(input, train, &rng);
}

}  // namespace vqalab::models
