#include "vqalab/models/autoencoder.hpp"

namespace vqalab::models {

AutoencoderClassifier::AutoencoderClassifier(AutoencoderSpec spec, std::uint64_t stream)
    : spec_(std::move(spec)) {
    if (spec_.input_dim == 0) throw ConfigError("Autoencoder: input_dim must be set");
    if (spec_.code_dim >= spec_.input_dim)
        throw ConfigError("Autoencoder: code_dim must be strictly less than input_dim");

    nn::MlpConfig enc;
    enc.dims.push_back(spec_.input_dim);
    enc.dims.insert(enc.dims.end(), spec_.encoder_hidden.begin(), spec_.encoder_hidden.end());
    enc.dims.push_back(spec_.code_dim);
    enc.hidden_act = nn::Act::tanh;
    enc.final_act = nn::Act::tanh;
    enc.dropout_rate = spec_.dropout_rate;
    encoder_ = nn::Mlp(enc, spec_.init, stream * 101ull + 1);

    nn::MlpConfig dec;
    dec.dims.push_back(spec_.code_dim);
    for (auto it = spec_.encoder_hidden.rbegin(); it != spec_.encoder_hidden.rend(); ++it)
        dec.dims.push_back(*it);
    dec.dims.push_back(spec_.input_dim);
    dec.hidden_act = nn::Act::tanh;
    dec.final_act = nn::Act::none;
    decoder_ = nn::Mlp(dec, spec_.init, stream * 101ull + 2);

    nn::MlpConfig cls;
    cls.dims.push_back(spec_.code_dim);
    cls.dims.insert(cls.dims.end(), spec_.classifier_hidden.begin(),
                    spec_.classifier_hidden.end());
    cls.dims.push_back(spec_.answer_vocab);
    cls.hidden_act = nn::Act::relu;
    cls.final_act = nn::Act::none;
    cls.dropout_rate = spec_.dropout_rate;
    classifier_ = nn::Mlp(cls, spec_.init, stream * 101ull + 3);
}

AutoencoderOutput AutoencoderClassifier::forward(const nn::Var& concat_features, nn::Rng& rng,
                                                 bool train) const {
    AutoencoderOutput out;
    out.code = encoder_.forward(concat_features, train, &rng);
    out.reconstruction = decoder_.forward(out.code, train, &rng);
    out.scores = classifier_.forward(out.code, train, &rng);
    return out;
}

std::vector<nn::Var> AutoencoderClassifier::parameters() const {
    std::vector<nn::Var> ps = autoencoder_parameters();
    for (const nn::Var& p : classifier_.parameters()) ps.push_back(p);
    return ps;
}

std::vector<nn::Var> AutoencoderClassifier::autoencoder_parameters() const {
    std::vector<nn::Var> ps = encoder_.parameters();
    for (const nn::Var& p : decoder_.parameters()) ps.push_back(p);
    return ps;
}

}  // namespace vqalab::models
