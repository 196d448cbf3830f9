#pragma once

#include <string>
#include <vector>

#include "vqalab/fusion/fusion.hpp"
#include "vqalab/nn/layers.hpp"

namespace vqalab::models {

enum class Combiner { addition, mcb };

const char* combiner_name(Combiner c);
Combiner combiner_from_name(const std::string& name);

struct CoattentionSpec {
    std::size_t word_dim = 0;    // question word feature width
    std::size_t region_dim = 0;  // image region feature width
    std::size_t att_dim = 32;    // shared projection width
    std::size_t sketch_dim = 64; // affinity MCB output width
    std::size_t answer_vocab = 32;
    std::vector<std::size_t> classifier_hidden = {64};
    Combiner combiner = Combiner::addition;
    double dropout_rate = 0.0;
    nn::InitMode init;
};

struct CoattentionOutput {
    nn::Var q_weights;  // [n_words], sums to 1
    nn::Var v_weights;  // [n_regions], sums to 1
    nn::Var scores;     // [K]
};

// Single-hop parallel co-attention. Per-pair affinities come from combining
// the projected word and region features by addition or by MCB, scored with a
// learned vector; each modality is softmax-attended and the attended pair is
// classified.
class CoattentionModel {
public:
    CoattentionModel() = default;
    CoattentionModel(CoattentionSpec spec, std::uint64_t stream);

    CoattentionOutput forward(const std::vector<nn::Var>& q_word_feats,
                              const std::vector<nn::Var>& img_region_feats, nn::Rng& rng,
                              bool train) const;

    std::vector<nn::Var> parameters() const;
    const CoattentionSpec& spec() const { return spec_; }
    nn::Linear& proj_q() { return proj_q_; }
    nn::Linear& proj_v() { return proj_v_; }
    nn::Var& score_vec() { return score_; }
    const fusion::McbFusion& mcb() const { return mcb_; }

private:
    CoattentionSpec spec_;
    nn::Linear proj_q_, proj_v_;
    nn::Var score_;  // [att_dim] or [sketch_dim] column, as [d,1]
    fusion::McbFusion mcb_;
    nn::Mlp classifier_;
};

}  // namespace vqalab::models
