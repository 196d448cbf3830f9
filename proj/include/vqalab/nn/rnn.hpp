#pragma once

#include <vector>

#include "vqalab/nn/autodiff.hpp"
#include "vqalab/nn/init.hpp"

namespace vqalab::nn {

// Elman encoder: h_t = tanh(W_x e(tok_t) + W_h h_{t-1} + b). Returns the final
// hidden state; an empty sequence yields h_0 = zeros.
class RnnEncoder {
public:
    RnnEncoder() = default;
    RnnEncoder(std::size_t vocab, std::size_t embed_dim, std::size_t hidden_dim,
               const InitMode& mode, std::uint64_t stream);

    Var encode(const std::vector<int>& tokens) const;
    std::vector<Var> parameters() const { return {embed_, wx_, wh_, b_}; }

    std::size_t vocab() const { return embed_.value().shape()[0]; }
    std::size_t hidden_dim() const { return b_.value().size(); }

    // Hand-set cell access for toy traces.
    Var& embed() { return embed_; }
    Var& wx() { return wx_; }
    Var& wh() { return wh_; }
    Var& bias() { return b_; }

private:
    Var embed_;  // [vocab, embed_dim]
    Var wx_;     // [embed_dim, hidden]
    Var wh_;     // [hidden, hidden]
    Var b_;      // [hidden]
};

}  // namespace vqalab::nn
