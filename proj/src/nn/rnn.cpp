#include "vqalab/nn/rnn.hpp"

#include <string>

namespace vqalab::nn {

RnnEncoder::RnnEncoder(std::size_t vocab, std::size_t embed_dim, std::size_t hidden_dim,
                       const InitMode& mode, std::uint64_t stream)
    : embed_(Var::param(init_weights(vocab, embed_dim, mode, stream * 977ull + 1))),
      wx_(Var::param(init_weights(embed_dim, hidden_dim, mode, stream * 977ull + 2))),
      wh_(Var::param(init_weights(hidden_dim, hidden_dim, mode, stream * 977ull + 3))),
      b_(Var::param(Tensor::zeros({hidden_dim}))) {}

Var RnnEncoder::encode(const std::vector<int>& tokens) const {
    Var h = Var::constant(Tensor::zeros({hidden_dim()}));
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        int tok = tokens[t];
        if (tok < 0 || static_cast<std::size_t>(tok) >= vocab())
            throw ConfigError("rnn_encode: out-of-vocabulary token at position " +
                              std::to_string(t));
        Var e = lookup_row(embed_, static_cast<std::size_t>(tok));
        Var pre = add_rows(matmul(e, wx_), b_);
        pre = add(pre, matmul(h, wh_));
        h = tanh_op(pre);
    }
    return h;
}

}  // namespace vqalab::nn
