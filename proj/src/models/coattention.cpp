#include "vqalab/models/coattention.hpp"

namespace vqalab::models {

using nn::Var;

const char* combiner_name(Combiner c) { return c == Combiner::addition ? "addition" : "mcb"; }

Combiner combiner_from_name(const std::string& name) {
    if (name == "addition") return Combiner::addition;
    if (name == "mcb") return Combiner::mcb;
    throw ConfigError("unknown combiner: " + name);
}

namespace {

Var stack_scalars(const std::vector<Var>& scalars) {
    nn::Tensor out({scalars.size()});
    for (std::size_t i = 0; i < scalars.size(); ++i) out[i] = scalars[i].value()[0];
    return nn::make_op(std::move(out), scalars, [](const nn::Tensor& g, std::vector<Var>& ps) {
        for (std::size_t i = 0; i < ps.size(); ++i)
            ps[i].accumulate_grad(nn::Tensor::scalar(g[i]));
    });
}

}  // namespace

CoattentionModel::CoattentionModel(CoattentionSpec spec, std::uint64_t stream)
    : spec_(std::move(spec)) {
    if (spec_.word_dim == 0 || spec_.region_dim == 0)
        throw ConfigError("Coattention: word_dim and region_dim must be set");
    proj_q_ = nn::Linear(spec_.word_dim, spec_.att_dim, spec_.init, stream * 211ull + 1);
    proj_v_ = nn::Linear(spec_.region_dim, spec_.att_dim, spec_.init, stream * 211ull + 2);
    std::size_t score_dim = spec_.combiner == Combiner::mcb ? spec_.sketch_dim : spec_.att_dim;
    score_ = Var::param(nn::init_weights(score_dim, 1, spec_.init, stream * 211ull + 3));
    if (spec_.combiner == Combiner::mcb)
        mcb_ = fusion::McbFusion(spec_.att_dim, spec_.att_dim, spec_.sketch_dim,
                                 nn::Rng::derive(spec_.init.seed, stream * 211ull + 4));
    nn::MlpConfig cls;
    cls.dims.push_back(2 * spec_.att_dim);
    cls.dims.insert(cls.dims.end(), spec_.classifier_hidden.begin(),
                    spec_.classifier_hidden.end());
    cls.dims.push_back(spec_.answer_vocab);
    cls.hidden_act = nn::Act::relu;
    cls.final_act = nn::Act::none;
    cls.dropout_rate = spec_.dropout_rate;
    classifier_ = nn::Mlp(cls, spec_.init, stream * 211ull + 5);
}

CoattentionOutput CoattentionModel::forward(const std::vector<Var>& q_word_feats,
                                            const std::vector<Var>& img_region_feats,
                                            nn::Rng& rng, bool train) const {
    if (q_word_feats.empty() || img_region_feats.empty())
        throw ShapeError("Coattention: word and region sequences must be nonempty");
    std::size_t n_words = q_word_feats.size();
    std::size_t n_regions = img_region_feats.size();

    std::vector<Var> u, w;
    u.reserve(n_words);
    w.reserve(n_regions);
    for (const Var& q : q_word_feats) u.push_back(nn::tanh_op(proj_q_.apply(q)));
    for (const Var& v : img_region_feats) w.push_back(nn::tanh_op(proj_v_.apply(v)));

    // affinity[i][j], one scalar per (word, region) pair
    std::vector<std::vector<Var>> affinity(n_words);
    for (std::size_t i = 0; i < n_words; ++i) {
        affinity[i].reserve(n_regions);
        for (std::size_t j = 0; j < n_regions; ++j) {
            Var combined = spec_.combiner == Combiner::mcb ? mcb_.fuse(u[i], w[j])
                                                           : nn::add(u[i], w[j]);
            affinity[i].push_back(nn::matmul(combined, score_));
        }
    }

    std::vector<Var> row_means, col_means;
    row_means.reserve(n_words);
    for (std::size_t i = 0; i < n_words; ++i) row_means.push_back(nn::mean(stack_scalars(affinity[i])));
    col_means.reserve(n_regions);
    for (std::size_t j = 0; j < n_regions; ++j) {
        std::vector<Var> col;
        col.reserve(n_words);
        for (std::size_t i = 0; i < n_words; ++i) col.push_back(affinity[i][j]);
        col_means.push_back(nn::mean(stack_scalars(col)));
    }

    CoattentionOutput out;
    out.q_weights = nn::softmax_rows(stack_scalars(row_means));
    out.v_weights = nn::softmax_rows(stack_scalars(col_means));

    Var attended_q = nn::matmul(nn::reshape(out.q_weights, {1, n_words}), nn::concat_rows(u));
    Var attended_v = nn::matmul(nn::reshape(out.v_weights, {1, n_regions}), nn::concat_rows(w));
    Var joint = nn::concat_vec(nn::reshape(attended_q, {spec_.att_dim}),
                               nn::reshape(attended_v, {spec_.att_dim}));
    out.scores = classifier_.forward(joint, train, &rng);
    return out;
}

std::vector<Var> CoattentionModel::parameters() const {
    std::vector<Var> ps = {proj_q_.weight, proj_q_.bias, proj_v_.weight, proj_v_.bias, score_};
    for (const Var& p : classifier_.parameters()) ps.push_back(p);
    return ps;
}

}  // namespace vqalab::models
