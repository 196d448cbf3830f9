#include "vqalab/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "vqalab/nn/rng.hpp"

namespace vqalab::data {

using nn::Rng;

const char* question_type_name(QuestionType t) {
    switch (t) {
        case QuestionType::yes_no: return "yes_no";
        case QuestionType::number: return "number";
        case QuestionType::other: return "other";
    }
    return "?";
}

QuestionType question_type_from_name(const std::string& name) {
    if (name == "yes_no") return QuestionType::yes_no;
    if (name == "number") return QuestionType::number;
    if (name == "other") return QuestionType::other;
    throw ConfigError("unknown question type: " + name);
}

void DatasetConfig::validate() const {
    if (n_records == 0) throw ConfigError("dataset: n_records must be positive");
    double mix_sum = mix_yes_no + mix_number + mix_other;
    if (std::abs(mix_sum - 1.0) > 1e-9)
        throw ConfigError("dataset: type mix proportions must sum to 1");
    if (mix_yes_no < 0 || mix_number < 0 || mix_other < 0)
        throw ConfigError("dataset: type mix proportions must be non-negative");
    if (prior_skew < 0.0 || prior_skew > 1.0)
        throw ConfigError("dataset: prior_skew must be in [0,1]");
    if (annotator_agreement < 0.0 || annotator_agreement > 1.0)
        throw ConfigError("dataset: annotator_agreement must be in [0,1]");
    if (regions == 0 || d_i % regions != 0)
        throw ConfigError("dataset: d_i must be divisible by regions");
    if (content_classes < 2) throw ConfigError("dataset: need at least 2 content classes");
    if (answer_vocab < static_cast<std::size_t>(kOtherBase) + content_classes)
        throw ConfigError("dataset: answer_vocab too small for the answer layout");
    if (vocab_size < 3 + content_classes + regions + 1)
        throw ConfigError("dataset: vocab_size too small for the question templates");
    if (feature_noise < 0.0) throw ConfigError("dataset: feature_noise must be >= 0");
}

namespace {

// Token layout: [0..2] type markers, then content-class tokens, then region
// tokens, then filler.
struct TokenMap {
    std::size_t classes, regions, vocab;
    int type_tok(QuestionType t) const { return static_cast<int>(t); }
    int class_tok(std::size_t c) const { return 3 + static_cast<int>(c); }
    int region_tok(std::size_t r) const { return 3 + static_cast<int>(classes + r); }
    int filler_tok(std::size_t f) const {
        std::size_t base = 3 + classes + regions;
        return static_cast<int>(base + f % (vocab - base));
    }
};

struct TypePrior {
    std::vector<int> answers;     // ordered, modal first
    std::vector<double> weights;  // normalized
    int modal() const { return answers[0]; }
    int sample(Rng& rng) const {
        double u = rng.uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < answers.size(); ++i) {
            acc += weights[i];
            if (u < acc) return answers[i];
        }
        return answers.back();
    }
};

TypePrior make_prior(QuestionType t, std::size_t answer_vocab) {
    TypePrior p;
    if (t == QuestionType::yes_no) {
        p.answers = {kAnswerYes, kAnswerNo};
        p.weights = {0.6, 0.4};
        return p;
    }
    int lo = t == QuestionType::number ? kNumberBase : kOtherBase;
    int hi = t == QuestionType::number ? kOtherBase : static_cast<int>(answer_vocab);
    double modal_mass = t == QuestionType::number ? 0.35 : 0.3;
    double ratio = t == QuestionType::number ? 0.6 : 0.7;
    p.answers.push_back(lo);
    p.weights.push_back(modal_mass);
    double rest = 1.0 - modal_mass, norm = 0.0, w = 1.0;
    for (int a = lo + 1; a < hi; ++a, w *= ratio) norm += w;
    w = 1.0;
    for (int a = lo + 1; a < hi; ++a, w *= ratio) {
        p.answers.push_back(a);
        p.weights.push_back(rest * w / norm);
    }
    return p;
}

int modal_answer(QuestionType t) {
    switch (t) {
        case QuestionType::yes_no: return kAnswerYes;
        case QuestionType::number: return kNumberBase;
        case QuestionType::other: return kOtherBase;
    }
    return 0;
}

// (region, class) -> center vector; the position-dependent centers let an
// attention model identify regions by content.
std::vector<std::vector<double>> make_centers(const DatasetConfig& cfg) {
    Rng rng(Rng::derive(cfg.seed, 0xCE17E25));
    std::vector<std::vector<double>> centers(cfg.regions * cfg.content_classes);
    for (auto& c : centers) {
        c.resize(cfg.region_dim());
        for (double& v : c) v = rng.normal();
    }
    return centers;
}

}  // namespace

std::vector<VqaRecord> generate_dataset(const DatasetConfig& cfg) {
    cfg.validate();
    TokenMap tok{cfg.content_classes, cfg.regions, cfg.vocab_size};
    auto centers = make_centers(cfg);
    TypePrior priors[3] = {make_prior(QuestionType::yes_no, cfg.answer_vocab),
                           make_prior(QuestionType::number, cfg.answer_vocab),
                           make_prior(QuestionType::other, cfg.answer_vocab)};

    std::vector<VqaRecord> records(cfg.n_records);
    for (std::size_t n = 0; n < cfg.n_records; ++n) {
        Rng rng(Rng::derive(cfg.seed, 0xDA7A0000ull + n));
        VqaRecord& rec = records[n];

        // latent scene: one content class per region
        std::vector<std::size_t> content(cfg.regions);
        for (auto& c : content) c = rng.below(cfg.content_classes);
        rec.image_features.resize(cfg.d_i);
        std::size_t rd = cfg.region_dim();
        for (std::size_t r = 0; r < cfg.regions; ++r) {
            const auto& center = centers[r * cfg.content_classes + content[r]];
            for (std::size_t j = 0; j < rd; ++j)
                rec.image_features[r * rd + j] = center[j] + rng.normal(0.0, cfg.feature_noise);
        }

        // question template and latent answer
        double u = rng.uniform();
        QuestionType type = u < cfg.mix_yes_no ? QuestionType::yes_no
                            : u < cfg.mix_yes_no + cfg.mix_number ? QuestionType::number
                                                                  : QuestionType::other;
        rec.question_type = type;
        int answer = 0;
        switch (type) {
            case QuestionType::yes_no: {
                // "is region 0's content class k?"
                std::size_t k = rng.uniform() < 0.5 ? content[0] : rng.below(cfg.content_classes);
                answer = content[0] == k ? kAnswerYes : kAnswerNo;
                rec.question_tokens = {tok.type_tok(type), tok.class_tok(k),
                                       tok.filler_tok(rng.below(8))};
                break;
            }
            case QuestionType::number: {
                // "how many regions hold class k?", k drawn from a present class
                std::size_t k = content[rng.below(cfg.regions)];
                int count = 0;
                for (std::size_t r = 0; r < cfg.regions; ++r)
                    if (content[r] == k) ++count;
                answer = kNumberBase + count;  // counts >= 1; kNumberBase itself stays prior-only
                rec.question_tokens = {tok.type_tok(type), tok.class_tok(k),
                                       tok.filler_tok(rng.below(8))};
                break;
            }
            case QuestionType::other: {
                // "what is the content of region r?"
                std::size_t r = rng.below(cfg.regions);
                answer = kOtherBase + static_cast<int>(content[r]);
                rec.question_tokens = {tok.type_tok(type), tok.region_tok(r),
                                       tok.filler_tok(rng.below(8))};
                break;
            }
        }

        // language-prior skew: sometimes the dataset's label is just the
        // type-modal answer, independent of the scene
        if (rng.uniform() < cfg.prior_skew) answer = modal_answer(type);
        rec.ground_truth = answer;

        // ten annotators
        const TypePrior& prior = priors[static_cast<int>(type)];
        rec.human_answers.resize(10);
        for (int a = 0; a < 10; ++a)
            rec.human_answers[a] =
                rng.uniform() < cfg.annotator_agreement ? answer : prior.sample(rng);

        // the ground truth must be a mode of the human answers
        std::map<int, int> counts;
        for (int a : rec.human_answers) ++counts[a];
        if (counts[answer] == 0) {
            rec.human_answers[0] = answer;
            counts.clear();
            for (int a : rec.human_answers) ++counts[a];
        }
        for (auto& [ans, cnt] : counts) {
            while (ans != answer && cnt > counts[answer]) {
                for (int& h : rec.human_answers)
                    if (h == ans) {
                        h = answer;
                        break;
                    }
                --cnt;
                ++counts[answer];
            }
        }
    }
    return records;
}

std::vector<std::vector<double>> split_regions(const VqaRecord& rec, std::size_t regions) {
    if (regions == 0 || rec.image_features.size() % regions != 0)
        throw ConfigError("split_regions: feature dim not divisible by region count");
    std::size_t rd = rec.image_features.size() / regions;
    std::vector<std::vector<double>> out(regions);
    for (std::size_t r = 0; r < regions; ++r)
        out[r].assign(rec.image_features.begin() + r * rd,
                      rec.image_features.begin() + (r + 1) * rd);
    return out;
}

void save_dataset(const std::vector<VqaRecord>& records, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("dataset: cannot open for writing: " + path);
    for (const VqaRecord& rec : records) {
        nlohmann::json j;
        j["img"] = rec.image_features;
        j["q"] = rec.question_tokens;
        j["humans"] = rec.human_answers;
        j["type"] = question_type_name(rec.question_type);
        j["gt"] = rec.ground_truth;
        os << j.dump() << '\n';
    }
    if (!os) throw ConfigError("dataset: write failed: " + path);
}

std::vector<VqaRecord> load_dataset(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("dataset: cannot open: " + path);
    std::vector<VqaRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ConfigError("dataset: malformed JSON at line " + std::to_string(line_no));
        try {
            VqaRecord rec;
            rec.image_features = j.at("img").get<std::vector<double>>();
            rec.question_tokens = j.at("q").get<std::vector<int>>();
            rec.human_answers = j.at("humans").get<std::vector<int>>();
            rec.question_type = question_type_from_name(j.at("type").get<std::string>());
            rec.ground_truth = j.at("gt").get<int>();
            if (rec.human_answers.size() != 10)
                throw ConfigError("expected exactly 10 human answers");
            records.push_back(std::move(rec));
        } catch (const std::exception& e) {
            throw ConfigError("dataset: invalid record at line " + std::to_string(line_no) +
                              ": " + e.what());
        }
    }
    return records;
}

}  // namespace vqalab::data
