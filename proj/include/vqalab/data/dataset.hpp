#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vqalab/common.hpp"

namespace vqalab::data {

enum class QuestionType { yes_no, number, other };

const char* question_type_name(QuestionType t);
QuestionType question_type_from_name(const std::string& name);

// Answer id layout: 0 = "no", 1 = "yes"; [2, 12) number answers; [12, K) other
// answers. The modal prior answer per type is 1, 2 and 12 respectively.
constexpr int kAnswerNo = 0;
constexpr int kAnswerYes = 1;
constexpr int kNumberBase = 2;
constexpr int kOtherBase = 12;

struct VqaRecord {
    std::vector<double> image_features;  // d_i = regions * region_dim, row-major by region
    std::vector<int> question_tokens;
    std::vector<int> human_answers;  // exactly 10
    QuestionType question_type = QuestionType::other;
    int ground_truth = 0;  // mode of human_answers
};

struct DatasetConfig {
    std::size_t n_records = 1000;
    std::size_t d_i = 32;        // must be divisible by regions
    std::size_t vocab_size = 32; // >= 3 + content_classes + regions + 1
    std::size_t answer_vocab = 32;  // K, >= kOtherBase + content_classes
    double mix_yes_no = 0.4;
    double mix_number = 0.3;
    double mix_other = 0.3;
    double prior_skew = 0.3;         // in [0,1]
    double annotator_agreement = 0.75;  // in [0,1]
    std::uint64_t seed = 1;

    // Hidden-rule knobs.
    std::size_t regions = 4;
    std::size_t content_classes = 6;
    double feature_noise = 0.3;

    void validate() const;
    std::size_t region_dim() const { return d_i / regions; }
};

// Deterministic synthetic corpus: every region of an image carries one latent
// content class; questions are token templates asking about region contents;
// ten simulated annotators answer with configurable agreement against
// type-specific answer priors.
std::vector<VqaRecord> generate_dataset(const DatasetConfig& config);

// Region views of a record's feature vector.
std::vector<std::vector<double>> split_regions(const VqaRecord& rec, std::size_t regions);

// JSONL persistence; load(save(x)) == x exactly.
void save_dataset(const std::vector<VqaRecord>& records, const std::string& path);
std::vector<VqaRecord> load_dataset(const std::string& path);

}  // namespace vqalab::data
