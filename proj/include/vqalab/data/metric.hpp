#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vqalab/data/dataset.hpp"

namespace vqalab::data {

enum class MetricMode { strict, official };

const char* metric_mode_name(MetricMode m);
MetricMode metric_mode_from_name(const std::string& name);

// Consensus score of one prediction against exactly ten human answers.
// strict: 1 if at least three humans match, else 0. official: min(matches/3, 1).
double vqa_score(int predicted, const std::vector<int>& human_answers, MetricMode mode);

struct EvalBreakdown {
    double all = 0.0;
    double yes_no = 0.0;
    double number = 0.0;
    double other = 0.0;
    std::size_t n_all = 0, n_yes_no = 0, n_number = 0, n_other = 0;
};

// Mean scores scaled to [0,100], overall and per question type.
EvalBreakdown evaluate_model(const std::function<int(const VqaRecord&)>& predict,
                             const std::vector<VqaRecord>& records, MetricMode mode);

}  // namespace vqalab::data
