#include "vqalab/data/metric.hpp"

#include <algorithm>

namespace vqalab::data {

const char* metric_mode_name(MetricMode m) {
    return m == MetricMode::strict ? "strict" : "official";
}

MetricMode metric_mode_from_name(const std::string& name) {
    if (name == "strict") return MetricMode::strict;
    if (name == "official") return MetricMode::official;
    throw ConfigError("unknown metric mode: " + name);
}

double vqa_score(int predicted, const std::vector<int>& human_answers, MetricMode mode) {
    if (human_answers.size() != 10)
        throw ConfigError("vqa_score: expected exactly 10 human answers");
    int matches = static_cast<int>(std::count(human_answers.begin(), human_answers.end(), predicted));
    if (mode == MetricMode::strict) return matches >= 3 ? 1.0 : 0.0;
    return std::min(static_cast<double>(matches) / 3.0, 1.0);
}

EvalBreakdown evaluate_model(const std::function<int(const VqaRecord&)>& predict,
                             const std::vector<VqaRecord>& records, MetricMode mode) {
    if (records.empty()) throw ConfigError("evaluate_model: dataset is empty");
    EvalBreakdown b;
    double sums[3] = {0.0, 0.0, 0.0};
    std::size_t counts[3] = {0, 0, 0};
    for (const VqaRecord& rec : records) {
        double s = vqa_score(predict(rec), rec.human_answers, mode);
        int t = static_cast<int>(rec.question_type);
        sums[t] += s;
        ++counts[t];
    }
    auto pct = [](double sum, std::size_t n) { return n == 0 ? 0.0 : 100.0 * sum / static_cast<double>(n); };
    b.n_yes_no = counts[0];
    b.n_number = counts[1];
    b.n_other = counts[2];
    b.n_all = records.size();
    b.yes_no = pct(sums[0], counts[0]);
    b.number = pct(sums[1], counts[1]);
    b.other = pct(sums[2], counts[2]);
    b.all = pct(sums[0] + sums[1] + sums[2], records.size());
    return b;
}

}  // namespace vqalab::data
