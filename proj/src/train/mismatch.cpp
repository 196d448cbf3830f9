#include "vqalab/train/mismatch.hpp"

#include <algorithm>
#include <numeric>

#include "vqalab/common.hpp"

namespace vqalab::train {

namespace {

bool valid(const std::vector<std::size_t>& perm, const std::vector<int>& answers) {
    for (std::size_t i = 0; i < perm.size(); ++i)
        if (perm[i] == i || answers[perm[i]] == answers[i]) return false;
    return true;
}

}  // namespace

std::vector<std::size_t> sample_mismatched(const std::vector<int>& answers, nn::Rng& rng) {
    std::size_t n = answers.size();
    if (n < 2) throw ConfigError("sample_mismatched: batch size must be >= 2");
    if (std::all_of(answers.begin(), answers.end(), [&](int a) { return a == answers[0]; }))
        throw ConfigError("sample_mismatched: all answers identical, no valid mismatch exists");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int attempt = 0; attempt < 64; ++attempt) {
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        if (valid(perm, answers)) return perm;
    }

    // Derangement by rotation over answer-grouped order; valid whenever the
    // largest answer group covers at most half the batch.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return answers[a] < answers[b]; });
    std::size_t max_group = 1, run = 1;
    for (std::size_t p = 1; p < n; ++p) {
        run = answers[order[p]] == answers[order[p - 1]] ? run + 1 : 1;
        max_group = std::max(max_group, run);
    }
    std::vector<std::size_t> rotated(n);
    for (std::size_t p = 0; p < n; ++p) rotated[order[p]] = order[(p + max_group) % n];
    if (valid(rotated, answers)) return rotated;

    // Dominant-answer batch: fall back to per-element partners (pairings may
    // repeat but every element is matched against a differing answer).
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> candidates;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && answers[j] != answers[i]) candidates.push_back(j);
        if (candidates.empty())
            throw ConfigError("sample_mismatched: an element has no differing-answer partner");
        rotated[i] = candidates[rng.below(candidates.size())];
    }
    return rotated;
}

}  // namespace vqalab::train
