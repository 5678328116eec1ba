#include "adagrid/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <numeric>

#include "adagrid/errors.hpp"

namespace adagrid {

double auc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
    if (pos_scores.empty() || neg_scores.empty()) {
        throw DegenerateInputError("auc: requires non-empty positive and negative score lists");
    }
    const std::size_t n_pos = pos_scores.size();
    const std::size_t n_neg = neg_scores.size();
    const std::size_t n = n_pos + n_neg;

    // index < n_pos marks a positive score
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    auto score_of = [&](std::uint32_t i) {
        return i < n_pos ? pos_scores[i] : neg_scores[i - n_pos];
    };
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return score_of(a) < score_of(b);
    });

    // Sum twice the average rank of the positives; with ties resolved by
    // average ranks every value is a multiple of 1/2, so the numerator stays
    // an exact integer.
    std::int64_t pos_rank2_sum = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && score_of(order[j + 1]) == score_of(order[i])) ++j;
        // 1-based ranks i+1 .. j+1 share the average rank (i+j+2)/2
        const std::int64_t rank2 = static_cast<std::int64_t>(i) + static_cast<std::int64_t>(j) + 2;
        for (std::size_t k = i; k <= j; ++k) {
            if (order[k] < n_pos) pos_rank2_sum += rank2;
        }
        i = j + 1;
    }

    const std::int64_t m = static_cast<std::int64_t>(n_pos);
    const std::int64_t u2 = pos_rank2_sum - m * (m + 1);
    return static_cast<double>(u2) /
           (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double smoothed_tail(std::span<const double> history, int window) {
    assert(!history.empty());
    assert(window >= 1);
    const std::size_t take = std::min(history.size(), static_cast<std::size_t>(window));
    double sum = 0.0;
    for (std::size_t i = history.size() - take; i < history.size(); ++i) sum += history[i];
    return sum / static_cast<double>(take);
}

} // namespace adagrid
