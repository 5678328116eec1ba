#pragma once

#include <span>
#include <vector>

namespace adagrid {

/// Area under the ROC curve of positive vs negative scores: the fraction of
/// (positive, negative) pairs where the positive scores higher, ties counted
/// half. Computed via the rank-sum statistic with an integer numerator, so it
/// equals the O(|pos|*|neg|) pairwise definition bit for bit.
double auc(std::span<const double> pos_scores, std::span<const double> neg_scores);

/// Mean of the last min(window, size) entries.
double smoothed_tail(std::span<const double> history, int window);

/// Per-epoch AUC trajectories of one training run, as consumed by the ratio
/// selection criteria.
struct AucHistory {
    std::vector<double> train_auc;
    std::vector<double> val_auc;
};

} // namespace adagrid
