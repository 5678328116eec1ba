#pragma once

#include <cstdint>
#include <filesystem>

#include "adagrid/edge.hpp"
#include "adagrid/graph.hpp"

namespace adagrid {

/// Train/validation/test fractions; must be positive and sum to 1.
struct SplitRatio {
    double train_frac = 0.8;
    double val_frac = 0.1;
    double test_frac = 0.1;

    void validate() const;
};

/// Negative edges for the three evaluation sets, filled by the sampling
/// module once per run.
struct NegativeSets {
    EdgeList train;
    EdgeList val;
    EdgeList test;
};

/// Positive-edge partition plus the message/objective split of the training
/// edges for the current phase. Values are immutable by convention; the
/// resample operation returns an updated copy.
struct SplitState {
    EdgeList train_pos;
    EdgeList val_pos;
    EdgeList test_pos;
    EdgeList message_edges;
    EdgeList objective_edges;
    double edge_message_ratio = 0.5;
    NegativeSets negatives;
    std::uint64_t rng_seed = 0;
};

/// Rounding rule used throughout the split logic: round half up.
std::int64_t round_half_up(double x);

/// Message-edge count for a training set of the given size: round half up,
/// then clamp so message and objective parts each keep at least one edge.
std::int64_t message_count(std::int64_t train_size, double ratio);

/// Partition the graph's edges into train/val/test positives. Validation and
/// test sizes are round(frac * |E|); the remainder goes to the training set.
/// The message/objective partition is initialized at `initial_ratio`.
SplitState split_edges(const Graph& graph, const SplitRatio& ratio, std::uint64_t seed,
                       double initial_ratio = 0.5);

/// Freshly partition train_pos into message and objective edges at `ratio`.
SplitState resample_message_split(const SplitState& state, double ratio, std::uint64_t seed);

enum class EvalPhase { validation, test };

/// Edges available for message passing when scoring the given phase:
/// all training positives for validation, training plus validation positives
/// for test. The scored edges never appear in the returned set.
EdgeList message_graph_for_eval(const SplitState& state, EvalPhase phase);

/// Split manifest: header with seed and ratios, then one `u v {train|val|test}`
/// line per edge in stored order. Reloading reproduces the state bit-exactly
/// (negative sets are exported separately by the sampling module).
void save_split_manifest(const SplitState& state, const SplitRatio& ratio,
                         const std::filesystem::path& path);
SplitState load_split_manifest(const std::filesystem::path& path, SplitRatio* ratio_out = nullptr);

} // namespace adagrid
