#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>

#include "adagrid/edge.hpp"
#include "adagrid/edge_split.hpp"
#include "adagrid/graph.hpp"

namespace adagrid {

/// Disjoint community assignment of all nodes.
struct Partition {
    std::vector<std::int32_t> community_of;
    std::int32_t num_communities = 0;
    double modularity = 0.0;
};

enum class NegSampleMode { uniform, community_ratio };

/// How many negatives to draw per set and, in community-ratio mode, which
/// fraction of them must fall within a community.
struct NegativeSamplePlan {
    NegSampleMode mode = NegSampleMode::uniform;
    double target_ratio = 0.0; // community_ratio mode only
    std::int64_t train_count = 0;
    std::int64_t val_count = 0;
    std::int64_t test_count = 0;
};

/// Newman modularity (resolution 1) of a partition of the given edge set.
double modularity(std::span<const Edge> edges, std::span<const std::int32_t> community_of);

/// Greedy agglomerative modularity maximization: start from singleton
/// communities and repeatedly merge the connected pair with the largest
/// modularity gain while a strictly positive gain exists. Communities are
/// renumbered contiguously in order of their smallest member.
Partition detect_communities(std::span<const Edge> edges, std::int32_t num_nodes);

/// Fraction of the listed node pairs whose endpoints share a community.
double community_ratio(std::span<const Edge> pairs, const Partition& partition);

/// Balanced negative counts for a split: one negative per positive edge of
/// each set (the training pool is sized by all training positives; each epoch
/// consumes a prefix matching its objective-edge count).
NegativeSamplePlan make_plan(const SplitState& split, NegSampleMode mode,
                             double target_ratio = 0.0);

/// Draw the per-set negative edge lists. Every sample is a non-edge of the
/// full graph and unique across all three sets. In community-ratio mode,
/// round(target_ratio * count) negatives per set are within-community (ties
/// round up), the remainder between-community.
NegativeSets sample_negatives(const Graph& graph, const SplitState& split,
                              const NegativeSamplePlan& plan,
                              const std::optional<Partition>& partition, std::uint64_t seed);

/// One `node_id community_index` line per node.
void save_partition(const Partition& partition, const Graph& graph,
                    const std::filesystem::path& path);

/// Negative-set export, mirroring the split manifest: per-set counts in the
/// header, then `u v neg` lines (train, then val, then test blocks).
void save_negatives(const NegativeSets& sets, const std::filesystem::path& path);
NegativeSets load_negatives(const std::filesystem::path& path);

} // namespace adagrid
