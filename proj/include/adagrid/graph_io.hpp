#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "adagrid/graph.hpp"

namespace adagrid {

/// One parsed line of a .content file.
struct NodeRecord {
    std::vector<std::int32_t> word_cols; // sorted indices of attributes that are 1
    std::string label;
};

/// Node table in content-file order. Index order is the graph's node order.
struct NodeTable {
    std::vector<std::string> ids;
    std::vector<NodeRecord> rows;
    std::unordered_map<std::string, std::int32_t> index_of;
    std::int32_t feature_dim = 0;
};

/// Counts gathered while building a graph from a citation file. The raw
/// distributions count directed lines; `edges_retained` counts unique
/// undirected pairs, so both directed and undirected edge tallies can be
/// checked against a load.
struct LoadSummary {
    std::int32_t num_nodes = 0;
    std::int64_t cite_lines = 0;
    std::int64_t self_loops_dropped = 0;
    std::int64_t duplicates_collapsed = 0;
    std::int64_t dangling_skipped = 0;
    std::int64_t edges_retained = 0;

    std::string to_string() const;
};

/// Parse a .content file: one node per line, tab separated as
/// `<id> <attr_1> ... <attr_d> <label>` with binary attributes. The feature
/// dimension is fixed by the first line.
NodeTable load_content(const std::filesystem::path& path);

/// Parse a .cites file (two ids per line) against an already loaded node
/// table. Directions are ignored, duplicates and self citations are dropped,
/// lines naming unknown ids are skipped and tallied.
Graph load_cites(const std::filesystem::path& path, const NodeTable& table,
                 LoadSummary* summary = nullptr);

/// load_content + load_cites in one call.
Graph load_dataset(const std::filesystem::path& content_path,
                   const std::filesystem::path& cites_path,
                   LoadSummary* summary = nullptr);

/// Normalized edge list (ascending `u v` index pairs, one per line).
void save_edge_list(const Graph& graph, const std::filesystem::path& path);
EdgeList load_edge_list(const std::filesystem::path& path, std::int32_t num_nodes);

} // namespace adagrid
