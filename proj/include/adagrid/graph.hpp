#pragma once

#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "adagrid/edge.hpp"

namespace adagrid {

/// Undirected featured graph. Node features are binary word-presence vectors,
/// stored as sorted column indices per node. Edges are normalized (u < v),
/// sorted and unique; no self loops.
struct Graph {
    std::int32_t num_nodes = 0;
    std::vector<std::string> node_ids;
    std::int32_t feature_dim = 0;
    std::vector<std::vector<std::int32_t>> feature_cols;
    EdgeList edges;
    std::vector<std::int32_t> labels;      // empty when the dataset carries none
    std::vector<std::string> label_names;

    /// num_nodes x feature_dim sparse 0/1 matrix.
    Eigen::SparseMatrix<double> feature_matrix() const;

    /// Throws on violated invariants (self loops, duplicates, bad indices,
    /// inconsistent feature dimension).
    void validate() const;
};

} // namespace adagrid
