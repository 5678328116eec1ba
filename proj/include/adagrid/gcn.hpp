#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "adagrid/edge.hpp"

namespace adagrid {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Inverted dropout keeps entries with this probability and rescales them.
inline constexpr double kDropoutKeepProb = 0.8;

/// Decoder logits are clamped to this magnitude before sigmoid/BCE.
inline constexpr double kLogitCap = 30.0;

/// Trainable state of the K-layer GCN: weight matrix W_k maps layer k-1
/// activations (input features for k=1) to the shared hidden/output width.
struct GcnParameters {
    std::vector<Eigen::MatrixXd> layer_weights;

    std::int32_t num_layers() const { return static_cast<std::int32_t>(layer_weights.size()); }
    std::int32_t input_dim() const { return static_cast<std::int32_t>(layer_weights.front().rows()); }
    std::int32_t output_dim() const { return static_cast<std::int32_t>(layer_weights.back().cols()); }
    void validate() const;
};

/// Glorot-uniform initialization of every layer, deterministic under `seed`.
GcnParameters init_parameters(std::int32_t input_dim, std::int32_t output_dim,
                              std::int32_t num_layers, std::uint64_t seed);

/// Symmetric-normalized adjacency with self-loops over the message edges:
/// A_hat = D^{-1/2} (A + I) D^{-1/2}. Isolated nodes keep a pure self-loop row.
SparseMatrix normalize_adjacency(std::span<const Edge> message_edges, std::int32_t num_nodes);

/// Everything the backward pass needs from one forward evaluation.
struct ForwardTrace {
    SparseMatrix dropped_features;             // layer-1 input after dropout
    std::vector<Eigen::MatrixXd> layer_inputs; // inputs to layers 2..K after dropout
    std::vector<Eigen::MatrixXd> scaled_masks; // dropout masks/keep for layers 2..K
    std::vector<Eigen::MatrixXd> pre_activations; // A_hat * input_k * W_k for k = 1..K
    bool dropout_active = false;

    const Eigen::MatrixXd& embeddings() const { return pre_activations.back(); }
};

/// Layer k computes H_k = A_hat * dropout(H_{k-1}) * W_k with ReLU after all
/// layers but the last. Dropout is identity when inactive; when active it is
/// inverted dropout (zero with probability 0.2, scale kept entries by 1/0.8),
/// reproducible under `seed`.
ForwardTrace forward(const GcnParameters& params, const SparseMatrix& features,
                     const SparseMatrix& op, bool dropout_active, std::uint64_t seed);

/// Evaluation-mode embeddings (dropout off, no trace kept).
Eigen::MatrixXd forward_embeddings(const GcnParameters& params, const SparseMatrix& features,
                                   const SparseMatrix& op);

/// Decoder: P((u,v) in E) = sigmoid(h_u . h_v), logit capped at +-kLogitCap.
double predict_edge(const Eigen::VectorXd& h_u, const Eigen::VectorXd& h_v);

/// Capped decoder logit for a node pair of an embedding matrix.
double edge_logit(const Eigen::MatrixXd& embeddings, const Edge& e);

/// Mean binary cross-entropy over positives (target 1) and negatives
/// (target 0), plus exact gradients with respect to every layer weight.
struct LossAndGradients {
    double loss = 0.0;
    std::vector<Eigen::MatrixXd> gradients;
};

LossAndGradients loss_and_gradients(const GcnParameters& params, const SparseMatrix& features,
                                    const SparseMatrix& op, std::span<const Edge> objective_pos,
                                    std::span<const Edge> objective_neg, bool dropout_active,
                                    std::uint64_t seed);

/// Loss only (same value the gradient routine reports); used by the
/// finite-difference oracle.
double loss_value(const GcnParameters& params, const SparseMatrix& features,
                  const SparseMatrix& op, std::span<const Edge> objective_pos,
                  std::span<const Edge> objective_neg);

/// Checkpoints. The text form round-trips bit-exactly; the binary form stores
/// raw doubles. save/load pick the format from the extension (".bin" binary,
/// anything else text).
void save_parameters(const GcnParameters& params, const std::filesystem::path& path);
GcnParameters load_parameters(const std::filesystem::path& path);

} // namespace adagrid
