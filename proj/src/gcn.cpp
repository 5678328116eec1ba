#include "adagrid/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "adagrid/errors.hpp"
#include "adagrid/rng.hpp"

namespace adagrid {

namespace {
constexpr std::uint64_t kInitTag = 0x3c6ef372fe94f82aULL;
constexpr char kTextHeader[] = "# gcn-parameters v1";
constexpr char kBinaryMagic[8] = {'A', 'G', 'C', 'N', 'C', 'K', 'P', '1'};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double capped(double z) { return std::clamp(z, -kLogitCap, kLogitCap); }

void check_forward_shapes(const GcnParameters& params, const SparseMatrix& features,
                          const SparseMatrix& op) {
    params.validate();
    if (features.cols() != params.layer_weights.front().rows()) {
        throw ShapeError("feature dimension " + std::to_string(features.cols()) +
                         " does not match first layer input " +
                         std::to_string(params.layer_weights.front().rows()));
    }
    if (op.rows() != op.cols() || op.rows() != features.rows()) {
        throw ShapeError("propagation operator must be square over the node count");
    }
}

// Mean BCE over positives (target 1) and negatives (target 0) from final
// embeddings; loss uses the capped logit, so its exact derivative is zero
// wherever the cap is active.
double bce_loss(const Eigen::MatrixXd& h, std::span<const Edge> pos, std::span<const Edge> neg) {
    double total = 0.0;
    for (const Edge& e : pos) total += softplus(-edge_logit(h, e));
    for (const Edge& e : neg) total += softplus(edge_logit(h, e));
    return total / static_cast<double>(pos.size() + neg.size());
}

} // namespace

void GcnParameters::validate() const {
    if (layer_weights.empty()) throw ShapeError("GcnParameters: need at least one layer");
    const auto out = layer_weights.front().cols();
    for (std::size_t k = 0; k < layer_weights.size(); ++k) {
        const auto& w = layer_weights[k];
        if (w.rows() < 1 || w.cols() < 1) throw ShapeError("GcnParameters: empty weight matrix");
        if (w.cols() != out) {
            throw ShapeError("GcnParameters: hidden width changes at layer " + std::to_string(k + 1));
        }
        if (k > 0 && w.rows() != layer_weights[k - 1].cols()) {
            throw ShapeError("GcnParameters: dimension chain breaks at layer " +
                             std::to_string(k + 1));
        }
        if (!w.allFinite()) {
            throw NumericError("GcnParameters: non-finite weight in layer " + std::to_string(k + 1));
        }
    }
}

GcnParameters init_parameters(std::int32_t input_dim, std::int32_t output_dim,
                              std::int32_t num_layers, std::uint64_t seed) {
    if (num_layers < 1) throw ShapeError("init_parameters: num_layers must be >= 1");
    if (input_dim < 1 || output_dim < 1) throw ShapeError("init_parameters: dimensions must be >= 1");
    GcnParameters params;
    params.layer_weights.reserve(static_cast<std::size_t>(num_layers));
    for (std::int32_t k = 0; k < num_layers; ++k) {
        const std::int32_t fan_in = k == 0 ? input_dim : output_dim;
        const std::int32_t fan_out = output_dim;
        const double scale = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Eigen::MatrixXd w(fan_in, fan_out);
        Rng rng(mix_seed(seed, kInitTag, static_cast<std::uint64_t>(k)));
        for (std::int32_t i = 0; i < fan_in; ++i) {
            for (std::int32_t j = 0; j < fan_out; ++j) w(i, j) = rng.uniform(-scale, scale);
        }
        params.layer_weights.push_back(std::move(w));
    }
    return params;
}

SparseMatrix normalize_adjacency(std::span<const Edge> message_edges, std::int32_t num_nodes) {
    std::vector<double> degree(num_nodes, 1.0); // self-loop
    for (const Edge& e : message_edges) {
        if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes) {
            throw ShapeError("normalize_adjacency: edge endpoint out of range");
        }
        degree[e.u] += 1.0;
        degree[e.v] += 1.0;
    }
    std::vector<double> inv_sqrt(num_nodes);
    for (std::int32_t i = 0; i < num_nodes; ++i) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(num_nodes) + 2 * message_edges.size());
    for (std::int32_t i = 0; i < num_nodes; ++i) triplets.emplace_back(i, i, inv_sqrt[i] * inv_sqrt[i]);
    for (const Edge& e : message_edges) {
        const double value = inv_sqrt[e.u] * inv_sqrt[e.v];
        triplets.emplace_back(e.u, e.v, value);
        triplets.emplace_back(e.v, e.u, value);
    }
    SparseMatrix op(num_nodes, num_nodes);
    op.setFromTriplets(triplets.begin(), triplets.end());
    return op;
}

ForwardTrace forward(const GcnParameters& params, const SparseMatrix& features,
                     const SparseMatrix& op, bool dropout_active, std::uint64_t seed) {
    check_forward_shapes(params, features, op);
    const auto n = features.rows();
    const std::int32_t layers = params.num_layers();
    Rng rng(seed);

    ForwardTrace trace;
    trace.dropout_active = dropout_active;

    if (dropout_active) {
        std::vector<Eigen::Triplet<double>> kept;
        kept.reserve(static_cast<std::size_t>(features.nonZeros()));
        for (int outer = 0; outer < features.outerSize(); ++outer) {
            for (SparseMatrix::InnerIterator it(features, outer); it; ++it) {
                if (rng.bernoulli(kDropoutKeepProb)) {
                    kept.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                      it.value() / kDropoutKeepProb);
                }
            }
        }
        trace.dropped_features.resize(features.rows(), features.cols());
        trace.dropped_features.setFromTriplets(kept.begin(), kept.end());
    } else {
        trace.dropped_features = features;
    }
    trace.pre_activations.push_back(op * (trace.dropped_features * params.layer_weights[0]));

    for (std::int32_t k = 1; k < layers; ++k) {
        Eigen::MatrixXd input = trace.pre_activations.back().cwiseMax(0.0);
        if (dropout_active) {
            Eigen::MatrixXd mask(n, input.cols());
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < input.cols(); ++j) {
                    mask(i, j) = rng.bernoulli(kDropoutKeepProb) ? 1.0 / kDropoutKeepProb : 0.0;
                }
            }
            input = input.cwiseProduct(mask);
            trace.scaled_masks.push_back(std::move(mask));
        }
        trace.pre_activations.push_back(op * (input * params.layer_weights[k]));
        trace.layer_inputs.push_back(std::move(input));
    }
    return trace;
}

Eigen::MatrixXd forward_embeddings(const GcnParameters& params, const SparseMatrix& features,
                                   const SparseMatrix& op) {
    check_forward_shapes(params, features, op);
    Eigen::MatrixXd h = op * (features * params.layer_weights[0]);
    for (std::int32_t k = 1; k < params.num_layers(); ++k) {
        h = op * (h.cwiseMax(0.0) * params.layer_weights[k]);
    }
    return h;
}

double predict_edge(const Eigen::VectorXd& h_u, const Eigen::VectorXd& h_v) {
    if (h_u.size() != h_v.size()) throw ShapeError("predict_edge: embedding sizes differ");
    return sigmoid(capped(h_u.dot(h_v)));
}

double edge_logit(const Eigen::MatrixXd& embeddings, const Edge& e) {
    return capped(embeddings.row(e.u).dot(embeddings.row(e.v)));
}

LossAndGradients loss_and_gradients(const GcnParameters& params, const SparseMatrix& features,
                                    const SparseMatrix& op, std::span<const Edge> objective_pos,
                                    std::span<const Edge> objective_neg, bool dropout_active,
                                    std::uint64_t seed) {
    if (objective_pos.empty() || objective_neg.empty()) {
        throw DegenerateInputError("loss_and_gradients: objective edge lists must be non-empty");
    }
    const ForwardTrace trace = forward(params, features, op, dropout_active, seed);
    const Eigen::MatrixXd& h = trace.embeddings();
    const auto count = static_cast<double>(objective_pos.size() + objective_neg.size());

    LossAndGradients result;
    result.loss = bce_loss(h, objective_pos, objective_neg);

    // d loss / d embeddings: each sample contributes (sigma(z) - y)/M through
    // both endpoint rows; the contribution vanishes where the logit cap binds.
    Eigen::MatrixXd grad_h = Eigen::MatrixXd::Zero(h.rows(), h.cols());
    auto accumulate = [&](std::span<const Edge> edges, double target) {
        for (const Edge& e : edges) {
            const double raw = h.row(e.u).dot(h.row(e.v));
            if (std::abs(raw) >= kLogitCap) continue;
            const double factor = (sigmoid(raw) - target) / count;
            grad_h.row(e.u) += factor * h.row(e.v);
            grad_h.row(e.v) += factor * h.row(e.u);
        }
    };
    accumulate(objective_pos, 1.0);
    accumulate(objective_neg, 0.0);

    const std::int32_t layers = params.num_layers();
    result.gradients.resize(static_cast<std::size_t>(layers));
    Eigen::MatrixXd grad_pre = std::move(grad_h); // gradient w.r.t. pre_activations[K-1]
    for (std::int32_t k = layers - 1; k >= 0; --k) {
        const Eigen::MatrixXd propagated = op * grad_pre; // op is symmetric
        if (k == 0) {
            result.gradients[0] = trace.dropped_features.transpose() * propagated;
        } else {
            const Eigen::MatrixXd& input = trace.layer_inputs[static_cast<std::size_t>(k - 1)];
            result.gradients[static_cast<std::size_t>(k)] = input.transpose() * propagated;
            Eigen::MatrixXd grad_input = propagated * params.layer_weights[k].transpose();
            if (dropout_active) {
                grad_input = grad_input.cwiseProduct(trace.scaled_masks[static_cast<std::size_t>(k - 1)]);
            }
            const Eigen::MatrixXd& pre = trace.pre_activations[static_cast<std::size_t>(k - 1)];
            grad_pre = grad_input.cwiseProduct(
                (pre.array() > 0.0).cast<double>().matrix());
        }
    }
    return result;
}

double loss_value(const GcnParameters& params, const SparseMatrix& features,
                  const SparseMatrix& op, std::span<const Edge> objective_pos,
                  std::span<const Edge> objective_neg) {
    if (objective_pos.empty() || objective_neg.empty()) {
        throw DegenerateInputError("loss_value: objective edge lists must be non-empty");
    }
    return bce_loss(forward_embeddings(params, features, op), objective_pos, objective_neg);
}

namespace {

void save_text(const GcnParameters& params, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open checkpoint for writing: " + path.string());
    out << kTextHeader << '\n';
    out << "layers " << params.num_layers() << '\n';
    out << "dims " << params.input_dim();
    for (const auto& w : params.layer_weights) out << ' ' << w.cols();
    out << '\n';
    out << std::setprecision(17);
    for (const auto& w : params.layer_weights) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                if (j > 0) out << ' ';
                out << w(i, j);
            }
            out << '\n';
        }
    }
}

GcnParameters load_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open checkpoint: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kTextHeader) {
        throw FormatError("checkpoint header mismatch: " + path.string());
    }
    std::string key;
    std::int32_t layers = 0;
    if (!(in >> key >> layers) || key != "layers" || layers < 1) {
        throw FormatError("checkpoint layer count malformed: " + path.string());
    }
    if (!(in >> key) || key != "dims") throw FormatError("checkpoint dims malformed: " + path.string());
    std::vector<std::int32_t> dims(static_cast<std::size_t>(layers) + 1);
    for (auto& d : dims) {
        if (!(in >> d) || d < 1) throw FormatError("checkpoint dims malformed: " + path.string());
    }
    GcnParameters params;
    for (std::int32_t k = 0; k < layers; ++k) {
        Eigen::MatrixXd w(dims[static_cast<std::size_t>(k)], dims[static_cast<std::size_t>(k) + 1]);
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                if (!(in >> w(i, j))) throw FormatError("checkpoint truncated: " + path.string());
            }
        }
        params.layer_weights.push_back(std::move(w));
    }
    params.validate();
    return params;
}

void save_binary(const GcnParameters& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open checkpoint for writing: " + path.string());
    out.write(kBinaryMagic, sizeof(kBinaryMagic));
    const std::int32_t layers = params.num_layers();
    out.write(reinterpret_cast<const char*>(&layers), sizeof(layers));
    std::int32_t dim = params.input_dim();
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    for (const auto& w : params.layer_weights) {
        dim = static_cast<std::int32_t>(w.cols());
        out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    }
    for (const auto& w : params.layer_weights) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                const double value = w(i, j);
                out.write(reinterpret_cast<const char*>(&value), sizeof(value));
            }
        }
    }
}

GcnParameters load_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open checkpoint: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kBinaryMagic)) {
        throw FormatError("checkpoint magic mismatch: " + path.string());
    }
    std::int32_t layers = 0;
    in.read(reinterpret_cast<char*>(&layers), sizeof(layers));
    if (!in || layers < 1) throw FormatError("checkpoint layer count malformed: " + path.string());
    std::vector<std::int32_t> dims(static_cast<std::size_t>(layers) + 1);
    for (auto& d : dims) {
        in.read(reinterpret_cast<char*>(&d), sizeof(d));
        if (!in || d < 1) throw FormatError("checkpoint dims malformed: " + path.string());
    }
    GcnParameters params;
    for (std::int32_t k = 0; k < layers; ++k) {
        Eigen::MatrixXd w(dims[static_cast<std::size_t>(k)], dims[static_cast<std::size_t>(k) + 1]);
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                double value = 0.0;
                in.read(reinterpret_cast<char*>(&value), sizeof(value));
                if (!in) throw FormatError("checkpoint truncated: " + path.string());
                w(i, j) = value;
            }
        }
        params.layer_weights.push_back(std::move(w));
    }
    params.validate();
    return params;
}

} // namespace

void save_parameters(const GcnParameters& params, const std::filesystem::path& path) {
    params.validate();
    if (path.extension() == ".bin") {
        save_binary(params, path);
    } else {
        save_text(params, path);
    }
}

GcnParameters load_parameters(const std::filesystem::path& path) {
    return path.extension() == ".bin" ? load_binary(path) : load_text(path);
}

} // namespace adagrid
