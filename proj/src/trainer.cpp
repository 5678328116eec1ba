#include "adagrid/harness.hpp"

#include "adagrid/errors.hpp"
#include "adagrid/metrics.hpp"
#include "adagrid/rng.hpp"

namespace adagrid {

namespace {
constexpr std::uint64_t kResampleTag = 0x452821e638d01377ULL;
constexpr std::uint64_t kDropoutTag = 0xbe5466cf34e90c6cULL;
} // namespace

GcnTrainer::GcnTrainer(TrainContext context) : ctx_(context) {
    if (ctx_.features == nullptr) throw ConfigError("GcnTrainer: features missing");
    if (ctx_.num_nodes != ctx_.features->rows()) {
        throw ShapeError("GcnTrainer: feature row count does not match num_nodes");
    }
    if (ctx_.resample_interval < 1) {
        throw ConfigError("GcnTrainer: resample interval must be >= 1");
    }
}

double evaluate_auc(const Eigen::MatrixXd& embeddings, std::span<const Edge> pos,
                    std::span<const Edge> neg) {
    std::vector<double> pos_scores, neg_scores;
    pos_scores.reserve(pos.size());
    neg_scores.reserve(neg.size());
    for (const Edge& e : pos) pos_scores.push_back(edge_logit(embeddings, e));
    for (const Edge& e : neg) neg_scores.push_back(edge_logit(embeddings, e));
    return auc(pos_scores, neg_scores);
}

void GcnTrainer::run_epochs(GcnParameters& params, OptimizerState& optimizer, SplitState& split,
                            double ratio, std::int64_t span, std::vector<EpochStats>& stats) {
    const SparseMatrix& features = *ctx_.features;

    // The validation-phase operator spans all training positives, which never
    // change within a run; cache it across calls (trial copies share train_pos).
    if (cached_val_operator_edges_ != split.train_pos) {
        cached_val_operator_edges_ = split.train_pos;
        cached_val_operator_ = normalize_adjacency(cached_val_operator_edges_, ctx_.num_nodes);
    }

    for (std::int64_t i = 0; i < span; ++i) {
        const std::int64_t position = optimizer.epoch_cursor; // 0-based schedule slot
        // One seed per (run, schedule slot, ratio): trial order cannot change
        // any stream, and a collapsed AdaGrid run replays a fixed-ratio run.
        const std::uint64_t epoch_seed =
            mix_seed(ctx_.run_seed, static_cast<std::uint64_t>(position), ratio_bits(ratio));

        const bool resample_due = position % ctx_.resample_interval == 0 ||
                                  split.edge_message_ratio != ratio;
        if (resample_due) {
            split = resample_message_split(split, ratio, mix_seed(epoch_seed, kResampleTag));
        }
        const SparseMatrix op = normalize_adjacency(split.message_edges, ctx_.num_nodes);

        // Balanced objective: as many training negatives as objective edges.
        const std::size_t want = split.objective_edges.size();
        if (split.negatives.train.size() < want) {
            throw DegenerateInputError("train negative pool smaller than the objective set");
        }
        const std::span<const Edge> neg(split.negatives.train.data(), want);

        const LossAndGradients lg =
            loss_and_gradients(params, features, op, split.objective_edges, neg,
                               /*dropout_active=*/true, mix_seed(epoch_seed, kDropoutTag));
        const double lr = lr_at(position, optimizer);
        step(params, lg.gradients, optimizer);
        optimizer.epoch_cursor = position + 1;

        const Eigen::MatrixXd train_embeddings = forward_embeddings(params, features, op);
        const double train_auc = evaluate_auc(train_embeddings, split.objective_edges, neg);
        const Eigen::MatrixXd val_embeddings =
            forward_embeddings(params, features, cached_val_operator_);
        const double val_auc =
            evaluate_auc(val_embeddings, split.val_pos, split.negatives.val);

        stats.push_back({position + 1, ratio, lg.loss, train_auc, val_auc, lr});
        if (ctx_.track_best_val && (!have_best_ || val_auc > best_val_auc_)) {
            have_best_ = true;
            best_val_auc_ = val_auc;
            best_params_ = params;
        }
    }
}

} // namespace adagrid
