#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adagrid/edge_split.hpp"
#include "adagrid/gcn.hpp"
#include "adagrid/graph_io.hpp"
#include "adagrid/optimizer.hpp"
#include "adagrid/sampling.hpp"
#include "adagrid/search.hpp"

namespace adagrid {

/// Immutable per-run inputs of the epoch trainer.
struct TrainContext {
    const SparseMatrix* features = nullptr;
    std::int32_t num_nodes = 0;
    std::int64_t resample_interval = 1; // epochs between message/objective resamples
    std::uint64_t run_seed = 0;
    bool track_best_val = false;
};

/// The TRAIN function of the algorithm: per epoch it resamples the
/// message/objective split, takes one full-batch gradient step on the
/// objective edges plus an equal number of training negatives, then records
/// evaluation-mode train and validation AUC. Every per-epoch random choice is
/// derived from (run_seed, schedule position, ratio), so results do not
/// depend on the order in which trials run.
class GcnTrainer final : public EpochTrainer {
public:
    explicit GcnTrainer(TrainContext context);

    /// Snapshot of the weights at the highest validation AUC seen so far
    /// (across everything this trainer trained); null unless tracking is on.
    const GcnParameters* best_params() const { return have_best_ ? &best_params_ : nullptr; }
    double best_val_auc() const { return best_val_auc_; }

protected:
    void run_epochs(GcnParameters& params, OptimizerState& optimizer, SplitState& split,
                    double ratio, std::int64_t span, std::vector<EpochStats>& stats) override;

private:
    TrainContext ctx_;
    EdgeList cached_val_operator_edges_;
    SparseMatrix cached_val_operator_;
    bool have_best_ = false;
    double best_val_auc_ = 0.0;
    GcnParameters best_params_;
};

/// AUC of decoder scores (capped logits; monotone in the probability) for
/// positive versus negative pairs under fixed embeddings.
double evaluate_auc(const Eigen::MatrixXd& embeddings, std::span<const Edge> pos,
                    std::span<const Edge> neg);

enum class CriterionMode { validation, gap, both };

std::string criterion_mode_name(CriterionMode mode);

struct ModelSpec {
    std::int32_t layers = 2; // K
    std::int32_t hidden = 64; // o, the shared hidden/output width
};

struct ExperimentSpec {
    std::string dataset = "cora"; // cora | citeseer | custom path prefix
    std::filesystem::path data_dir; // empty: $ADAGRID_DATA_DIR, then ./data
    SplitRatio split{0.8, 0.1, 0.1};
    NegSampleMode neg_mode = NegSampleMode::uniform;
    SearchMethod method = SearchMethod::adagrid;
    SearchConfig search; // per-repeat criterion/seed fields are filled by the runner
    CriterionMode criterion_mode = CriterionMode::validation;
    double fixed_ratio = 0.5; // method fixed only
    bool random_from_grid = false; // method random: draw from Q instead of [0.1, 0.9]
    ModelSpec model;
    int repeats = 3;
    std::uint64_t seed = 1;
    std::int64_t resample_interval = 1;
    bool best_val_checkpoint = false;
    std::filesystem::path output_dir = "results";

    void validate() const;
};

/// Stable hex digest of the spec, used as the artifact directory name.
std::string spec_hash(const ExperimentSpec& spec);

struct RepeatResult {
    int repeat = 0;
    bool failed = false;
    std::string error;
    double test_auc = 0.0; // percent, final weights
    std::optional<double> test_auc_best_val; // percent, best-validation weights
    std::int64_t epochs_consumed = 0;
    double wall_time_s = 0.0;
};

struct CriterionOutcome {
    Criterion criterion = Criterion::validation;
    std::vector<RepeatResult> repeats;
    double mean_test_auc = 0.0; // over successful repeats
};

struct ExperimentResult {
    std::string hash;
    std::vector<CriterionOutcome> outcomes; // two entries under CriterionMode::both
    std::size_t reported = 0; // index of the outcome with the better mean
    double epochs_rel = 0.0; // mean consumed epochs / N
    bool any_failed = false;

    const CriterionOutcome& reported_outcome() const { return outcomes[reported]; }
};

/// Runs all repeats (and both criteria under CriterionMode::both), writes
/// per-repeat artifacts and a run.json under output_dir/<hash>/, and returns
/// the aggregate. A repeat failure is recorded and the remaining repeats run.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Maps a dataset name to its .content/.cites pair. Known names (cora,
/// citeseer) resolve inside data_dir; anything else is taken as a path prefix.
std::pair<std::filesystem::path, std::filesystem::path> resolve_dataset(
    const std::string& dataset, const std::filesystem::path& data_dir);

/// Loads the dataset an ExperimentSpec refers to.
Graph load_spec_dataset(const ExperimentSpec& spec, LoadSummary* summary = nullptr);

/// Scans results_dir/*/run.json and writes table.csv plus an aligned
/// table.txt with per-column Gain and relative-epochs rows.
void emit_tables(const std::filesystem::path& results_dir);

} // namespace adagrid
