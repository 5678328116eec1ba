#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adagrid/edge_split.hpp"
#include "adagrid/gcn.hpp"
#include "adagrid/optimizer.hpp"

namespace adagrid {

/// How AdaGrid picks the next ratio: highest smoothed validation AUC, or
/// smallest |smoothed train AUC - smoothed val AUC|.
enum class Criterion { validation, gap };

enum class SearchMethod { adagrid, complete, random, fixed };

std::string criterion_name(Criterion criterion);
std::string method_name(SearchMethod method);

struct SearchConfig {
    std::int64_t total_epochs = 500; // N
    std::int64_t adapt_epochs = 10;  // alpha
    std::int64_t try_epochs = 1;     // beta <= alpha
    std::vector<double> ratio_set;   // Q, each in (0,1), distinct
    Criterion criterion = Criterion::validation;
    int smoothing_window = 5;
    std::uint64_t seed = 0;

    /// Checks the fields the given method actually uses.
    void validate(SearchMethod method) const;
};

/// The nine-value default Q = {0.1, 0.2, ..., 0.9}.
std::vector<double> default_ratio_set();

struct EpochStats {
    std::int64_t epoch = 0; // global schedule position after the epoch (1-based)
    double ratio = 0.0;
    double loss = 0.0;
    double train_auc = 0.0;
    double val_auc = 0.0;
    double lr = 0.0;
};

struct CandidateScore {
    double ratio = 0.0;
    double score = 0.0; // smoothed val AUC, or the train/val gap
};

struct PhaseEntry {
    std::int64_t phase = 0;
    double chosen_ratio = 0.0;
    std::vector<CandidateScore> candidate_scores;
};

struct TrainingRecord {
    std::vector<EpochStats> epochs; // the kept lineage only
    std::vector<PhaseEntry> phases;
    std::int64_t total_epochs_consumed = 0; // includes discarded trial epochs
};

/// Algorithm-level TRAIN function: `span` epochs at one ratio, mutating the
/// passed state in place and appending per-epoch stats. Implementations count
/// every epoch they execute, which is what the budget tests audit.
class EpochTrainer {
public:
    virtual ~EpochTrainer() = default;

    void train(GcnParameters& params, OptimizerState& optimizer, SplitState& split, double ratio,
               std::int64_t span, std::vector<EpochStats>& stats);

    std::int64_t consumed() const { return consumed_; }

protected:
    virtual void run_epochs(GcnParameters& params, OptimizerState& optimizer, SplitState& split,
                            double ratio, std::int64_t span, std::vector<EpochStats>& stats) = 0;

private:
    std::int64_t consumed_ = 0;
};

struct CandidateHistory {
    double ratio = 0.0;
    std::vector<double> train_auc;
    std::vector<double> val_auc;
};

/// Criterion-based phase selection; ties go to the smallest ratio. When
/// `scores` is given, the per-candidate criterion values are written there.
double select_ratio(std::span<const CandidateHistory> candidates, Criterion criterion, int window,
                    std::vector<CandidateScore>* scores = nullptr);

/// A finished training run: final state plus its record.
struct TrainOutcome {
    GcnParameters params;
    OptimizerState optimizer;
    SplitState split;
    TrainingRecord record;
};

/// AdaGrid (adaptive grid search): every alpha epochs fan out one trial copy
/// per ratio in Q, train each beta epochs, keep the criterion winner, continue
/// it for alpha - beta epochs.
TrainOutcome adagrid_train(const GcnParameters& params, const OptimizerState& optimizer,
                           const SplitState& split, const SearchConfig& config,
                           EpochTrainer& trainer);

struct CompleteRun {
    double ratio = 0.0;
    double smoothed_val_auc = 0.0;
    TrainingRecord record;
};

struct CompleteOutcome {
    TrainOutcome best;
    double best_ratio = 0.0;
    std::vector<CompleteRun> runs;
    std::int64_t total_epochs_consumed = 0;
};

/// One full fixed-ratio run per q in Q from the same initial state; the run
/// with the highest final smoothed validation AUC wins.
CompleteOutcome complete_search(const GcnParameters& params, const OptimizerState& optimizer,
                                const SplitState& split, const SearchConfig& config,
                                EpochTrainer& trainer);

/// One run drawing the ratio uniformly from [0.1, 0.9] before every epoch
/// (or from Q when from_grid is set).
TrainOutcome random_search(const GcnParameters& params, const OptimizerState& optimizer,
                           const SplitState& split, const SearchConfig& config,
                           EpochTrainer& trainer, bool from_grid = false);

/// Plain fixed-ratio training for total_epochs.
TrainOutcome fixed_ratio_train(const GcnParameters& params, const OptimizerState& optimizer,
                               const SplitState& split, double ratio, std::int64_t total_epochs,
                               EpochTrainer& trainer);

/// Exact epoch budget: AdaGrid N(1 + (L-1) beta / alpha), complete N*L,
/// random/fixed N. AdaGrid requires alpha | N so the result is an integer.
std::int64_t epoch_budget(std::int64_t total_epochs, std::int64_t adapt_epochs,
                          std::int64_t try_epochs, std::int64_t num_ratios, SearchMethod method);

} // namespace adagrid
