#include "adagrid/search.hpp"

#include <algorithm>
#include <cmath>

#include "adagrid/errors.hpp"
#include "adagrid/metrics.hpp"
#include "adagrid/rng.hpp"

namespace adagrid {

namespace {
constexpr std::uint64_t kRandomRatioTag = 0x6a09e667f3bcc909ULL;
} // namespace

std::string criterion_name(Criterion criterion) {
    return criterion == Criterion::validation ? "validation" : "gap";
}

std::string method_name(SearchMethod method) {
    switch (method) {
        case SearchMethod::adagrid: return "adagrid";
        case SearchMethod::complete: return "complete";
        case SearchMethod::random: return "random";
        case SearchMethod::fixed: return "fixed";
    }
    return "?";
}

std::vector<double> default_ratio_set() {
    std::vector<double> q(9);
    for (int i = 0; i < 9; ++i) q[static_cast<std::size_t>(i)] = (i + 1) / 10.0;
    return q;
}

void SearchConfig::validate(SearchMethod method) const {
    if (total_epochs < 1) throw ConfigError("search config: total_epochs must be >= 1");
    if (smoothing_window < 1) throw ConfigError("search config: smoothing window must be >= 1");
    const bool needs_ratio_set =
        method == SearchMethod::adagrid || method == SearchMethod::complete;
    if (needs_ratio_set) {
        if (ratio_set.empty()) throw ConfigError("search config: ratio set is empty");
        for (double q : ratio_set) {
            if (!(q > 0.0 && q < 1.0)) {
                throw ConfigError("search config: ratio " + std::to_string(q) +
                                  " outside (0, 1)");
            }
        }
        auto sorted = ratio_set;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ConfigError("search config: ratio set has duplicate values");
        }
    }
    if (method == SearchMethod::adagrid) {
        if (adapt_epochs < 1) throw ConfigError("search config: adapt_epochs must be >= 1");
        if (try_epochs < 1 || try_epochs > adapt_epochs) {
            throw ConfigError("search config: need 1 <= try_epochs <= adapt_epochs");
        }
        if (total_epochs % adapt_epochs != 0) {
            throw ConfigError("search config: adapt_epochs must divide total_epochs");
        }
    }
}

void EpochTrainer::train(GcnParameters& params, OptimizerState& optimizer, SplitState& split,
                         double ratio, std::int64_t span, std::vector<EpochStats>& stats) {
    if (span < 0) throw ConfigError("EpochTrainer: negative epoch span");
    if (span == 0) return;
    run_epochs(params, optimizer, split, ratio, span, stats);
    consumed_ += span;
}

double select_ratio(std::span<const CandidateHistory> candidates, Criterion criterion, int window,
                    std::vector<CandidateScore>* scores) {
    if (candidates.empty()) throw DegenerateInputError("select_ratio: no candidates");
    if (scores != nullptr) scores->clear();

    double best_ratio = 0.0;
    double best_score = 0.0;
    bool have_best = false;
    for (const CandidateHistory& candidate : candidates) {
        if (candidate.val_auc.empty() || candidate.train_auc.empty()) {
            throw DegenerateInputError("select_ratio: candidate with empty AUC history");
        }
        const double val = smoothed_tail(candidate.val_auc, window);
        double score = 0.0;
        bool better = false;
        if (criterion == Criterion::validation) {
            score = val;
            better = !have_best || score > best_score ||
                     (score == best_score && candidate.ratio < best_ratio);
        } else {
            score = std::abs(smoothed_tail(candidate.train_auc, window) - val);
            better = !have_best || score < best_score ||
                     (score == best_score && candidate.ratio < best_ratio);
        }
        if (scores != nullptr) scores->push_back({candidate.ratio, score});
        if (better) {
            best_ratio = candidate.ratio;
            best_score = score;
            have_best = true;
        }
    }
    return best_ratio;
}

TrainOutcome adagrid_train(const GcnParameters& params, const OptimizerState& optimizer,
                           const SplitState& split, const SearchConfig& config,
                           EpochTrainer& trainer) {
    config.validate(SearchMethod::adagrid);
    const std::int64_t consumed_before = trainer.consumed();
    const std::int64_t phases = config.total_epochs / config.adapt_epochs;
    const std::size_t num_ratios = config.ratio_set.size();

    TrainOutcome lineage{params, optimizer, split, {}};
    struct Trial {
        GcnParameters params;
        OptimizerState optimizer;
        SplitState split;
        std::vector<EpochStats> stats;
    };

    for (std::int64_t phase = 0; phase < phases; ++phase) {
        // Fan out one isolated copy per candidate ratio and try it for beta
        // epochs. Copies must not share parameters, velocity or split state.
        std::vector<Trial> trials;
        trials.reserve(num_ratios);
        std::vector<CandidateHistory> histories(num_ratios);
        for (std::size_t i = 0; i < num_ratios; ++i) {
            const double q = config.ratio_set[i];
            Trial trial{lineage.params, lineage.optimizer, lineage.split, {}};
            trainer.train(trial.params, trial.optimizer, trial.split, q, config.try_epochs,
                          trial.stats);
            histories[i].ratio = q;
            for (const EpochStats& s : trial.stats) {
                histories[i].train_auc.push_back(s.train_auc);
                histories[i].val_auc.push_back(s.val_auc);
            }
            trials.push_back(std::move(trial));
        }

        PhaseEntry entry;
        entry.phase = phase;
        entry.chosen_ratio = select_ratio(histories, config.criterion, config.smoothing_window,
                                          &entry.candidate_scores);

        const std::size_t chosen =
            static_cast<std::size_t>(std::find(config.ratio_set.begin(), config.ratio_set.end(),
                                               entry.chosen_ratio) -
                                     config.ratio_set.begin());
        Trial& winner = trials[chosen];
        lineage.params = std::move(winner.params);
        lineage.optimizer = std::move(winner.optimizer);
        lineage.split = std::move(winner.split);
        lineage.record.epochs.insert(lineage.record.epochs.end(), winner.stats.begin(),
                                     winner.stats.end());
        lineage.record.phases.push_back(std::move(entry));

        trainer.train(lineage.params, lineage.optimizer, lineage.split, entry.chosen_ratio,
                      config.adapt_epochs - config.try_epochs, lineage.record.epochs);
    }
    lineage.record.total_epochs_consumed = trainer.consumed() - consumed_before;
    return lineage;
}

CompleteOutcome complete_search(const GcnParameters& params, const OptimizerState& optimizer,
                                const SplitState& split, const SearchConfig& config,
                                EpochTrainer& trainer) {
    config.validate(SearchMethod::complete);
    const std::int64_t consumed_before = trainer.consumed();

    CompleteOutcome outcome;
    bool have_best = false;
    double best_smoothed = 0.0;
    for (double q : config.ratio_set) {
        TrainOutcome run{params, optimizer, split, {}};
        const std::int64_t run_before = trainer.consumed();
        trainer.train(run.params, run.optimizer, run.split, q, config.total_epochs,
                      run.record.epochs);
        run.record.total_epochs_consumed = trainer.consumed() - run_before;

        std::vector<double> val_history;
        val_history.reserve(run.record.epochs.size());
        for (const EpochStats& s : run.record.epochs) val_history.push_back(s.val_auc);
        const double smoothed = smoothed_tail(val_history, config.smoothing_window);

        outcome.runs.push_back({q, smoothed, run.record});
        if (!have_best || smoothed > best_smoothed ||
            (smoothed == best_smoothed && q < outcome.best_ratio)) {
            outcome.best = std::move(run);
            outcome.best_ratio = q;
            best_smoothed = smoothed;
            have_best = true;
        }
    }
    outcome.total_epochs_consumed = trainer.consumed() - consumed_before;
    return outcome;
}

TrainOutcome random_search(const GcnParameters& params, const OptimizerState& optimizer,
                           const SplitState& split, const SearchConfig& config,
                           EpochTrainer& trainer, bool from_grid) {
    config.validate(from_grid ? SearchMethod::complete : SearchMethod::random);
    const std::int64_t consumed_before = trainer.consumed();

    TrainOutcome run{params, optimizer, split, {}};
    Rng rng(mix_seed(config.seed, kRandomRatioTag));
    for (std::int64_t epoch = 0; epoch < config.total_epochs; ++epoch) {
        const double q = from_grid
                             ? config.ratio_set[static_cast<std::size_t>(
                                   rng.index(static_cast<int>(config.ratio_set.size())))]
                             : rng.uniform(0.1, 0.9);
        trainer.train(run.params, run.optimizer, run.split, q, 1, run.record.epochs);
    }
    run.record.total_epochs_consumed = trainer.consumed() - consumed_before;
    return run;
}

TrainOutcome fixed_ratio_train(const GcnParameters& params, const OptimizerState& optimizer,
                               const SplitState& split, double ratio, std::int64_t total_epochs,
                               EpochTrainer& trainer) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw InvalidRatioError("fixed_ratio_train: ratio must lie in (0, 1)");
    }
    if (total_epochs < 1) throw ConfigError("fixed_ratio_train: total_epochs must be >= 1");
    const std::int64_t consumed_before = trainer.consumed();

    TrainOutcome run{params, optimizer, split, {}};
    trainer.train(run.params, run.optimizer, run.split, ratio, total_epochs, run.record.epochs);
    run.record.total_epochs_consumed = trainer.consumed() - consumed_before;
    return run;
}

std::int64_t epoch_budget(std::int64_t total_epochs, std::int64_t adapt_epochs,
                          std::int64_t try_epochs, std::int64_t num_ratios, SearchMethod method) {
    switch (method) {
        case SearchMethod::adagrid:
            if (adapt_epochs < 1 || total_epochs % adapt_epochs != 0) {
                throw ConfigError("epoch_budget: adapt_epochs must divide total_epochs");
            }
            return total_epochs + (total_epochs / adapt_epochs) * (num_ratios - 1) * try_epochs;
        case SearchMethod::complete: return total_epochs * num_ratios;
        case SearchMethod::random:
        case SearchMethod::fixed: return total_epochs;
    }
    throw ConfigError("epoch_budget: unknown method");
}

} // namespace adagrid
