#include "adagrid/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adagrid/errors.hpp"
#include "adagrid/metrics.hpp"
#include "adagrid/rng.hpp"

namespace adagrid {

namespace {

using nlohmann::json;

constexpr std::uint64_t kRepeatTag = 0xc2b2ae3d27d4eb4fULL;
constexpr std::uint64_t kSplitTag = 0x165667b19e3779f9ULL;
constexpr std::uint64_t kNegTag = 0x27220a95fe791145ULL;
constexpr std::uint64_t kInitTag = 0x85ebca77c2b2ae63ULL;
constexpr std::uint64_t kTrainTag = 0x2545f4914f6cdd1dULL;
constexpr std::uint64_t kSearchTag = 0x9e6c63d0876a9a27ULL;

std::string format_fraction_percent(double frac) {
    const double pct = frac * 100.0;
    const double rounded = std::round(pct);
    std::ostringstream out;
    if (std::abs(pct - rounded) < 1e-9) {
        out << static_cast<long long>(rounded);
    } else {
        out << pct;
    }
    return out.str();
}

std::string split_label(const SplitRatio& split) {
    return format_fraction_percent(split.train_frac) + "/" +
           format_fraction_percent(split.val_frac) + "/" +
           format_fraction_percent(split.test_frac);
}

std::string neg_mode_name(NegSampleMode mode) {
    return mode == NegSampleMode::uniform ? "uniform" : "community";
}

json spec_to_json(const ExperimentSpec& spec) {
    json j;
    j["dataset"] = spec.dataset;
    j["data_dir"] = spec.data_dir.string();
    j["split"] = split_label(spec.split);
    j["neg_mode"] = neg_mode_name(spec.neg_mode);
    j["method"] = method_name(spec.method);
    j["total_epochs"] = spec.search.total_epochs;
    j["alpha"] = spec.search.adapt_epochs;
    j["beta"] = spec.search.try_epochs;
    j["ratio_set"] = spec.search.ratio_set;
    j["smoothing_window"] = spec.search.smoothing_window;
    j["criterion"] = criterion_mode_name(spec.criterion_mode);
    j["fixed_ratio"] = spec.fixed_ratio;
    j["random_from_grid"] = spec.random_from_grid;
    j["layers"] = spec.model.layers;
    j["hidden"] = spec.model.hidden;
    j["repeats"] = spec.repeats;
    j["seed"] = spec.seed;
    j["resample_interval"] = spec.resample_interval;
    j["best_val_checkpoint"] = spec.best_val_checkpoint;
    return j;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

void write_record_jsonl(const TrainingRecord& record, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path.string());
    for (const EpochStats& s : record.epochs) {
        json line;
        line["epoch"] = s.epoch;
        line["ratio"] = s.ratio;
        line["loss"] = s.loss;
        line["train_auc"] = s.train_auc;
        line["val_auc"] = s.val_auc;
        line["lr"] = s.lr;
        out << line.dump() << '\n';
    }
}

void write_trajectory_csv(const TrainingRecord& record, const std::string& criterion,
                          const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path.string());
    out << "epoch,ratio,criterion\n";
    out << std::setprecision(17);
    for (const EpochStats& s : record.epochs) {
        out << s.epoch << ',' << s.ratio << ',' << criterion << '\n';
    }
}

json phases_to_json(const TrainingRecord& record) {
    json phases = json::array();
    for (const PhaseEntry& p : record.phases) {
        json entry;
        entry["phase"] = p.phase;
        entry["chosen_ratio"] = p.chosen_ratio;
        json scores = json::array();
        for (const CandidateScore& c : p.candidate_scores) {
            scores.push_back({{"ratio", c.ratio}, {"score", c.score}});
        }
        entry["candidates"] = std::move(scores);
        phases.push_back(std::move(entry));
    }
    return phases;
}

struct RepeatArtifacts {
    TrainingRecord record;
    GcnParameters final_params;
    json extra; // method-specific summary fields
};

RepeatArtifacts dispatch_method(const ExperimentSpec& spec, const SearchConfig& config,
                                const GcnParameters& params0, const OptimizerState& opt0,
                                const SplitState& split, EpochTrainer& trainer,
                                std::int64_t* epochs_consumed) {
    RepeatArtifacts artifacts;
    switch (spec.method) {
        case SearchMethod::adagrid: {
            TrainOutcome out = adagrid_train(params0, opt0, split, config, trainer);
            *epochs_consumed = out.record.total_epochs_consumed;
            artifacts.record = std::move(out.record);
            artifacts.final_params = std::move(out.params);
            break;
        }
        case SearchMethod::complete: {
            CompleteOutcome out = complete_search(params0, opt0, split, config, trainer);
            *epochs_consumed = out.total_epochs_consumed;
            json runs = json::array();
            for (const CompleteRun& run : out.runs) {
                runs.push_back({{"ratio", run.ratio}, {"smoothed_val_auc", run.smoothed_val_auc}});
            }
            artifacts.extra["runs"] = std::move(runs);
            artifacts.extra["best_ratio"] = out.best_ratio;
            artifacts.record = std::move(out.best.record);
            artifacts.final_params = std::move(out.best.params);
            break;
        }
        case SearchMethod::random: {
            TrainOutcome out =
                random_search(params0, opt0, split, config, trainer, spec.random_from_grid);
            *epochs_consumed = out.record.total_epochs_consumed;
            artifacts.record = std::move(out.record);
            artifacts.final_params = std::move(out.params);
            break;
        }
        case SearchMethod::fixed: {
            TrainOutcome out = fixed_ratio_train(params0, opt0, split, spec.fixed_ratio,
                                                 config.total_epochs, trainer);
            *epochs_consumed = out.record.total_epochs_consumed;
            artifacts.record = std::move(out.record);
            artifacts.final_params = std::move(out.params);
            break;
        }
    }
    return artifacts;
}

json run_one_repeat(const ExperimentSpec& spec, const Graph& graph, const SparseMatrix& features,
                    Criterion criterion, int repeat, const std::filesystem::path& dir,
                    RepeatResult& result) {
    const std::uint64_t repeat_seed =
        mix_seed(spec.seed, kRepeatTag, static_cast<std::uint64_t>(repeat));

    SplitState split = split_edges(graph, spec.split, mix_seed(repeat_seed, kSplitTag));

    std::optional<Partition> partition;
    NegativeSamplePlan plan;
    if (spec.neg_mode == NegSampleMode::community_ratio) {
        partition = detect_communities(split.train_pos, graph.num_nodes);
        const double target = community_ratio(split.val_pos, *partition);
        plan = make_plan(split, NegSampleMode::community_ratio, target);
    } else {
        plan = make_plan(split, NegSampleMode::uniform);
    }
    split.negatives =
        sample_negatives(graph, split, plan, partition, mix_seed(repeat_seed, kNegTag));

    const GcnParameters params0 = init_parameters(graph.feature_dim, spec.model.hidden,
                                                  spec.model.layers,
                                                  mix_seed(repeat_seed, kInitTag));
    const OptimizerState opt0 =
        make_optimizer(params0, 0.1, 0.9, 5e-4, CosineSchedule{0.0, spec.search.total_epochs});

    TrainContext context;
    context.features = &features;
    context.num_nodes = graph.num_nodes;
    context.resample_interval = spec.resample_interval;
    context.run_seed = mix_seed(repeat_seed, kTrainTag);
    context.track_best_val = spec.best_val_checkpoint;
    GcnTrainer trainer(context);

    SearchConfig config = spec.search;
    config.criterion = criterion;
    config.seed = mix_seed(repeat_seed, kSearchTag);

    std::int64_t epochs_consumed = 0;
    RepeatArtifacts artifacts =
        dispatch_method(spec, config, params0, opt0, split, trainer, &epochs_consumed);

    const EdgeList test_message = message_graph_for_eval(split, EvalPhase::test);
    const SparseMatrix test_op = normalize_adjacency(test_message, graph.num_nodes);
    const Eigen::MatrixXd embeddings = forward_embeddings(artifacts.final_params, features, test_op);
    result.test_auc = 100.0 * evaluate_auc(embeddings, split.test_pos, split.negatives.test);
    if (spec.best_val_checkpoint && trainer.best_params() != nullptr) {
        const Eigen::MatrixXd best_embeddings =
            forward_embeddings(*trainer.best_params(), features, test_op);
        result.test_auc_best_val =
            100.0 * evaluate_auc(best_embeddings, split.test_pos, split.negatives.test);
    }
    result.epochs_consumed = epochs_consumed;

    write_record_jsonl(artifacts.record, dir / "record.jsonl");
    write_trajectory_csv(artifacts.record, criterion_name(criterion), dir / "trajectory.csv");
    save_parameters(artifacts.final_params, dir / "checkpoint.bin");
    save_split_manifest(split, spec.split, dir / "split.txt");
    save_negatives(split.negatives, dir / "negatives.txt");
    if (partition.has_value()) save_partition(*partition, graph, dir / "partition.txt");

    json summary;
    summary["repeat"] = repeat;
    summary["criterion"] = criterion_name(criterion);
    summary["method"] = method_name(spec.method);
    summary["seed"] = repeat_seed;
    summary["test_auc"] = result.test_auc;
    if (result.test_auc_best_val.has_value()) {
        summary["test_auc_best_val"] = *result.test_auc_best_val;
        summary["best_val_auc"] = trainer.best_val_auc();
    }
    summary["epochs_consumed"] = epochs_consumed;
    summary["phases"] = phases_to_json(artifacts.record);
    if (partition.has_value()) {
        summary["num_communities"] = partition->num_communities;
        summary["modularity"] = partition->modularity;
        summary["target_community_ratio"] = plan.target_ratio;
    }
    for (auto& [key, value] : artifacts.extra.items()) summary[key] = value;
    return summary;
}

} // namespace

std::string criterion_mode_name(CriterionMode mode) {
    switch (mode) {
        case CriterionMode::validation: return "validation";
        case CriterionMode::gap: return "gap";
        case CriterionMode::both: return "both";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    split.validate();
    if (repeats < 1) throw ConfigError("experiment: repeats must be >= 1");
    if (model.layers < 1) throw ConfigError("experiment: layers must be >= 1");
    if (model.hidden < 1) throw ConfigError("experiment: hidden width must be >= 1");
    if (resample_interval < 1) throw ConfigError("experiment: resample interval must be >= 1");
    if (method == SearchMethod::fixed && !(fixed_ratio > 0.0 && fixed_ratio < 1.0)) {
        throw ConfigError("experiment: fixed ratio must lie in (0, 1)");
    }
    search.validate(method == SearchMethod::random && random_from_grid ? SearchMethod::complete
                                                                       : method);
}

std::string spec_hash(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << std::hex << std::setfill('0') << std::setw(16) << fnv1a64(spec_to_json(spec).dump());
    return out.str();
}

std::pair<std::filesystem::path, std::filesystem::path> resolve_dataset(
    const std::string& dataset, const std::filesystem::path& data_dir) {
    std::filesystem::path prefix;
    if (dataset == "cora" || dataset == "citeseer") {
        std::filesystem::path dir = data_dir;
        if (dir.empty()) {
            if (const char* env = std::getenv("ADAGRID_DATA_DIR"); env != nullptr && *env != '\0') {
                dir = env;
            } else {
                dir = "data";
            }
        }
        prefix = dir / dataset;
    } else {
        prefix = dataset;
    }
    return {std::filesystem::path(prefix.string() + ".content"),
            std::filesystem::path(prefix.string() + ".cites")};
}

Graph load_spec_dataset(const ExperimentSpec& spec, LoadSummary* summary) {
    const auto [content, cites] = resolve_dataset(spec.dataset, spec.data_dir);
    if (!std::filesystem::exists(content) || !std::filesystem::exists(cites)) {
        throw ConfigError("dataset files not found: " + content.string() + " / " + cites.string() +
                          " (point --data-dir or ADAGRID_DATA_DIR at a directory holding "
                          "<name>.content and <name>.cites)");
    }
    return load_dataset(content, cites, summary);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const Graph graph = load_spec_dataset(spec);
    const SparseMatrix features = graph.feature_matrix();

    ExperimentResult result;
    result.hash = spec_hash(spec);
    const std::filesystem::path base = spec.output_dir / result.hash;
    std::filesystem::create_directories(base);

    std::vector<Criterion> criteria;
    if (spec.method == SearchMethod::adagrid) {
        switch (spec.criterion_mode) {
            case CriterionMode::validation: criteria = {Criterion::validation}; break;
            case CriterionMode::gap: criteria = {Criterion::gap}; break;
            case CriterionMode::both: criteria = {Criterion::validation, Criterion::gap}; break;
        }
    } else {
        criteria = {Criterion::validation}; // the other methods never consult it
    }
    const bool both = criteria.size() > 1;

    for (const Criterion criterion : criteria) {
        CriterionOutcome outcome;
        outcome.criterion = criterion;
        for (int repeat = 0; repeat < spec.repeats; ++repeat) {
            std::filesystem::path dir = base / ("repeat-" + std::to_string(repeat));
            if (both) dir /= criterion_name(criterion);
            std::filesystem::create_directories(dir);

            RepeatResult rep;
            rep.repeat = repeat;
            json summary;
            const auto started = std::chrono::steady_clock::now();
            try {
                summary = run_one_repeat(spec, graph, features, criterion, repeat, dir, rep);
            } catch (const std::exception& error) {
                rep.failed = true;
                rep.error = error.what();
                summary = json{{"repeat", repeat},
                               {"criterion", criterion_name(criterion)},
                               {"method", method_name(spec.method)},
                               {"failed", true},
                               {"error", rep.error}};
            }
            rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                            started)
                                  .count();
            summary["failed"] = rep.failed;
            summary["wall_time_s"] = rep.wall_time_s;
            std::ofstream summary_out(dir / "summary.json");
            summary_out << summary.dump(2) << '\n';

            outcome.repeats.push_back(std::move(rep));
        }

        double sum = 0.0;
        int successes = 0;
        for (const RepeatResult& rep : outcome.repeats) {
            if (rep.failed) {
                result.any_failed = true;
            } else {
                sum += rep.test_auc;
                ++successes;
            }
        }
        outcome.mean_test_auc = successes > 0 ? sum / successes : 0.0;
        result.outcomes.push_back(std::move(outcome));
    }

    result.reported = 0;
    for (std::size_t i = 1; i < result.outcomes.size(); ++i) {
        if (result.outcomes[i].mean_test_auc > result.outcomes[result.reported].mean_test_auc) {
            result.reported = i;
        }
    }

    double consumed_sum = 0.0;
    int consumed_count = 0;
    for (const CriterionOutcome& outcome : result.outcomes) {
        for (const RepeatResult& rep : outcome.repeats) {
            if (!rep.failed) {
                consumed_sum += static_cast<double>(rep.epochs_consumed);
                ++consumed_count;
            }
        }
    }
    result.epochs_rel = consumed_count > 0
                            ? consumed_sum / consumed_count /
                                  static_cast<double>(spec.search.total_epochs)
                            : 0.0;

    json run;
    run["spec"] = spec_to_json(spec);
    run["hash"] = result.hash;
    run["method"] = method_name(spec.method);
    run["alpha"] = spec.search.adapt_epochs;
    run["beta"] = spec.search.try_epochs;
    run["dataset"] = spec.dataset;
    run["split"] = split_label(spec.split);
    run["neg_mode"] = neg_mode_name(spec.neg_mode);
    run["epochs_rel"] = result.epochs_rel;
    run["any_failed"] = result.any_failed;
    json outcomes = json::array();
    for (const CriterionOutcome& outcome : result.outcomes) {
        json o;
        o["criterion"] = criterion_name(outcome.criterion);
        o["mean_test_auc"] = outcome.mean_test_auc;
        json reps = json::array();
        for (const RepeatResult& rep : outcome.repeats) {
            json rj;
            rj["repeat"] = rep.repeat;
            rj["failed"] = rep.failed;
            if (rep.failed) rj["error"] = rep.error;
            rj["test_auc"] = rep.test_auc;
            if (rep.test_auc_best_val.has_value()) rj["test_auc_best_val"] = *rep.test_auc_best_val;
            rj["epochs_consumed"] = rep.epochs_consumed;
            rj["wall_time_s"] = rep.wall_time_s;
            reps.push_back(std::move(rj));
        }
        o["repeats"] = std::move(reps);
        outcomes.push_back(std::move(o));
    }
    run["outcomes"] = std::move(outcomes);
    run["reported_criterion"] = criterion_name(result.reported_outcome().criterion);
    run["mean_test_auc"] = result.reported_outcome().mean_test_auc;
    std::ofstream run_out(base / "run.json");
    run_out << run.dump(2) << '\n';

    return result;
}

namespace {

struct TableRow {
    std::string method_label; // method plus alpha/beta for adagrid
    std::string method;
    std::string column; // dataset + split + neg mode
    double auc_mean = 0.0;
    std::vector<double> auc_runs;
    double epochs_rel = 0.0;
};

std::string format_double(double value, int precision) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << value;
    return out.str();
}

} // namespace

void emit_tables(const std::filesystem::path& results_dir) {
    std::vector<TableRow> rows;
    std::vector<json> raw;
    if (std::filesystem::is_directory(results_dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(results_dir)) {
            const auto run_path = entry.path() / "run.json";
            if (!entry.is_directory() || !std::filesystem::exists(run_path)) continue;
            std::ifstream in(run_path);
            json run;
            try {
                in >> run;
            } catch (const json::exception& error) {
                throw FormatError("unreadable run record " + run_path.string() + ": " +
                                  error.what());
            }
            raw.push_back(run);

            TableRow row;
            row.method = run.at("method").get<std::string>();
            row.method_label = row.method;
            if (row.method == "adagrid") {
                row.method_label += " " + std::to_string(run.at("alpha").get<std::int64_t>()) +
                                    "/" + std::to_string(run.at("beta").get<std::int64_t>());
            }
            row.column = run.at("dataset").get<std::string>() + " " +
                         run.at("split").get<std::string>() + " " +
                         run.at("neg_mode").get<std::string>();
            row.auc_mean = run.at("mean_test_auc").get<double>();
            row.epochs_rel = run.at("epochs_rel").get<double>();
            for (const json& outcome : run.at("outcomes")) {
                if (outcome.at("criterion") != run.at("reported_criterion")) continue;
                for (const json& rep : outcome.at("repeats")) {
                    if (!rep.at("failed").get<bool>()) {
                        row.auc_runs.push_back(rep.at("test_auc").get<double>());
                    }
                }
            }
            rows.push_back(std::move(row));
        }
    }
    if (rows.empty()) {
        throw DegenerateInputError("emit_tables: no run.json results under " +
                                   results_dir.string());
    }

    std::sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) {
        return std::tie(a.column, a.method_label) < std::tie(b.column, b.method_label);
    });

    std::ofstream csv(results_dir / "table.csv");
    csv << "method,alpha,beta,dataset,split,neg_mode,auc_mean,auc_runs,epochs_rel\n";
    for (const json& run : raw) {
        csv << run.at("method").get<std::string>() << ','
            << run.at("alpha").get<std::int64_t>() << ',' << run.at("beta").get<std::int64_t>()
            << ',' << run.at("dataset").get<std::string>() << ','
            << run.at("split").get<std::string>() << ','
            << run.at("neg_mode").get<std::string>() << ','
            << format_double(run.at("mean_test_auc").get<double>(), 2) << ',';
        bool first = true;
        for (const json& outcome : run.at("outcomes")) {
            if (outcome.at("criterion") != run.at("reported_criterion")) continue;
            for (const json& rep : outcome.at("repeats")) {
                if (rep.at("failed").get<bool>()) continue;
                if (!first) csv << ';';
                csv << format_double(rep.at("test_auc").get<double>(), 2);
                first = false;
            }
        }
        csv << ',' << format_double(run.at("epochs_rel").get<double>(), 2) << '\n';
    }
    csv.close();

    // Pivot: one column per dataset/split/neg-mode combination, one row per
    // method variant, plus the Gain row (best adagrid minus best baseline).
    std::vector<std::string> columns;
    std::vector<std::string> labels;
    for (const TableRow& row : rows) {
        if (std::find(columns.begin(), columns.end(), row.column) == columns.end()) {
            columns.push_back(row.column);
        }
        if (std::find(labels.begin(), labels.end(), row.method_label) == labels.end()) {
            labels.push_back(row.method_label);
        }
    }
    std::sort(columns.begin(), columns.end());
    std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
        // adagrid variants first, then baselines alphabetically.
        const bool aa = a.rfind("adagrid", 0) == 0;
        const bool bb = b.rfind("adagrid", 0) == 0;
        if (aa != bb) return aa;
        return a < b;
    });

    std::map<std::pair<std::string, std::string>, const TableRow*> cells;
    for (const TableRow& row : rows) cells[{row.method_label, row.column}] = &row;

    std::vector<std::string> missing;
    auto cell_text = [&](const std::string& label, const std::string& column) -> std::string {
        const auto it = cells.find({label, column});
        if (it == cells.end()) {
            missing.push_back(label + " x " + column);
            return "-";
        }
        return format_double(it->second->auc_mean, 2);
    };

    std::size_t label_width = std::string("epochs_rel").size();
    for (const std::string& label : labels) label_width = std::max(label_width, label.size());

    std::ofstream txt(results_dir / "table.txt");
    txt << std::left << std::setw(static_cast<int>(label_width) + 2) << "method";
    for (const std::string& column : columns) {
        txt << std::right << std::setw(static_cast<int>(std::max<std::size_t>(column.size(), 8)) + 2)
            << column;
    }
    txt << '\n';
    auto emit_row = [&](const std::string& label, auto&& value_for_column) {
        txt << std::left << std::setw(static_cast<int>(label_width) + 2) << label;
        for (const std::string& column : columns) {
            txt << std::right
                << std::setw(static_cast<int>(std::max<std::size_t>(column.size(), 8)) + 2)
                << value_for_column(column);
        }
        txt << '\n';
    };
    for (const std::string& label : labels) {
        emit_row(label, [&](const std::string& column) { return cell_text(label, column); });
    }
    emit_row("Gain", [&](const std::string& column) -> std::string {
        bool have_ada = false, have_base = false;
        double best_ada = 0.0, best_base = 0.0;
        for (const TableRow& row : rows) {
            if (row.column != column) continue;
            if (row.method == "adagrid") {
                if (!have_ada || row.auc_mean > best_ada) best_ada = row.auc_mean;
                have_ada = true;
            } else {
                if (!have_base || row.auc_mean > best_base) best_base = row.auc_mean;
                have_base = true;
            }
        }
        if (!have_ada || !have_base) return "-";
        return format_double(best_ada - best_base, 2);
    });
    emit_row("epochs_rel", [&](const std::string& column) -> std::string {
        // epochs_rel is a per-method cost; within one column report the
        // adagrid value when present, else the single method's value.
        const TableRow* pick = nullptr;
        for (const TableRow& row : rows) {
            if (row.column != column) continue;
            if (pick == nullptr || (row.method == "adagrid" && pick->method != "adagrid")) {
                pick = &row;
            }
        }
        return pick == nullptr ? std::string("-") : format_double(pick->epochs_rel, 2);
    });
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        txt << "\nmissing cells:\n";
        for (const std::string& cell : missing) txt << "  " << cell << '\n';
    }
}

} // namespace adagrid
