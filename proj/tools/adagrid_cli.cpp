#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adagrid/harness.hpp"

namespace {

adagrid::SplitRatio parse_split(const std::string& text) {
    std::istringstream in(text);
    double a = 0.0, b = 0.0, c = 0.0;
    char s1 = 0, s2 = 0;
    if (!(in >> a >> s1 >> b >> s2 >> c) || s1 != '/' || s2 != '/') {
        throw CLI::ValidationError("--split", "expected a/b/c, e.g. 80/10/10");
    }
    const double sum = a + b + c;
    if (sum > 1.5) { // percentages
        a /= 100.0;
        b /= 100.0;
        c /= 100.0;
    }
    return adagrid::SplitRatio{a, b, c};
}

int cmd_run(const adagrid::ExperimentSpec& spec) {
    const adagrid::ExperimentResult result = adagrid::run_experiment(spec);
    std::cout << "artifacts: " << (spec.output_dir / result.hash).string() << "\n";
    for (const adagrid::CriterionOutcome& outcome : result.outcomes) {
        std::cout << "criterion " << adagrid::criterion_name(outcome.criterion)
                  << ": mean test AUC " << outcome.mean_test_auc << " [";
        for (std::size_t i = 0; i < outcome.repeats.size(); ++i) {
            const adagrid::RepeatResult& rep = outcome.repeats[i];
            if (i > 0) std::cout << ", ";
            if (rep.failed) {
                std::cout << "failed";
            } else {
                std::cout << rep.test_auc;
            }
        }
        std::cout << "]\n";
    }
    const adagrid::CriterionOutcome& reported = result.reported_outcome();
    std::cout << "reported (" << adagrid::criterion_name(reported.criterion)
              << "): " << reported.mean_test_auc << ", relative epochs " << result.epochs_rel
              << "\n";
    if (result.any_failed) {
        std::cerr << "one or more repeats failed; see the run artifacts\n";
        return 1;
    }
    return 0;
}

int cmd_inspect(const std::string& dataset, const std::string& data_dir, bool communities) {
    adagrid::ExperimentSpec spec;
    spec.dataset = dataset;
    spec.data_dir = data_dir;
    adagrid::LoadSummary summary;
    const adagrid::Graph graph = adagrid::load_spec_dataset(spec, &summary);
    std::cout << summary.to_string() << "\n";
    std::cout << "feature dim: " << graph.feature_dim << "\n";
    std::cout << "label classes: " << graph.label_names.size() << "\n";
    if (communities) {
        const adagrid::Partition partition =
            adagrid::detect_communities(graph.edges, graph.num_nodes);
        std::cout << "communities: " << partition.num_communities
                  << ", modularity: " << partition.modularity
                  << ", edge community ratio: "
                  << adagrid::community_ratio(graph.edges, partition) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"AdaGrid link-prediction toolkit"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run one experiment configuration");
    adagrid::ExperimentSpec spec;
    spec.search.ratio_set = adagrid::default_ratio_set();
    std::string split_text = "80/10/10";
    std::string neg_text = "uniform";
    std::string method_text = "adagrid";
    std::string criterion_text = "validation";
    std::string out_dir = "results";
    std::string data_dir;
    std::vector<double> ratio_set;
    run->add_option("--dataset", spec.dataset, "cora, citeseer, or a path prefix");
    run->add_option("--data-dir", data_dir, "directory holding <name>.content/.cites");
    run->add_option("--split", split_text, "train/val/test fractions, e.g. 80/10/10");
    run->add_option("--neg", neg_text, "negative sampling mode")
        ->check(CLI::IsMember({"uniform", "community"}));
    run->add_option("--method", method_text, "training strategy")
        ->check(CLI::IsMember({"adagrid", "complete", "random", "fixed"}));
    run->add_option("--alpha", spec.search.adapt_epochs, "adapt period in epochs");
    run->add_option("--beta", spec.search.try_epochs, "trial epochs per phase");
    run->add_option("--criterion", criterion_text, "adagrid selection criterion")
        ->check(CLI::IsMember({"validation", "gap", "both"}));
    run->add_option("--smooth-window", spec.search.smoothing_window, "AUC smoothing window");
    run->add_option("--ratio", spec.fixed_ratio, "edge message ratio for --method fixed");
    run->add_option("--ratio-set", ratio_set, "candidate ratios (default 0.1..0.9)");
    run->add_option("--epochs", spec.search.total_epochs, "training epochs N");
    run->add_option("--layers", spec.model.layers, "GCN layers K");
    run->add_option("--hidden", spec.model.hidden, "hidden/output width o");
    run->add_option("--repeats", spec.repeats, "independent repeats");
    run->add_option("--seed", spec.seed, "master seed");
    run->add_option("--resample-interval", spec.resample_interval,
                    "epochs between message/objective resamples");
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--best-val-checkpoint", spec.best_val_checkpoint,
                  "also evaluate the best-validation weights");
    run->add_flag("--random-from-grid", spec.random_from_grid,
                  "random search draws from the ratio set instead of [0.1, 0.9]");

    // table
    auto* table = app.add_subcommand("table", "aggregate run.json results into tables");
    std::string results_dir = "results";
    table->add_option("--results", results_dir, "directory holding <hash>/run.json trees");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "parse a dataset and print its load summary");
    std::string inspect_dataset = "cora";
    std::string inspect_data_dir;
    bool inspect_communities = false;
    inspect->add_option("--dataset", inspect_dataset, "cora, citeseer, or a path prefix");
    inspect->add_option("--data-dir", inspect_data_dir, "directory holding the dataset files");
    inspect->add_flag("--communities", inspect_communities,
                      "also run community detection on the full graph");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            spec.split = parse_split(split_text);
            spec.neg_mode = neg_text == "uniform" ? adagrid::NegSampleMode::uniform
                                                  : adagrid::NegSampleMode::community_ratio;
            if (method_text == "adagrid") spec.method = adagrid::SearchMethod::adagrid;
            if (method_text == "complete") spec.method = adagrid::SearchMethod::complete;
            if (method_text == "random") spec.method = adagrid::SearchMethod::random;
            if (method_text == "fixed") spec.method = adagrid::SearchMethod::fixed;
            if (criterion_text == "validation") {
                spec.criterion_mode = adagrid::CriterionMode::validation;
            } else if (criterion_text == "gap") {
                spec.criterion_mode = adagrid::CriterionMode::gap;
            } else {
                spec.criterion_mode = adagrid::CriterionMode::both;
            }
            if (!ratio_set.empty()) spec.search.ratio_set = ratio_set;
            spec.data_dir = data_dir;
            spec.output_dir = out_dir;
            return cmd_run(spec);
        }
        if (table->parsed()) {
            adagrid::emit_tables(results_dir);
            std::cout << "wrote " << results_dir << "/table.csv and table.txt\n";
            return 0;
        }
        if (inspect->parsed()) {
            return cmd_inspect(inspect_dataset, inspect_data_dir, inspect_communities);
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 0;
}
