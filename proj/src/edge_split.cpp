#include "adagrid/edge_split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "adagrid/errors.hpp"
#include "adagrid/rng.hpp"

namespace adagrid {

namespace {

constexpr std::uint64_t kShuffleTag = 0x51e9f2a3c4d5e6f7ULL;
constexpr std::uint64_t kMessageInitTag = 0x7b3d9c1e5a2f4680ULL;

// 17 significant digits round-trip a double exactly.
void write_exact_double(std::ostream& out, double value) {
    out << std::setprecision(17) << value;
}

} // namespace

void SplitRatio::validate() const {
    if (train_frac <= 0.0 || val_frac <= 0.0 || test_frac <= 0.0) {
        throw ConfigError("split ratio: all fractions must be positive");
    }
    if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
        throw ConfigError("split ratio: fractions must sum to 1");
    }
}

std::int64_t round_half_up(double x) {
    return static_cast<std::int64_t>(std::floor(x + 0.5));
}

std::int64_t message_count(std::int64_t train_size, double ratio) {
    const std::int64_t rounded = round_half_up(ratio * static_cast<double>(train_size));
    return std::clamp<std::int64_t>(rounded, 1, train_size - 1);
}

SplitState split_edges(const Graph& graph, const SplitRatio& ratio, std::uint64_t seed,
                       double initial_ratio) {
    ratio.validate();
    const auto num_edges = static_cast<std::int64_t>(graph.edges.size());
    if (num_edges < 10) {
        throw DegenerateInputError("split_edges: graph needs at least 10 edges, has " +
                                   std::to_string(num_edges));
    }

    const std::int64_t n_val = round_half_up(ratio.val_frac * static_cast<double>(num_edges));
    const std::int64_t n_test = round_half_up(ratio.test_frac * static_cast<double>(num_edges));
    const std::int64_t n_train = num_edges - n_val - n_test;
    if (n_val < 1 || n_test < 1 || n_train < 2) {
        throw DegenerateInputError("split_edges: a split set rounds to empty");
    }

    EdgeList shuffled = graph.edges;
    Rng rng(mix_seed(seed, kShuffleTag));
    rng.shuffle(shuffled);

    SplitState state;
    state.rng_seed = seed;
    state.val_pos.assign(shuffled.begin(), shuffled.begin() + n_val);
    state.test_pos.assign(shuffled.begin() + n_val, shuffled.begin() + n_val + n_test);
    state.train_pos.assign(shuffled.begin() + n_val + n_test, shuffled.end());
    return resample_message_split(state, initial_ratio, mix_seed(seed, kMessageInitTag));
}

SplitState resample_message_split(const SplitState& state, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw InvalidRatioError("edge message ratio must lie in (0, 1), got " +
                                std::to_string(ratio));
    }
    const auto train_size = static_cast<std::int64_t>(state.train_pos.size());
    if (train_size < 2) {
        throw DegenerateInputError("resample_message_split: needs at least 2 training edges");
    }

    std::vector<std::int32_t> order(train_size);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    const std::int64_t n_message = message_count(train_size, ratio);
    SplitState next = state;
    next.edge_message_ratio = ratio;
    next.message_edges.clear();
    next.objective_edges.clear();
    next.message_edges.reserve(n_message);
    next.objective_edges.reserve(train_size - n_message);
    for (std::int64_t i = 0; i < train_size; ++i) {
        const Edge& e = state.train_pos[order[i]];
        if (i < n_message) {
            next.message_edges.push_back(e);
        } else {
            next.objective_edges.push_back(e);
        }
    }
    return next;
}

EdgeList message_graph_for_eval(const SplitState& state, EvalPhase phase) {
    EdgeList edges = state.train_pos;
    if (phase == EvalPhase::test) {
        edges.insert(edges.end(), state.val_pos.begin(), state.val_pos.end());
    }
    return edges;
}

void save_split_manifest(const SplitState& state, const SplitRatio& ratio,
                         const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open split manifest for writing: " + path.string());
    out << "# split-manifest v1\n";
    out << "# seed " << state.rng_seed << "\n";
    out << "# ratio ";
    write_exact_double(out, ratio.train_frac);
    out << ' ';
    write_exact_double(out, ratio.val_frac);
    out << ' ';
    write_exact_double(out, ratio.test_frac);
    out << "\n";
    out << "# msg_ratio ";
    write_exact_double(out, state.edge_message_ratio);
    out << "\n";
    for (const Edge& e : state.train_pos) out << e.u << ' ' << e.v << " train\n";
    for (const Edge& e : state.val_pos) out << e.u << ' ' << e.v << " val\n";
    for (const Edge& e : state.test_pos) out << e.u << ' ' << e.v << " test\n";
}

SplitState load_split_manifest(const std::filesystem::path& path, SplitRatio* ratio_out) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open split manifest: " + path.string());

    SplitState state;
    SplitRatio ratio;
    double msg_ratio = 0.5;
    std::string line;
    std::int64_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::istringstream header(line.substr(1));
            std::string key;
            header >> key;
            if (key == "split-manifest") {
                header_seen = true;
            } else if (key == "seed") {
                header >> state.rng_seed;
            } else if (key == "ratio") {
                header >> ratio.train_frac >> ratio.val_frac >> ratio.test_frac;
            } else if (key == "msg_ratio") {
                header >> msg_ratio;
            }
            continue;
        }
        std::istringstream fields(line);
        std::int32_t u = 0, v = 0;
        std::string tag;
        if (!(fields >> u >> v >> tag)) {
            throw FormatError("split manifest line " + std::to_string(line_no) + ": malformed");
        }
        const Edge e = make_edge(u, v);
        if (tag == "train") {
            state.train_pos.push_back(e);
        } else if (tag == "val") {
            state.val_pos.push_back(e);
        } else if (tag == "test") {
            state.test_pos.push_back(e);
        } else {
            throw FormatError("split manifest line " + std::to_string(line_no) +
                              ": unknown set tag '" + tag + "'");
        }
    }
    if (!header_seen) throw FormatError("split manifest missing header: " + path.string());
    if (state.train_pos.empty() || state.val_pos.empty() || state.test_pos.empty()) {
        throw DegenerateInputError("split manifest has an empty set: " + path.string());
    }
    if (ratio_out) *ratio_out = ratio;
    // Re-derive the message/objective partition exactly as split_edges did.
    return resample_message_split(state, msg_ratio, mix_seed(state.rng_seed, kMessageInitTag));
}

} // namespace adagrid
