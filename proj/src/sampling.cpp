#include "adagrid/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "adagrid/errors.hpp"
#include "adagrid/rng.hpp"

namespace adagrid {

namespace {
constexpr std::uint64_t kNegativeTag = 0x9d2c5680e7f3a145ULL;
} // namespace

double modularity(std::span<const Edge> edges, std::span<const std::int32_t> community_of) {
    if (edges.empty()) throw DegenerateInputError("modularity: empty edge set");
    const auto m = static_cast<double>(edges.size());
    std::map<std::int32_t, std::int64_t> intra;
    std::map<std::int32_t, std::int64_t> degree_sum;
    for (const Edge& e : edges) {
        const std::int32_t cu = community_of[e.u];
        const std::int32_t cv = community_of[e.v];
        degree_sum[cu] += 1;
        degree_sum[cv] += 1;
        if (cu == cv) intra[cu] += 1;
    }
    double q = 0.0;
    for (const auto& [community, degree] : degree_sum) {
        const auto it = intra.find(community);
        const double within = it == intra.end() ? 0.0 : static_cast<double>(it->second);
        const double a = static_cast<double>(degree) / (2.0 * m);
        q += within / m - a * a;
    }
    return q;
}

Partition detect_communities(std::span<const Edge> edges, std::int32_t num_nodes) {
    if (edges.empty()) throw DegenerateInputError("detect_communities: empty edge set");

    const std::int64_t m = static_cast<std::int64_t>(edges.size());
    std::vector<std::int64_t> degree(num_nodes, 0);
    // between[c]: edge multiplicity towards each neighboring community.
    // std::map keeps neighbor iteration ordered, which makes tie-breaking
    // (smallest community pair) deterministic.
    std::vector<std::map<std::int32_t, std::int64_t>> between(num_nodes);
    for (const Edge& e : edges) {
        degree[e.u] += 1;
        degree[e.v] += 1;
        between[e.u][e.v] += 1;
        between[e.v][e.u] += 1;
    }

    std::vector<bool> alive(num_nodes, true);
    std::vector<std::vector<std::int32_t>> members(num_nodes);
    for (std::int32_t i = 0; i < num_nodes; ++i) members[i] = {i};

    // Merging communities x and y changes modularity by
    //   e_xy / m - 2 * (d_x / 2m) * (d_y / 2m),
    // which has the sign of 2*m*e_xy - d_x*d_y; comparing that integer keeps
    // the greedy selection exact and platform independent.
    auto gain_numerator = [&](std::int32_t x, std::int32_t y, std::int64_t e_xy) {
        return 2 * m * e_xy - degree[x] * degree[y];
    };

    for (;;) {
        std::int64_t best_gain = 0;
        std::int32_t best_x = -1, best_y = -1;
        for (std::int32_t x = 0; x < num_nodes; ++x) {
            if (!alive[x]) continue;
            for (const auto& [y, e_xy] : between[x]) {
                if (y <= x) continue;
                const std::int64_t gain = gain_numerator(x, y, e_xy);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_x = x;
                    best_y = y;
                }
            }
        }
        if (best_x < 0) break; // no merge strictly increases modularity

        // Merge best_y into best_x (the smaller id survives).
        degree[best_x] += degree[best_y];
        between[best_x].erase(best_y);
        for (const auto& [nbr, count] : between[best_y]) {
            if (nbr == best_x) continue;
            between[best_x][nbr] += count;
            auto& nbr_map = between[nbr];
            nbr_map[best_x] += count;
            nbr_map.erase(best_y);
        }
        between[best_y].clear();
        alive[best_y] = false;
        members[best_x].insert(members[best_x].end(), members[best_y].begin(),
                               members[best_y].end());
        members[best_y].clear();
    }

    // Renumber surviving communities by their smallest member.
    Partition partition;
    partition.community_of.assign(num_nodes, -1);
    std::int32_t next_id = 0;
    for (std::int32_t c = 0; c < num_nodes; ++c) {
        if (!alive[c]) continue;
        for (std::int32_t node : members[c]) partition.community_of[node] = next_id;
        ++next_id;
    }
    partition.num_communities = next_id;
    partition.modularity = modularity(edges, partition.community_of);
    return partition;
}

double community_ratio(std::span<const Edge> pairs, const Partition& partition) {
    if (pairs.empty()) throw DegenerateInputError("community_ratio: empty pair list");
    std::int64_t within = 0;
    for (const Edge& e : pairs) {
        if (partition.community_of[e.u] == partition.community_of[e.v]) ++within;
    }
    return static_cast<double>(within) / static_cast<double>(pairs.size());
}

NegativeSamplePlan make_plan(const SplitState& split, NegSampleMode mode, double target_ratio) {
    NegativeSamplePlan plan;
    plan.mode = mode;
    plan.target_ratio = target_ratio;
    plan.train_count = static_cast<std::int64_t>(split.train_pos.size());
    plan.val_count = static_cast<std::int64_t>(split.val_pos.size());
    plan.test_count = static_cast<std::int64_t>(split.test_pos.size());
    return plan;
}

namespace {

enum class PairKind { any, within, between };

const char* kind_name(PairKind kind) {
    switch (kind) {
        case PairKind::any: return "uniform";
        case PairKind::within: return "within-community";
        case PairKind::between: return "between-community";
    }
    return "?";
}

void draw_batch(EdgeList& out, EdgeKeySet& used, std::int64_t count, PairKind kind,
                const Partition* partition, std::int32_t num_nodes, Rng& rng) {
    if (count <= 0) return;
    const std::int64_t rejection_cap = 100 * count;
    std::int64_t consecutive_rejections = 0;
    std::int64_t collected = 0;
    while (collected < count) {
        if (consecutive_rejections >= rejection_cap) {
            throw ExhaustionError(std::string("negative sampling exhausted ") + kind_name(kind) +
                                  " candidates after " + std::to_string(rejection_cap) +
                                  " consecutive rejections");
        }
        const auto a = static_cast<std::int32_t>(rng.index(num_nodes));
        const auto b = static_cast<std::int32_t>(rng.index(num_nodes));
        if (a == b) {
            ++consecutive_rejections;
            continue;
        }
        if (kind != PairKind::any) {
            const bool same = partition->community_of[a] == partition->community_of[b];
            if (same != (kind == PairKind::within)) {
                ++consecutive_rejections;
                continue;
            }
        }
        const Edge e = make_edge(a, b);
        if (!used.insert(edge_key(e)).second) {
            ++consecutive_rejections;
            continue;
        }
        out.push_back(e);
        ++collected;
        consecutive_rejections = 0;
    }
}

} // namespace

NegativeSets sample_negatives(const Graph& graph, const SplitState& split,
                              const NegativeSamplePlan& plan,
                              const std::optional<Partition>& partition, std::uint64_t seed) {
    (void)split;
    if (plan.mode == NegSampleMode::community_ratio) {
        if (!partition.has_value()) {
            throw ConfigError("community-ratio negative sampling requires a partition");
        }
        if (plan.target_ratio < 0.0 || plan.target_ratio > 1.0) {
            throw ConfigError("community-ratio target must lie in [0, 1]");
        }
    }

    EdgeKeySet used = to_key_set(graph.edges);
    Rng rng(mix_seed(seed, kNegativeTag));
    const Partition* part = partition.has_value() ? &*partition : nullptr;

    NegativeSets sets;
    auto fill = [&](EdgeList& out, std::int64_t count) {
        if (plan.mode == NegSampleMode::uniform) {
            draw_batch(out, used, count, PairKind::any, nullptr, graph.num_nodes, rng);
        } else {
            const std::int64_t within = std::min(
                count, round_half_up(plan.target_ratio * static_cast<double>(count)));
            draw_batch(out, used, within, PairKind::within, part, graph.num_nodes, rng);
            draw_batch(out, used, count - within, PairKind::between, part, graph.num_nodes, rng);
        }
    };
    fill(sets.train, plan.train_count);
    fill(sets.val, plan.val_count);
    fill(sets.test, plan.test_count);
    return sets;
}

void save_partition(const Partition& partition, const Graph& graph,
                    const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open partition file for writing: " + path.string());
    for (std::int32_t node = 0; node < graph.num_nodes; ++node) {
        out << graph.node_ids[node] << ' ' << partition.community_of[node] << '\n';
    }
}

void save_negatives(const NegativeSets& sets, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open negatives file for writing: " + path.string());
    out << "# negatives v1\n";
    out << "# counts " << sets.train.size() << ' ' << sets.val.size() << ' ' << sets.test.size()
        << "\n";
    for (const Edge& e : sets.train) out << e.u << ' ' << e.v << " neg\n";
    for (const Edge& e : sets.val) out << e.u << ' ' << e.v << " neg\n";
    for (const Edge& e : sets.test) out << e.u << ' ' << e.v << " neg\n";
}

NegativeSets load_negatives(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open negatives file: " + path.string());
    std::int64_t counts[3] = {-1, -1, -1};
    EdgeList all;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::istringstream header(line.substr(1));
            std::string key;
            header >> key;
            if (key == "counts") header >> counts[0] >> counts[1] >> counts[2];
            continue;
        }
        std::istringstream fields(line);
        std::int32_t u = 0, v = 0;
        std::string tag;
        if (!(fields >> u >> v >> tag) || tag != "neg") {
            throw FormatError("negatives line " + std::to_string(line_no) + ": malformed");
        }
        all.push_back(make_edge(u, v));
    }
    if (counts[0] < 0 ||
        counts[0] + counts[1] + counts[2] != static_cast<std::int64_t>(all.size())) {
        throw FormatError("negatives file counts do not match line count: " + path.string());
    }
    NegativeSets sets;
    sets.train.assign(all.begin(), all.begin() + counts[0]);
    sets.val.assign(all.begin() + counts[0], all.begin() + counts[0] + counts[1]);
    sets.test.assign(all.begin() + counts[0] + counts[1], all.end());
    return sets;
}

} // namespace adagrid
