#include "adagrid/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "adagrid/errors.hpp"

namespace adagrid {

Eigen::SparseMatrix<double> Graph::feature_matrix() const {
    std::vector<Eigen::Triplet<double>> triplets;
    std::size_t nnz = 0;
    for (const auto& cols : feature_cols) nnz += cols.size();
    triplets.reserve(nnz);
    for (std::int32_t node = 0; node < num_nodes; ++node) {
        for (std::int32_t col : feature_cols[node]) {
            triplets.emplace_back(node, col, 1.0);
        }
    }
    Eigen::SparseMatrix<double> features(num_nodes, feature_dim);
    features.setFromTriplets(triplets.begin(), triplets.end());
    return features;
}

void Graph::validate() const {
    if (static_cast<std::int32_t>(node_ids.size()) != num_nodes ||
        static_cast<std::int32_t>(feature_cols.size()) != num_nodes) {
        throw FormatError("graph: node arrays do not match num_nodes");
    }
    for (const auto& cols : feature_cols) {
        for (std::int32_t c : cols) {
            if (c < 0 || c >= feature_dim) throw FormatError("graph: feature column out of range");
        }
    }
    EdgeKeySet seen;
    for (const Edge& e : edges) {
        if (e.u == e.v) throw FormatError("graph: self loop present");
        if (e.u > e.v) throw FormatError("graph: edge not normalized");
        if (e.u < 0 || e.v >= num_nodes) throw FormatError("graph: edge endpoint out of range");
        if (!seen.insert(edge_key(e)).second) throw FormatError("graph: duplicate edge");
    }
    if (!labels.empty() && static_cast<std::int32_t>(labels.size()) != num_nodes) {
        throw FormatError("graph: label array does not match num_nodes");
    }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (stream >> field) fields.push_back(field);
    return fields;
}

} // namespace

std::string LoadSummary::to_string() const {
    std::ostringstream out;
    out << "load summary: nodes=" << num_nodes
        << " edges=" << edges_retained
        << " cite_lines=" << cite_lines
        << " self_loops_dropped=" << self_loops_dropped
        << " duplicates_collapsed=" << duplicates_collapsed
        << " dangling_skipped=" << dangling_skipped;
    return out.str();
}

NodeTable load_content(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open content file: " + path.string());

    NodeTable table;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() < 3) {
            throw FormatError("content line " + std::to_string(line_no) +
                              ": expected id, attributes and label");
        }
        const auto attr_count = static_cast<std::int32_t>(fields.size()) - 2;
        if (table.feature_dim == 0 && table.rows.empty()) {
            table.feature_dim = attr_count;
        } else if (attr_count != table.feature_dim) {
            throw FormatError("content line " + std::to_string(line_no) + ": has " +
                              std::to_string(attr_count) + " attributes, expected " +
                              std::to_string(table.feature_dim));
        }

        const std::string& id = fields.front();
        if (table.index_of.count(id)) {
            throw FormatError("content line " + std::to_string(line_no) +
                              ": duplicate node id '" + id + "'");
        }

        NodeRecord record;
        for (std::int32_t a = 0; a < attr_count; ++a) {
            const std::string& value = fields[1 + a];
            if (value == "1") {
                record.word_cols.push_back(a);
            } else if (value != "0") {
                throw FormatError("content line " + std::to_string(line_no) +
                                  ": non-binary attribute '" + value + "'");
            }
        }
        record.label = fields.back();

        table.index_of.emplace(id, static_cast<std::int32_t>(table.ids.size()));
        table.ids.push_back(id);
        table.rows.push_back(std::move(record));
    }
    if (table.rows.empty()) throw DegenerateInputError("content file is empty: " + path.string());
    return table;
}

Graph load_cites(const std::filesystem::path& path, const NodeTable& table,
                 LoadSummary* summary) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open cites file: " + path.string());

    LoadSummary counts;
    counts.num_nodes = static_cast<std::int32_t>(table.ids.size());

    EdgeKeySet seen;
    EdgeList edges;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 2) {
            throw FormatError("cites line " + std::to_string(line_no) +
                              ": expected two node ids, got " + std::to_string(fields.size()));
        }
        ++counts.cite_lines;
        const auto it_a = table.index_of.find(fields[0]);
        const auto it_b = table.index_of.find(fields[1]);
        if (it_a == table.index_of.end() || it_b == table.index_of.end()) {
            ++counts.dangling_skipped;
            continue;
        }
        if (it_a->second == it_b->second) {
            ++counts.self_loops_dropped;
            continue;
        }
        const Edge e = make_edge(it_a->second, it_b->second);
        if (!seen.insert(edge_key(e)).second) {
            ++counts.duplicates_collapsed;
            continue;
        }
        edges.push_back(e);
    }
    if (edges.empty()) {
        throw DegenerateInputError("cites file yields no usable edges: " + path.string());
    }
    std::sort(edges.begin(), edges.end());
    counts.edges_retained = static_cast<std::int64_t>(edges.size());

    Graph graph;
    graph.num_nodes = counts.num_nodes;
    graph.node_ids = table.ids;
    graph.feature_dim = table.feature_dim;
    graph.feature_cols.reserve(table.rows.size());
    for (const NodeRecord& row : table.rows) graph.feature_cols.push_back(row.word_cols);
    graph.edges = std::move(edges);

    // Map label strings to indices in first-appearance order.
    std::unordered_map<std::string, std::int32_t> label_index;
    graph.labels.reserve(table.rows.size());
    for (const NodeRecord& row : table.rows) {
        auto [it, inserted] =
            label_index.emplace(row.label, static_cast<std::int32_t>(graph.label_names.size()));
        if (inserted) graph.label_names.push_back(row.label);
        graph.labels.push_back(it->second);
    }

    graph.validate();
    if (summary) *summary = counts;
    return graph;
}

Graph load_dataset(const std::filesystem::path& content_path,
                   const std::filesystem::path& cites_path, LoadSummary* summary) {
    const NodeTable table = load_content(content_path);
    return load_cites(cites_path, table, summary);
}

void save_edge_list(const Graph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open edge list for writing: " + path.string());
    EdgeList sorted = graph.edges;
    std::sort(sorted.begin(), sorted.end());
    for (const Edge& e : sorted) out << e.u << ' ' << e.v << '\n';
}

EdgeList load_edge_list(const std::filesystem::path& path, std::int32_t num_nodes) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open edge list: " + path.string());
    EdgeList edges;
    EdgeKeySet seen;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::int64_t a = -1, b = -1;
        if (!(fields >> a >> b)) {
            throw FormatError("edge list line " + std::to_string(line_no) + ": expected two indices");
        }
        if (a < 0 || b < 0 || a >= num_nodes || b >= num_nodes || a == b) {
            throw FormatError("edge list line " + std::to_string(line_no) + ": bad endpoints");
        }
        const Edge e = make_edge(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
        if (seen.insert(edge_key(e)).second) edges.push_back(e);
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

} // namespace adagrid
