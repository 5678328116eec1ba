#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

namespace adagrid {

/// Undirected edge, stored normalized with u < v.
struct Edge {
    std::int32_t u = 0;
    std::int32_t v = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

constexpr Edge make_edge(std::int32_t a, std::int32_t b) {
    return a < b ? Edge{a, b} : Edge{b, a};
}

constexpr std::uint64_t edge_key(const Edge& e) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.u)) << 32) |
           static_cast<std::uint32_t>(e.v);
}

using EdgeList = std::vector<Edge>;
using EdgeKeySet = std::unordered_set<std::uint64_t>;

inline EdgeKeySet to_key_set(std::span<const Edge> edges) {
    EdgeKeySet keys;
    keys.reserve(edges.size() * 2);
    for (const Edge& e : edges) keys.insert(edge_key(e));
    return keys;
}

inline bool contains_edge(const EdgeKeySet& keys, const Edge& e) {
    return keys.count(edge_key(e)) > 0;
}

} // namespace adagrid
