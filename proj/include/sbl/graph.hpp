#pragma once

#include <utility>
#include <vector>

#include "sbl/bitset.hpp"

namespace sbl {

// Undirected simple graph over dense vertex ids 0..n-1. Immutable after
// construction; adjacency lists are sorted, edges are stored once as (u,v)
// with u < v. Construction normalizes duplicate edges away and rejects
// self-loops and out-of-range ids.
class Graph {
public:
    Graph() = default;
    Graph(int vertex_count, std::vector<std::pair<int, int>> edge_list);

    int vertex_count() const { return n_; }
    int edge_count() const { return int(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    int degree(int v) const { return int(adj_[v].size()); }
    bool has_edge(int u, int v) const;

    int max_degree() const;
    int min_degree() const;

    // per-vertex neighbor bitsets, built on demand by algorithms that need them
    std::vector<DynBitset> adjacency_bitsets() const;

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
};

// Sorted set of distinct vertex ids. Ids are validated against a graph only
// at use sites (operations check ranges where it matters).
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(std::vector<int> ids);
    static VertexSet range(int n);

    int size() const { return int(ids_.size()); }
    bool empty() const { return ids_.empty(); }
    bool contains(int v) const;
    const std::vector<int>& ids() const { return ids_; }
    int max_id() const { return ids_.empty() ? -1 : ids_.back(); }

    auto begin() const { return ids_.begin(); }
    auto end() const { return ids_.end(); }

    bool disjoint_with(const VertexSet& other) const;
    VertexSet set_union(const VertexSet& other) const;
    VertexSet set_difference(const VertexSet& other) const;

    bool operator==(const VertexSet& o) const { return ids_ == o.ids_; }

private:
    std::vector<int> ids_;
};

} // namespace sbl
