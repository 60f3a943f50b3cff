#include "sbl/graph.hpp"

#include <algorithm>
#include <string>

#include "sbl/errors.hpp"

namespace sbl {

Graph::Graph(int vertex_count, std::vector<std::pair<int, int>> edge_list) : n_(vertex_count) {
    if (vertex_count < 0) throw parameter_error("vertex_count must be nonnegative");
    for (auto& [u, v] : edge_list) {
        if (u < 0 || v < 0 || u >= n_ || v >= n_)
            throw parameter_error("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                  ") out of range for n=" + std::to_string(n_));
        if (u == v) throw parameter_error("self-loop at vertex " + std::to_string(u));
        if (u > v) std::swap(u, v);
    }
    std::sort(edge_list.begin(), edge_list.end());
    edge_list.erase(std::unique(edge_list.begin(), edge_list.end()), edge_list.end());
    edges_ = std::move(edge_list);

    adj_.assign(n_, {});
    for (auto [u, v] : edges_) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
}

bool Graph::has_edge(int u, int v) const {
    if (u == v) return false;
    const auto& a = adj_[degree(u) <= degree(v) ? u : v];
    int w = degree(u) <= degree(v) ? v : u;
    return std::binary_search(a.begin(), a.end(), w);
}

int Graph::max_degree() const {
    int d = 0;
    for (int v = 0; v < n_; ++v) d = std::max(d, degree(v));
    return d;
}

int Graph::min_degree() const {
    if (n_ == 0) return 0;
    int d = degree(0);
    for (int v = 1; v < n_; ++v) d = std::min(d, degree(v));
    return d;
}

std::vector<DynBitset> Graph::adjacency_bitsets() const {
    std::vector<DynBitset> bits(n_, DynBitset(n_));
    for (auto [u, v] : edges_) {
        bits[u].set(v);
        bits[v].set(u);
    }
    return bits;
}

VertexSet::VertexSet(std::vector<int> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    if (!ids_.empty() && ids_.front() < 0) throw parameter_error("negative vertex id in set");
}

VertexSet VertexSet::range(int n) {
    VertexSet s;
    s.ids_.resize(n);
    for (int i = 0; i < n; ++i) s.ids_[i] = i;
    return s;
}

bool VertexSet::contains(int v) const {
    return std::binary_search(ids_.begin(), ids_.end(), v);
}

bool VertexSet::disjoint_with(const VertexSet& other) const {
    auto a = ids_.begin();
    auto b = other.ids_.begin();
    while (a != ids_.end() && b != other.ids_.end()) {
        if (*a == *b) return false;
        if (*a < *b) ++a; else ++b;
    }
    return true;
}

VertexSet VertexSet::set_union(const VertexSet& other) const {
    std::vector<int> out;
    out.reserve(ids_.size() + other.ids_.size());
    std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                   std::back_inserter(out));
    VertexSet s;
    s.ids_ = std::move(out);
    return s;
}

VertexSet VertexSet::set_difference(const VertexSet& other) const {
    std::vector<int> out;
    std::set_difference(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                        std::back_inserter(out));
    VertexSet s;
    s.ids_ = std::move(out);
    return s;
}

} // namespace sbl
