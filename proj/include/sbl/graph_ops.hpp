#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sbl/graph.hpp"

namespace sbl {

// d(X,Y) = e(X,Y) / (|X||Y|) for disjoint nonempty X, Y.
// Returned as double; |error| < 1e-12 for desk-scale counts.
double density(const Graph& g, const VertexSet& x, const VertexSet& y);

// Quadratic-form edge count sum_{u in A} |N(u) cap B|. Equals e(A,B) for
// disjoint A, B; edges inside A cap B are counted twice. This is the
// convention under which the mixing bound holds for arbitrary A, B.
long long cross_pair_count(const Graph& g, const VertexSet& a, const VertexSet& b);

struct SetDistance {
    bool reachable = false;
    int distance = -1;            // hops; 0 when X and Y intersect
    std::vector<int> path;        // shortest witness x..y, empty if unreachable
};

// min over x in X, y in Y of hop distance, with a shortest-path witness.
SetDistance bfs_distance(const Graph& g, const VertexSet& x, const VertexSet& y);

// Connected components of G - S, each sorted, ordered by smallest member.
std::vector<VertexSet> components_after_removal(const Graph& g, const VertexSet& s);

// 2-coloring if bipartite (per component the lowest-id vertex gets class 0),
// nullopt otherwise.
std::optional<std::pair<VertexSet, VertexSet>> bipartition(const Graph& g);

bool is_connected(const Graph& g);

} // namespace sbl
