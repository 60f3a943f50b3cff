#pragma once

#include <utility>
#include <vector>

#include "sbl/graph.hpp"

namespace sbl {

// Maximum cardinality matching in a general graph (Edmonds: augmenting paths
// with blossom contraction). Returns mate[v] = matched partner or -1.
std::vector<int> max_matching(const Graph& g);

// Convenience: the matching as (u,v) pairs with u < v, sorted.
std::vector<std::pair<int, int>> max_matching_pairs(const Graph& g);

} // namespace sbl
