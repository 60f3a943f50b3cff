#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sbl/graph.hpp"
#include "sbl/hrt.hpp"

namespace sbl {

// position[v] in 0..n-1, a bijection.
struct Ordering {
    std::vector<int> position;
};

bool is_valid_ordering(const Graph& g, const Ordering& pi);

// max over edges uv of |position[u] - position[v]|; 0 for edgeless graphs.
int ordering_stretch(const Graph& g, const Ordering& pi);

struct ExactBandwidthResult {
    std::optional<int> exact;
    int lower = 0;            // best proven lower bound (valid even on limit exhaustion)
    int upper = 0;            // best witnessed upper bound
    long long nodes = 0;
    bool limit_hit = false;
};

// Branch-and-bound (per-target decision searches with slack pruning and
// host-twin symmetry breaking). Exact for |V| up to ~24; node_limit caps
// the total search.
ExactBandwidthResult exact_bandwidth(const Graph& g, long long node_limit = 50'000'000);

enum class OrderingStrategy { bfs_level, min_width_greedy };

// Upper-bound witness generator. bfs_level orders by BFS layers from a
// pseudo-peripheral start (Cuthill-McKee style); min_width_greedy grows the
// ordering minimizing the worst stretch committed or forced so far.
std::pair<Ordering, int> heuristic_ordering(const Graph& g, OrderingStrategy strategy,
                                            std::uint64_t seed);

struct ShortPathWitness {
    int x = -1, y = -1;
    std::vector<int> path;
    int length = 0;
    int x_set_size = 0, y_set_size = 0;
};

// BFS witness for the short-path lemma: for disjoint X, Y of size >= 0.35n
// in a valid H, some x in X and y in Y are within distance 2t+4. A longer
// (or infinite) witness throws lemma_violation - it indicates a broken
// construction, not bad data.
ShortPathWitness short_path_witness(const HrtGraph& h, const VertexSet& x, const VertexSet& y);

struct BandwidthBoundReport {
    int n = 0;
    int lower_bound = 0;
    std::string lower_provenance;      // "short_path_certificate" or "exact"
    int upper_bound = 0;
    Ordering upper_witness;
    std::optional<int> exact;
    int t_used = 0;
    int probes = 0;
    int min_probe_stretch = 0;         // min over probes of the witness-path max stretch
};

// lower bound ceil(0.3 n / (2t+4)); every probed ordering (random shuffles
// plus both heuristics) is checked to respect it via a prefix/suffix witness.
BandwidthBoundReport bandwidth_lower_bound(const HrtGraph& h, int orderings_to_probe,
                                           std::uint64_t seed);

nlohmann::json bandwidth_report_to_json(const BandwidthBoundReport& r);
nlohmann::json witness_to_json(const ShortPathWitness& w);

} // namespace sbl
