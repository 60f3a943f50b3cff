#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sbl/graph.hpp"

namespace sbl {

struct RobustExpanderParams {
    double nu = 0.0;
    double tau = 0.0;
};

// RN_{nu,G}(S): vertices with at least nu*n neighbors in S.
VertexSet robust_neighborhood(const Graph& g, const VertexSet& s, double nu);

struct RobustProbeReport {
    int trials = 0;
    int adversarial_checked = 0;
    bool violation_found = false;
    VertexSet violating_set;
    int violating_rn_size = 0;
    double min_margin = 0.0;      // min over checked S of |RN(S)| - (|S| + nu n)
    bool sampling_only = true;    // a clean probe is evidence, not a proof
};

// Samples `trials` sets in the window tau*n <= |S| <= (1-tau)*n (uniform
// size, uniform membership) plus the supplied adversarial candidates.
RobustProbeReport robust_expander_probe(const Graph& g, RobustExpanderParams params, int trials,
                                        std::uint64_t seed,
                                        const std::vector<VertexSet>& adversarial = {});

// The 100-layer host: consecutive layers complete bipartite, end layers
// complete. Requires 100 | n.
struct LayeredHost {
    Graph graph;
    std::vector<VertexSet> layers; // layers[0] = A_1, ..., layers[99] = A_100
    int layer_size = 0;
};

LayeredHost build_layered_host(int n);

// Layer unions (windows and their complements) sized into the probe window -
// the structured adversarial candidates for the layered host.
std::vector<VertexSet> layer_union_candidates(const LayeredHost& host, RobustExpanderParams params);

struct NonEmbeddabilityCertificate {
    VertexSet host_x, host_y;
    int host_distance = 0;
    int guest_short_path_bound = 0;  // 2t+4
    bool conclusion = false;         // host_distance > guest bound  =>  H not a subgraph
    std::string method;              // "distance_obstruction" or "exhaustive"
};

// X = A_1..A_35, Y = A_66..A_100; asserts the set distance is exactly 31
// (anything else is a construction bug).
NonEmbeddabilityCertificate layered_non_embeddability(int t, const LayeredHost& host);

struct TwoCliqueHost {
    Graph graph;
    int n = 0;
    double gamma = 0.0;
    int clique_a = 0, clique_b = 0;  // clique sizes
    int overlap = 0;
    VertexSet overlap_set;
    int min_degree_expected = 0;     // n/2 + gamma n/100 - 1 after rounding
    double rounding_deviation = 0.0; // |clique size - (n/2 + gamma n/100)|
};

// Two cliques of round(n/2 + gamma n/100) vertices; the overlap is adjusted
// last so the total is exactly n.
TwoCliqueHost build_two_clique_host(int n, double gamma);

// Explicit sizes (a + b - overlap vertices); used for the desk-scale
// tightness comparison where the gamma formula cannot reach overlap 1.
TwoCliqueHost two_clique_explicit(int clique_a, int clique_b, int overlap);

// Scale-free analog of the two-sided guest: S_A, S_B of size w joined by a
// K_{w,w} bridge, each anchor carrying a (t,D) broom. 2w(t+D) vertices.
Graph mini_two_sided_guest(int bridge_width, int t, int D);

// Exact decider for clique hosts: H spans two_clique(a,b,o) iff some o-subset
// U of V(H) disconnects the rest into component groups fitting (a-o, b-o).
// This is the Menger-style obstruction in checkable form.
bool two_clique_embeddable(const Graph& h, int clique_a, int clique_b, int overlap);

nlohmann::json nonembed_certificate_to_json(const NonEmbeddabilityCertificate& c);
nlohmann::json robust_probe_to_json(const RobustProbeReport& r);
nlohmann::json two_clique_to_json(const TwoCliqueHost& h);

} // namespace sbl
