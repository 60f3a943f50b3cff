#pragma once

#include <cstdint>
#include <json.hpp>

#include "sbl/graph.hpp"

namespace sbl {

// An r-regular graph together with its verified spectral data.
struct RegularGraphReport {
    Graph graph;
    int r = 0;
    int k = 0;                       // vertex count
    double lambda = 0.0;             // second largest |eigenvalue|
    double ramanujan_threshold = 0.0; // 2*sqrt(r-1)
    bool is_ramanujan = false;       // lambda <= threshold + eig_tolerance
    double eig_tolerance = 0.0;
    int resamples_used = 0;
    bool near_ramanujan = true;      // false when resampling gave up
};

inline double default_eig_tolerance(int r) { return 0.05 * std::sqrt(double(r - 1)); }

// Random simple r-regular graph on k vertices (k > r >= 3, k*r even),
// deterministic per seed. Pairing model with stub-level rejection; when
// r > k/2 the (k-1-r)-regular complement is generated instead and inverted.
Graph random_regular(int k, int r, std::uint64_t seed, int max_restarts = 600);

// lambda = max |mu| over the nontrivial adjacency eigenvalues of a connected
// regular graph (dense symmetric solve, k <= 4000, abs error <= 1e-8).
double second_eigenvalue(const Graph& g);

// Fills the spectral report for an existing regular graph.
RegularGraphReport analyze_regular(Graph g, double eig_tolerance = -1.0);

// Generate and resample until lambda <= 2*sqrt(r-1) + tol (at most
// max_resamples attempts); on exhaustion returns the best graph seen with
// near_ramanujan = false, never aborts.
RegularGraphReport random_near_ramanujan(int k, int r, std::uint64_t seed,
                                         int max_resamples = 20, double eig_tolerance = -1.0);

struct MixingDeviation {
    long long observed = 0;   // cross_pair_count(A,B)
    double expected = 0.0;    // |A||B| r / k
    double bound = 0.0;       // (2*sqrt(r-1) or measured lambda) * sqrt(ab) * k
    double bound_measured = 0.0; // always measured lambda * sqrt(ab) * k
    bool holds = false;
    bool holds_measured = false;
    double lambda_used = 0.0;
};

MixingDeviation mixing_deviation(const RegularGraphReport& report, const VertexSet& a,
                                 const VertexSet& b);

// convenience overload: analyzes the graph first (one eigensolve per call)
MixingDeviation mixing_deviation(const Graph& g, const VertexSet& a, const VertexSet& b);

// Bipartite double cover of U plus the perfect matching x1-x2.
// Vertices 0..k-1 are the first copies, k..2k-1 the second.
struct DoubleCover {
    Graph graph;
    VertexSet class_v1, class_v2;
    RegularGraphReport source;
};

DoubleCover double_cover_with_matching(const RegularGraphReport& report);

struct ThirdsReport {
    int trials = 0;
    int violations = 0;
    long long min_edges = 0;
    int set_size = 0;
    bool low_r_warning = false;   // plain mode with r < 35: bound may fail legitimately
};

// e(A,B) >= 1 for sampled thirds. Plain mode samples disjoint A,B of size
// floor(k/3) in U; double-cover mode samples A in V1, B in V2.
ThirdsReport thirds_edge_check(const RegularGraphReport& report, int trials, std::uint64_t seed);
ThirdsReport thirds_edge_check(const DoubleCover& cover, int trials, std::uint64_t seed);

struct ExpansionResult {
    int neighborhood_size = 0;
    bool holds = false;       // |N(A)| >= |A|, guaranteed by the matching
};

// A must lie entirely within one class of F.
ExpansionResult expansion_check(const DoubleCover& cover, const VertexSet& a);

nlohmann::json regular_report_to_json(const RegularGraphReport& r, bool include_graph = true);
RegularGraphReport regular_report_from_json(const nlohmann::json& j);

} // namespace sbl
