#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sbl/embed.hpp"
#include "sbl/graph.hpp"
#include "sbl/hrt.hpp"

namespace sbl {

// Equal-size cluster structure with exact pair densities; the planted
// surrogate for a regularity partition.
struct RegularPartition {
    std::vector<VertexSet> clusters;
    VertexSet exceptional;                        // W_0
    int m = 0;                                    // common (base) cluster size
    double eps = 0.0;
    double d = 0.0;                               // density threshold
    std::vector<std::vector<double>> pair_density;
    bool planted = false;

    int cluster_count() const { return int(clusters.size()); }
};

void recompute_pair_densities(const Graph& host, RegularPartition& p);

nlohmann::json partition_to_json(const RegularPartition& p);
RegularPartition partition_from_json(const nlohmann::json& j);

struct PlantedHost {
    Graph graph;
    RegularPartition partition;
    double min_degree_fraction = 0.0;
    int repaired_vertices = 0;
};

// Host with l planted clusters; every designed pair is a random bipartite
// graph of density >= planted_density with min cross-degree >= delta_super*m
// (deficient vertices get extra random edges). Default design: all pairs.
PlantedHost planted_regular_host(int n, int l, double d, double delta_super, std::uint64_t seed,
                                 double planted_density = -1.0,
                                 const std::vector<std::pair<int, int>>* designed_pairs = nullptr);

struct RegularityCheck {
    bool falsified = false;
    VertexSet witness_x, witness_y;
    double pair_density = 0.0;
    double witness_density = 0.0;
    int samples_run = 0;
    int atypical_low = 0;        // vertices with deg(x,B) <= (d-eps)|B|
    int atypical_high = 0;
    bool atypical_ok = true;     // atypical_low <= eps|A|
};

// Falsification-only sampler for eps-regularity: degree-split candidate sets
// plus random (X,Y) with |X| >= ceil(eps|A|)+1. A clean result is evidence,
// not proof.
RegularityCheck sample_regularity(const Graph& g, const VertexSet& a, const VertexSet& b,
                                  double eps, int samples, std::uint64_t seed);

struct ReducedGraph {
    Graph graph;                                // one vertex per cluster
    std::vector<std::pair<int, int>> matching;  // cluster index pairs
    std::vector<int> partner;                   // cluster -> matched partner
    std::optional<int> dropped_cluster;         // odd leftover folded into W_0
    int min_reduced_degree = 0;
    double reduced_degree_bound = 0.0;          // (c - (2 eps + d)) * l
    bool reduced_degree_ok = false;
    int falsified_pairs = 0;
};

// Reduced graph from pair densities + sampling checks, then a maximum
// matching; an odd uncovered cluster is folded into W_0 (indices remapped).
// Two or more uncovered clusters is a host-too-sparse error.
ReducedGraph reduced_graph_and_matching(const Graph& host, RegularPartition& p, double eps_check,
                                        int samples, std::uint64_t seed,
                                        double host_min_degree_fraction);

struct SuperRegularReport {
    int m_before = 0, m_after = 0;
    std::vector<int> moved_per_cluster;
    int max_moved = 0;
    bool pairs_ok = false;   // every matched pair strictly super-regular afterwards
    int rounds = 0;
};

// Make every matching edge (eps,delta)-super-regular by discarding low
// cross-degree vertices, the same count from every cluster (pad into W_0).
SuperRegularReport make_super_regular(const Graph& host, RegularPartition& p,
                                      const ReducedGraph& r, double delta);

struct DistributeReport {
    int w0_size = 0;
    int max_gain = 0;
    double gain_bound = 0.0;   // 2|W_0|/l
    bool gain_ok = false;
    int size_spread = 0;
    double spread_bound = 0.0; // 3 eps m
    bool spread_ok = false;
    int min_j_degree = 0;
    double lemma_bound = 0.0;  // (1/2 + gamma'') l
    bool lemma_applicable = false;
    bool lemma_ok = true;
};

// Distribute W_0 greedily to least-loaded J-neighbors (J edge: enough degree
// into the matching partner), ties by lowest cluster id.
DistributeReport distribute_exceptional(const Graph& host, RegularPartition& p,
                                        const ReducedGraph& r, double delta, double gamma_eff,
                                        double host_min_degree_fraction);

struct AssignmentState {
    std::vector<int> cluster_of;    // guest vertex -> cluster, -1 for S
    std::vector<int> image_of;      // guest vertex -> host vertex, -1 unset
    std::vector<std::optional<VertexSet>> restriction; // T_x
    std::vector<int> assigned_count;   // per cluster
    std::vector<int> quota;            // per cluster fill target
    std::vector<int> reassigned_first; // arrivals per cluster (step 6)
    std::vector<int> reassigned_leaf;  // arrivals per cluster (step 7)
    std::vector<int> component_edge;   // component -> matching edge index
    std::vector<int> component_flip;
};

struct AssignReport {
    int retries_used = 0;
    std::vector<long long> edge_loads;
    double mean_load = 0.0;
    double load_slack = 0.0;
    int max_quota_dev = 0;
    bool ok = false;
};

// Components to uniformly random matching edges with a random side flip;
// resampled (bounded, seeded) until every edge load is within slack of the
// mean and every cluster is within 0.8*cap of its quota.
std::pair<AssignmentState, AssignReport> assign_components(const HrtGraph& guest,
                                                           const RegularPartition& p,
                                                           const ReducedGraph& r,
                                                           std::uint64_t seed, double load_slack,
                                                           int retries, double reassign_cap);

struct FirstVertexReport {
    int triggered = 0;
    int max_reassigned_into = 0;
    double cap = 0.0;
    bool cap_ok = true;
    int min_l_size = -1;          // over triggered vertices
    bool l_ge_half_ok = true;
    int min_choices_seen = -1;
    double threshold = 0.0;
    int required_choices = 0;
};

// Every first vertex gets its restriction T_y = N(image(anchor)) cap C(y);
// when the anchor image has fewer than `threshold` neighbors there, y moves
// to a cluster of L adjacent (in G_r) to its component's partner cluster,
// spread evenly. Fewer than `required_choices` options is a host-degree error.
FirstVertexReport reassign_first_vertices(const HrtGraph& guest, AssignmentState& state,
                                          const Graph& host, const RegularPartition& p,
                                          const ReducedGraph& r, double threshold,
                                          int required_choices, double reassign_cap);

struct RebalanceReport {
    int moves = 0;
    int two_hop_moves = 0;
    int max_arrivals = 0;
    double cap = 0.0;
    bool cap_ok = true;
    int min_leaves_per_cluster = 0;
    double leaf_supply_bound = 0.0; // (D-1)(1-gamma) m / (2(t+D-1)), logged
    bool leaf_supply_ok = true;     // soft: desk-scale clusters are part-filled
    bool filled = false;            // every cluster hit its quota exactly
};

// Move leaves (largest surplus first) until every cluster's assigned count
// equals its quota; a missing G_r edge routes through an intermediate
// matching pair in two hops.
RebalanceReport rebalance_leaves(const HrtGraph& guest, AssignmentState& state,
                                 const ReducedGraph& r, const RegularPartition& p,
                                 double reassign_cap, double gamma_eff);

struct BlowupResult {
    bool success = false;
    EmbeddingMap map;             // total map over V(H) on success
    int component_retries = 0;
    int global_restarts = 0;
    int failed_component = -1;
    std::vector<int> occupancy;   // per cluster at the end
    int min_candidates_seen = -1;
};

// Restriction-aware greedy tree embedding, components largest-first, with
// in-component backtracking, component restarts and global reseeds. Checks
// the (c, alpha) restriction caps before any placement.
BlowupResult blowup_embed(const HrtGraph& guest, AssignmentState& state, const Graph& host,
                          const RegularPartition& p, double c_restriction, double alpha,
                          std::uint64_t seed, int component_retries = 60, int global_restarts = 5);

struct PipelineConfig {
    std::uint64_t seed = 0;
    double rho = 0.5;
    std::optional<double> d;                  // default: partition's d, else sqrt(gamma)
    std::optional<double> eps;                // default d/20
    double eps_check_floor = 0.1;             // falsification scale floor (small-m statistics)
    std::optional<double> delta;              // default 0.3 d
    double c_restriction = 0.3;
    double alpha = 0.35;
    double load_slack = 0.10;
    int assign_retries = 500;
    int regularity_samples = 64;
    std::optional<double> l_threshold_frac;   // of m; default 3 gamma^(2/3)
    std::optional<double> reassign_cap_frac;  // of m; default gamma^(2/3)
    std::optional<double> min_choices_frac;   // of l; default 2 gamma^(1/3)
    int dense_retries = 20;
    int blowup_component_retries = 60;
    int blowup_global_restarts = 5;
    std::optional<double> gamma_eff;          // default guest gamma_achieved
};

struct PipelineResult {
    bool success = false;
    EmbeddingMap map;
    nlohmann::json report;
};

// Steps 1..8 end to end against a host with a known (typically planted)
// partition. Never throws for a failed embedding attempt - `success` and the
// stage flags in the report carry the outcome; throws only for bad inputs
// (parameter_error) or broken internal invariants (lemma_violation).
PipelineResult run_pipeline(const HrtGraph& guest, const Graph& host,
                            const RegularPartition& partition, const PipelineConfig& cfg);

} // namespace sbl
