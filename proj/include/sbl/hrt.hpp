#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbl/expander.hpp"
#include "sbl/graph.hpp"

namespace sbl {

struct ConstructionParams {
    int n = 0;        // total vertices, n = 2k(t+D)
    int r = 0;        // expander degree of U
    int t = 0;        // broom path length
    int k = 0;        // half separator size, |S| = 2k
    int D = 0;        // last vertex carries D-1 leaves
    double gamma_nominal = 0.0;   // 1/(8 r 2^r), reported only
    double gamma_achieved = 0.0;  // 2k/n, the operative separability at desk scale
    std::uint64_t seed = 0;
};

// Picks k from the hint or as the largest k <= gamma_target*n/2 with
// 2k | n, n/(2k) - t >= 2, k > r and k*r even; D follows.
ConstructionParams solve_params(int n, int r, int t, std::optional<int> k_hint = std::nullopt,
                                double gamma_target = 0.1, std::uint64_t seed = 0);

struct BroomComponent {
    int anchor = -1;            // its unique neighbor in S
    std::vector<int> path;      // t vertices, path.front() = first
    std::vector<int> leaves;    // D-1 leaves on path.back()
    int first() const { return path.front(); }
    int last() const { return path.back(); }
};

struct HrtGraph {
    Graph graph;
    VertexSet s_a, s_b;                    // S_A = 0..k-1, S_B = k..2k-1
    std::vector<BroomComponent> components; // component i anchored at vertex i
    ConstructionParams params;

    VertexSet separator() const { return s_a.set_union(s_b); }
};

// Deterministic assembly: S_A, S_B carry F (the double cover), then the 2k
// broom components in anchor order, path first, then leaves.
HrtGraph build_hrt(const ConstructionParams& params, const DoubleCover& cover);

// Convenience: U -> F -> H from params.seed.
HrtGraph build_reference(const ConstructionParams& params);

struct SeparatorCertificate {
    VertexSet separator;
    double gamma_required = 0.0;
    int max_component_size = 0;
    int component_count = 0;
    bool valid = false;
};

// Generic gamma-separability certificate for any graph and candidate S.
SeparatorCertificate separator_certificate(const Graph& g, const VertexSet& s, double gamma);
SeparatorCertificate verify_separator(const HrtGraph& h, double gamma);

struct StructureReport {
    bool ok = true;
    std::vector<std::string> violations;  // each carries a witness vertex/edge
    int max_degree = 0;
    int component_count = 0;
    int a_star_size = 0;
    int b_star_size = 0;
    bool d_bound_ok = false;     // D < 3n/k
    void fail(std::string msg) {
        ok = false;
        violations.push_back(std::move(msg));
    }
};

// Re-derives every Definition invariant from the graph itself (safe to run
// after deserialization).
StructureReport verify_structure(const HrtGraph& h);

nlohmann::json hrt_to_json(const HrtGraph& h);
HrtGraph hrt_from_json(const nlohmann::json& j);

nlohmann::json params_to_json(const ConstructionParams& p);
ConstructionParams params_from_json(const nlohmann::json& j);
nlohmann::json separator_certificate_to_json(const SeparatorCertificate& c);
nlohmann::json structure_report_to_json(const StructureReport& r);

} // namespace sbl
