#include "sbl/hrt.hpp"

#include <algorithm>
#include <cmath>

#include "sbl/errors.hpp"
#include "sbl/graph_ops.hpp"
#include "sbl/io.hpp"

namespace sbl {

namespace {

double gamma_nominal_of(int r) {
    // 1/(8 r 2^r) without overflowing the integer power
    return std::ldexp(1.0 / (8.0 * r), -r);
}

bool feasible_k(int n, int r, int t, int k) {
    if (k <= r) return false;
    if ((long long)k * r % 2 != 0) return false;
    if (n % (2 * k) != 0) return false;
    return n / (2 * k) - t >= 2; // D >= 2
}

std::optional<int> pick_k(int n, int r, int t, double gamma_target) {
    int k_max = int(std::floor(gamma_target * n / 2.0 + 1e-9));
    for (int k = k_max; k > r; --k)
        if (feasible_k(n, r, t, k)) return k;
    return std::nullopt;
}

} // namespace

ConstructionParams solve_params(int n, int r, int t, std::optional<int> k_hint,
                                double gamma_target, std::uint64_t seed) {
    if (n < 1 || r < 3 || t < 1) throw parameter_error("solve_params: need n >= 1, r >= 3, t >= 1");
    int k;
    if (k_hint) {
        k = *k_hint;
        if (!feasible_k(n, r, t, k)) {
            std::string why;
            if (k <= r) why = "k must exceed r";
            else if ((long long)k * r % 2 != 0) why = "k*r must be even";
            else if (n % (2 * k) != 0) why = "2k must divide n";
            else why = "n/(2k) - t must be >= 2";
            throw parameter_error("solve_params: infeasible k=" + std::to_string(k) + ": " + why);
        }
    } else {
        auto picked = pick_k(n, r, t, gamma_target);
        if (!picked) {
            // suggest the nearest feasible n at this gamma_target
            for (int n2 = n + 1; n2 <= n + 100000; ++n2)
                if (pick_k(n2, r, t, gamma_target))
                    throw parameter_error("solve_params: no feasible k for n=" + std::to_string(n) +
                                          "; nearest feasible n is " + std::to_string(n2));
            throw parameter_error("solve_params: no feasible k for n=" + std::to_string(n));
        }
        k = *picked;
    }
    ConstructionParams p;
    p.n = n;
    p.r = r;
    p.t = t;
    p.k = k;
    p.D = n / (2 * k) - t;
    p.gamma_nominal = gamma_nominal_of(r);
    p.gamma_achieved = 2.0 * k / n;
    p.seed = seed;
    return p;
}

HrtGraph build_hrt(const ConstructionParams& params, const DoubleCover& cover) {
    int k = params.k, t = params.t, D = params.D, n = params.n;
    if (cover.class_v1.size() != k || cover.class_v2.size() != k)
        throw parameter_error("build_hrt: F classes must have size k");
    if (cover.graph.min_degree() != params.r + 1 || cover.graph.max_degree() != params.r + 1)
        throw parameter_error("build_hrt: F must be (r+1)-regular");
    if (n != 2 * k * (t + D)) throw parameter_error("build_hrt: n != 2k(t+D)");

    std::vector<std::pair<int, int>> edges;
    // F lives on S: cover vertex i -> S_A[i], cover vertex k+i -> S_B[i];
    // the cover already numbers classes 0..k-1 and k..2k-1, so ids carry over.
    for (auto [u, v] : cover.graph.edges()) edges.emplace_back(u, v);

    HrtGraph h;
    h.params = params;
    int comp_size = t + D - 1;
    for (int anchor = 0; anchor < 2 * k; ++anchor) {
        BroomComponent comp;
        comp.anchor = anchor;
        int base = 2 * k + anchor * comp_size;
        comp.path.resize(t);
        for (int i = 0; i < t; ++i) comp.path[i] = base + i;
        comp.leaves.resize(D - 1);
        for (int i = 0; i < D - 1; ++i) comp.leaves[i] = base + t + i;
        edges.emplace_back(anchor, comp.first());
        for (int i = 0; i + 1 < t; ++i) edges.emplace_back(comp.path[i], comp.path[i + 1]);
        for (int leaf : comp.leaves) edges.emplace_back(comp.last(), leaf);
        h.components.push_back(std::move(comp));
    }

    h.graph = Graph(n, std::move(edges));
    std::vector<int> sa(k), sb(k);
    for (int i = 0; i < k; ++i) {
        sa[i] = i;
        sb[i] = k + i;
    }
    h.s_a = VertexSet(std::move(sa));
    h.s_b = VertexSet(std::move(sb));
    return h;
}

HrtGraph build_reference(const ConstructionParams& params) {
    auto u = random_near_ramanujan(params.k, params.r, params.seed);
    return build_hrt(params, double_cover_with_matching(u));
}

SeparatorCertificate separator_certificate(const Graph& g, const VertexSet& s, double gamma) {
    SeparatorCertificate cert;
    cert.separator = s;
    cert.gamma_required = gamma;
    auto comps = components_after_removal(g, s);
    cert.component_count = int(comps.size());
    for (const auto& c : comps) cert.max_component_size = std::max(cert.max_component_size, c.size());
    double budget = gamma * g.vertex_count();
    cert.valid = s.size() <= budget + 1e-9 && cert.max_component_size <= budget + 1e-9;
    return cert;
}

SeparatorCertificate verify_separator(const HrtGraph& h, double gamma) {
    return separator_certificate(h.graph, h.separator(), gamma);
}

StructureReport verify_structure(const HrtGraph& h) {
    StructureReport rep;
    const Graph& g = h.graph;
    const auto& p = h.params;
    int k = p.k, t = p.t, D = p.D;

    if (g.vertex_count() != p.n) rep.fail("vertex count != n");
    if (p.n != 2 * k * (t + D)) rep.fail("params violate n = 2k(t+D)");
    if (std::abs(p.gamma_achieved - 2.0 * k / p.n) > 1e-12)
        rep.fail("gamma_achieved != 2k/n");
    if (h.s_a.size() != k || h.s_b.size() != k) rep.fail("|S_A| or |S_B| != k");

    if (!bipartition(g)) rep.fail("H is not bipartite");
    if (!is_connected(g)) rep.fail("H is not connected");

    // S_A and S_B are independent; the (r+1)-regular F sits between them,
    // including the matching diagonal.
    auto side_of = [&](int v) { return v < k ? 0 : (v < 2 * k ? 1 : -1); };
    for (int v = 0; v < 2 * k; ++v) {
        int cross = 0, outside = 0;
        for (int w : g.neighbors(v)) {
            int sw = side_of(w);
            if (sw == side_of(v)) {
                rep.fail("edge inside S_" + std::string(side_of(v) == 0 ? "A" : "B") + " at (" +
                         std::to_string(v) + "," + std::to_string(w) + ")");
            } else if (sw >= 0) {
                ++cross;
            } else {
                ++outside;
            }
        }
        if (cross != p.r + 1)
            rep.fail("S vertex " + std::to_string(v) + " has " + std::to_string(cross) +
                     " cross edges, expected r+1");
        if (outside != 1)
            rep.fail("S vertex " + std::to_string(v) + " has " + std::to_string(outside) +
                     " neighbors outside S, expected 1");
        if (g.degree(v) != p.r + 2)
            rep.fail("S vertex " + std::to_string(v) + " degree != r+2");
    }
    for (int i = 0; i < k; ++i)
        if (!g.has_edge(i, k + i)) rep.fail("matching edge (" + std::to_string(i) + "," +
                                            std::to_string(k + i) + ") missing from F");

    // components of H - S must be the recorded brooms, one per anchor
    auto comps = components_after_removal(g, h.separator());
    rep.component_count = int(comps.size());
    if (int(comps.size()) != 2 * k) rep.fail("H-S has " + std::to_string(comps.size()) +
                                             " components, expected 2k");
    if (int(h.components.size()) != 2 * k) rep.fail("recorded component list has wrong size");

    std::vector<char> anchor_seen(2 * k, 0);
    for (const auto& comp : h.components) {
        if (comp.anchor < 0 || comp.anchor >= 2 * k || anchor_seen[comp.anchor]) {
            rep.fail("anchor map is not a bijection at anchor " + std::to_string(comp.anchor));
            continue;
        }
        anchor_seen[comp.anchor] = 1;
        if (int(comp.path.size()) != t || int(comp.leaves.size()) != D - 1) {
            rep.fail("component at anchor " + std::to_string(comp.anchor) + " is not a (t,D) broom");
            continue;
        }
        if (!g.has_edge(comp.anchor, comp.first()))
            rep.fail("anchor edge missing at " + std::to_string(comp.anchor));
        for (int i = 0; i + 1 < t; ++i)
            if (!g.has_edge(comp.path[i], comp.path[i + 1]))
                rep.fail("path edge missing in component of anchor " + std::to_string(comp.anchor));
        for (int leaf : comp.leaves) {
            if (!g.has_edge(comp.last(), leaf))
                rep.fail("leaf edge missing at leaf " + std::to_string(leaf));
            if (g.degree(leaf) != 1)
                rep.fail("leaf " + std::to_string(leaf) + " has degree " +
                         std::to_string(g.degree(leaf)) + ", expected 1");
        }
        int first_expected = t >= 2 ? 2 : D;
        if (g.degree(comp.first()) != first_expected)
            rep.fail("first vertex " + std::to_string(comp.first()) + " degree != " +
                     std::to_string(first_expected));
        if (t >= 2 && g.degree(comp.last()) != D)
            rep.fail("last vertex " + std::to_string(comp.last()) + " degree != D");
        // the component of H-S containing first must be exactly path + leaves
        std::vector<int> want = comp.path;
        want.insert(want.end(), comp.leaves.begin(), comp.leaves.end());
        VertexSet want_set(std::move(want));
        bool matched = false;
        for (const auto& c : comps)
            if (c.contains(comp.first())) {
                matched = c == want_set;
                break;
            }
        if (!matched)
            rep.fail("component of anchor " + std::to_string(comp.anchor) +
                     " does not match its recorded broom");
    }

    rep.max_degree = g.max_degree();
    int delta_expected = std::max(p.r + 2, D);
    if (rep.max_degree != delta_expected)
        rep.fail("max degree " + std::to_string(rep.max_degree) + " != max(r+2, D)");

    rep.d_bound_ok = D < 3.0 * p.n / k;
    if (!rep.d_bound_ok) rep.fail("D >= 3n/k");

    rep.a_star_size = k * (t + D - 1);
    rep.b_star_size = rep.a_star_size;
    if (2 * rep.a_star_size + 2 * k != p.n) rep.fail("|A*|+|B*|+|S| != n");
    if (rep.a_star_size < (1.0 - p.gamma_achieved) * p.n / 2.0 - 1e-9)
        rep.fail("|A*| < (1-gamma)n/2");

    return rep;
}

nlohmann::json params_to_json(const ConstructionParams& p) {
    return nlohmann::json{{"n", p.n},
                          {"r", p.r},
                          {"t", p.t},
                          {"k", p.k},
                          {"D", p.D},
                          {"gamma_nominal", p.gamma_nominal},
                          {"gamma_achieved", p.gamma_achieved},
                          {"seed", p.seed}};
}

ConstructionParams params_from_json(const nlohmann::json& j) {
    ConstructionParams p;
    p.n = j.at("n").get<int>();
    p.r = j.at("r").get<int>();
    p.t = j.at("t").get<int>();
    p.k = j.at("k").get<int>();
    p.D = j.at("D").get<int>();
    p.gamma_nominal = j.at("gamma_nominal").get<double>();
    p.gamma_achieved = j.at("gamma_achieved").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

nlohmann::json hrt_to_json(const HrtGraph& h) {
    GraphAnnotations ann;
    for (int v : h.s_a) ann.roles[v] = "sa";
    for (int v : h.s_b) ann.roles[v] = "sb";
    for (std::size_t i = 0; i < h.components.size(); ++i) {
        const auto& comp = h.components[i];
        for (int v : comp.path) {
            ann.roles[v] = "path";
            ann.component[v] = int(i);
        }
        ann.roles[comp.first()] = "first";
        if (comp.last() != comp.first()) ann.roles[comp.last()] = "last";
        for (int leaf : comp.leaves) {
            ann.roles[leaf] = "leaf";
            ann.component[leaf] = int(i);
        }
    }
    nlohmann::json j = graph_to_json(h.graph, &ann);
    j["params"] = params_to_json(h.params);
    return j;
}

HrtGraph hrt_from_json(const nlohmann::json& j) {
    if (!j.contains("params")) throw parameter_error("hrt json: missing 'params'");
    HrtGraph h;
    h.params = params_from_json(j.at("params"));
    GraphAnnotations ann;
    h.graph = graph_from_json(j, &ann);
    int k = h.params.k, t = h.params.t, D = h.params.D;

    std::vector<int> sa, sb;
    for (auto& [v, role] : ann.roles) {
        if (role == "sa") sa.push_back(v);
        if (role == "sb") sb.push_back(v);
    }
    h.s_a = VertexSet(std::move(sa));
    h.s_b = VertexSet(std::move(sb));
    if (h.s_a.size() != k || h.s_b.size() != k)
        throw parameter_error("hrt json: role maps do not give |S_A| = |S_B| = k");

    // rebuild broom components from the component map
    std::vector<std::vector<int>> members(2 * k);
    for (auto& [v, c] : ann.component) {
        if (c < 0 || c >= 2 * k) throw parameter_error("hrt json: component index out of range");
        members[c].push_back(v);
    }
    for (int c = 0; c < 2 * k; ++c) {
        if (int(members[c].size()) != t + D - 1)
            throw parameter_error("hrt json: component " + std::to_string(c) + " has wrong size");
        BroomComponent comp;
        int first = -1;
        std::vector<int> leaves;
        for (int v : members[c]) {
            auto it = ann.roles.find(v);
            std::string role = it == ann.roles.end() ? "" : it->second;
            if (role == "first") first = v;
            if (role == "leaf") leaves.push_back(v);
        }
        if (first < 0) throw parameter_error("hrt json: component without a first vertex");
        // anchor = first's unique neighbor inside S
        for (int w : h.graph.neighbors(first))
            if (w < 2 * k) comp.anchor = w;
        if (comp.anchor < 0) throw parameter_error("hrt json: first vertex has no S neighbor");
        // walk the path from first, avoiding leaves
        std::sort(leaves.begin(), leaves.end());
        std::vector<char> is_leaf(h.graph.vertex_count(), 0);
        for (int l : leaves) is_leaf[l] = 1;
        comp.path.push_back(first);
        int prev = -1, cur = first;
        while (int(comp.path.size()) < t) {
            int next = -1;
            for (int w : h.graph.neighbors(cur))
                if (w >= 2 * k && w != prev && !is_leaf[w]) next = w;
            if (next < 0) throw parameter_error("hrt json: broken path in component");
            comp.path.push_back(next);
            prev = cur;
            cur = next;
        }
        comp.leaves = std::move(leaves);
        h.components.push_back(std::move(comp));
    }
    // anchor order is the component order of the builder
    std::sort(h.components.begin(), h.components.end(),
              [](const BroomComponent& a, const BroomComponent& b) { return a.anchor < b.anchor; });
    return h;
}

nlohmann::json separator_certificate_to_json(const SeparatorCertificate& c) {
    return nlohmann::json{{"separator_size", c.separator.size()},
                          {"separator", c.separator.ids()},
                          {"gamma_required", c.gamma_required},
                          {"max_component_size", c.max_component_size},
                          {"component_count", c.component_count},
                          {"valid", c.valid}};
}

nlohmann::json structure_report_to_json(const StructureReport& r) {
    return nlohmann::json{{"ok", r.ok},
                          {"violations", r.violations},
                          {"max_degree", r.max_degree},
                          {"component_count", r.component_count},
                          {"a_star_size", r.a_star_size},
                          {"b_star_size", r.b_star_size},
                          {"d_bound_ok", r.d_bound_ok}};
}

} // namespace sbl
