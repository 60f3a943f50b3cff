#include "sbl/hosts.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sbl/errors.hpp"
#include "sbl/graph_ops.hpp"
#include "sbl/rng.hpp"

namespace sbl {

VertexSet robust_neighborhood(const Graph& g, const VertexSet& s, double nu) {
    if (nu <= 0.0 || nu >= 1.0) throw parameter_error("robust_neighborhood: need 0 < nu < 1");
    std::vector<char> in_s(g.vertex_count(), 0);
    for (int v : s) in_s[v] = 1;
    double need = nu * g.vertex_count();
    std::vector<int> out;
    for (int v = 0; v < g.vertex_count(); ++v) {
        int count = 0;
        for (int w : g.neighbors(v)) count += in_s[w];
        if (count + 1e-9 >= need) out.push_back(v);
    }
    return VertexSet(std::move(out));
}

RobustProbeReport robust_expander_probe(const Graph& g, RobustExpanderParams params, int trials,
                                        std::uint64_t seed,
                                        const std::vector<VertexSet>& adversarial) {
    if (trials < 1) throw parameter_error("robust_expander_probe: trials >= 1");
    if (!(params.nu > 0 && params.nu <= params.tau && params.tau < 1))
        throw parameter_error("robust_expander_probe: need 0 < nu <= tau < 1");
    int n = g.vertex_count();
    int lo = int(std::ceil(params.tau * n - 1e-9));
    int hi = int(std::floor((1.0 - params.tau) * n + 1e-9));
    if (lo > hi) throw parameter_error("robust_expander_probe: empty size window (tau too large)");
    lo = std::max(lo, 1);

    RobustProbeReport rep;
    rep.min_margin = 1e18;
    auto check = [&](const VertexSet& s) {
        VertexSet rn = robust_neighborhood(g, s, params.nu);
        double margin = rn.size() - (s.size() + params.nu * n);
        rep.min_margin = std::min(rep.min_margin, margin);
        if (margin < -1e-9 && !rep.violation_found) {
            rep.violation_found = true;
            rep.violating_set = s;
            rep.violating_rn_size = rn.size();
        }
    };

    for (const auto& s : adversarial) {
        if (s.size() < lo || s.size() > hi) continue;
        check(s);
        ++rep.adversarial_checked;
    }
    for (int t = 0; t < trials; ++t) {
        auto rng = make_rng(substream(seed, std::uint64_t(t)));
        std::uniform_int_distribution<int> size_pick(lo, hi);
        check(VertexSet(sample_distinct(rng, n, size_pick(rng))));
        ++rep.trials;
    }
    return rep;
}

LayeredHost build_layered_host(int n) {
    if (n <= 0 || n % 100 != 0) throw parameter_error("build_layered_host: need 100 | n");
    int s = n / 100;
    LayeredHost host;
    host.layer_size = s;
    std::vector<std::pair<int, int>> edges;
    auto layer_begin = [&](int i) { return i * s; }; // layer index 0..99
    for (int i = 0; i < 100; ++i) {
        std::vector<int> members(s);
        for (int j = 0; j < s; ++j) members[j] = layer_begin(i) + j;
        host.layers.emplace_back(VertexSet(std::move(members)));
    }
    for (int i = 0; i + 1 < 100; ++i)
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b) edges.emplace_back(layer_begin(i) + a, layer_begin(i + 1) + b);
    for (int i : {0, 99})
        for (int a = 0; a < s; ++a)
            for (int b = a + 1; b < s; ++b) edges.emplace_back(layer_begin(i) + a, layer_begin(i) + b);
    host.graph = Graph(n, std::move(edges));
    return host;
}

std::vector<VertexSet> layer_union_candidates(const LayeredHost& host,
                                              RobustExpanderParams params) {
    int n = host.graph.vertex_count();
    int lo = int(std::ceil(params.tau * n - 1e-9));
    int hi = int(std::floor((1.0 - params.tau) * n + 1e-9));
    std::vector<VertexSet> out;
    VertexSet all = VertexSet::range(n);
    for (int i = 0; i < 100; ++i) {
        VertexSet window;
        for (int j = i; j < 100; ++j) {
            window = window.set_union(host.layers[j]);
            if (window.size() > hi) break;
            if (window.size() >= lo) out.push_back(window);
            VertexSet comp = all.set_difference(window);
            if (comp.size() >= lo && comp.size() <= hi) out.push_back(comp);
        }
    }
    return out;
}

NonEmbeddabilityCertificate layered_non_embeddability(int t, const LayeredHost& host) {
    if (t < 1) throw parameter_error("layered_non_embeddability: t >= 1");
    VertexSet x, y;
    for (int i = 0; i < 35; ++i) x = x.set_union(host.layers[i]);
    for (int i = 65; i < 100; ++i) y = y.set_union(host.layers[i]);
    auto dist = bfs_distance(host.graph, x, y);
    if (!dist.reachable || dist.distance != 31)
        throw lemma_violation("layered host: distance between layer blocks is " +
                              std::to_string(dist.distance) + ", expected 31");
    NonEmbeddabilityCertificate cert;
    cert.host_x = std::move(x);
    cert.host_y = std::move(y);
    cert.host_distance = dist.distance;
    cert.guest_short_path_bound = 2 * t + 4;
    cert.conclusion = cert.host_distance > cert.guest_short_path_bound;
    cert.method = "distance_obstruction";
    return cert;
}

namespace {

TwoCliqueHost assemble_two_clique(int a, int b, int o, int n, double gamma, double deviation) {
    if (a < 1 || b < 1 || o < 0 || o > std::min(a, b))
        throw parameter_error("two-clique host: inconsistent sizes");
    if (a + b - o != n)
        throw parameter_error("two-clique host: sizes do not sum to n (a=" + std::to_string(a) +
                              " b=" + std::to_string(b) + " overlap=" + std::to_string(o) + ")");
    // clique A occupies [0, a); the overlap is its tail [a-o, a); clique B is [a-o, n)
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < a; ++u)
        for (int v = u + 1; v < a; ++v) edges.emplace_back(u, v);
    for (int u = a - o; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);

    TwoCliqueHost host;
    host.graph = Graph(n, std::move(edges));
    host.n = n;
    host.gamma = gamma;
    host.clique_a = a;
    host.clique_b = b;
    host.overlap = o;
    std::vector<int> ov(o);
    for (int i = 0; i < o; ++i) ov[i] = a - o + i;
    host.overlap_set = VertexSet(std::move(ov));
    host.min_degree_expected = std::min(a, b) - 1;
    host.rounding_deviation = deviation;
    return host;
}

} // namespace

TwoCliqueHost build_two_clique_host(int n, double gamma) {
    if (n < 4 || gamma <= 0 || gamma >= 1)
        throw parameter_error("build_two_clique_host: need n >= 4 and 0 < gamma < 1");
    double exact_size = n / 2.0 + gamma * n / 100.0;
    int s = int(std::llround(exact_size));
    int o = 2 * s - n; // overlap adjusted last so the total is exactly n
    if (o < 0)
        throw parameter_error("build_two_clique_host: rounding gives negative overlap; try n=" +
                              std::to_string(n + 1));
    return assemble_two_clique(s, s, o, n, gamma, std::abs(s - exact_size));
}

TwoCliqueHost two_clique_explicit(int clique_a, int clique_b, int overlap) {
    return assemble_two_clique(clique_a, clique_b, overlap, clique_a + clique_b - overlap, 0.0, 0.0);
}

Graph mini_two_sided_guest(int w, int t, int D) {
    if (w < 1 || t < 1 || D < 2) throw parameter_error("mini_two_sided_guest: need w>=1,t>=1,D>=2");
    int comp_size = t + D - 1;
    int n = 2 * w + 2 * w * comp_size;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) edges.emplace_back(i, w + j); // K_{w,w} bridge
    for (int anchor = 0; anchor < 2 * w; ++anchor) {
        int base = 2 * w + anchor * comp_size;
        edges.emplace_back(anchor, base);
        for (int i = 0; i + 1 < t; ++i) edges.emplace_back(base + i, base + i + 1);
        for (int i = 0; i < D - 1; ++i) edges.emplace_back(base + t - 1, base + t + i);
    }
    return Graph(n, std::move(edges));
}

bool two_clique_embeddable(const Graph& h, int clique_a, int clique_b, int overlap) {
    int n = h.vertex_count();
    if (clique_a + clique_b - overlap != n) return false;
    int cap_a = clique_a - overlap, cap_b = clique_b - overlap;

    // enumerate overlap images U (|U| = overlap <= small), then bin-pack the
    // components of H-U into the two clique remainders
    std::vector<int> pick(overlap);
    std::vector<char> dp;
    auto feasible = [&](const VertexSet& u) {
        auto comps = components_after_removal(h, u);
        dp.assign(std::size_t(cap_a) + 1, 0);
        dp[0] = 1;
        long long total = 0;
        for (const auto& c : comps) total += c.size();
        for (const auto& c : comps) {
            int sz = c.size();
            if (sz > cap_a && sz > cap_b) return false;
            for (int x = cap_a; x >= sz; --x)
                if (dp[x - sz]) dp[x] = 1;
        }
        for (int x = 0; x <= cap_a; ++x)
            if (dp[x] && total - x <= cap_b) return true;
        return false;
    };

    std::vector<int> subset;
    // iterate all overlap-subsets of V(H)
    std::function<bool(int, int)> rec = [&](int start, int remaining) {
        if (remaining == 0) return feasible(VertexSet(std::vector<int>(subset)));
        for (int v = start; v <= n - remaining; ++v) {
            subset.push_back(v);
            if (rec(v + 1, remaining - 1)) return true;
            subset.pop_back();
        }
        return false;
    };
    return rec(0, overlap);
}

nlohmann::json nonembed_certificate_to_json(const NonEmbeddabilityCertificate& c) {
    return nlohmann::json{{"host_x_size", c.host_x.size()},
                          {"host_y_size", c.host_y.size()},
                          {"host_x", c.host_x.ids()},
                          {"host_y", c.host_y.ids()},
                          {"host_distance", c.host_distance},
                          {"guest_short_path_bound", c.guest_short_path_bound},
                          {"conclusion", c.conclusion},
                          {"method", c.method}};
}

nlohmann::json robust_probe_to_json(const RobustProbeReport& r) {
    nlohmann::json j{{"trials", r.trials},
                     {"adversarial_checked", r.adversarial_checked},
                     {"violation_found", r.violation_found},
                     {"min_margin", r.min_margin},
                     {"sampling_only", r.sampling_only}};
    if (r.violation_found) {
        j["violating_set"] = r.violating_set.ids();
        j["violating_rn_size"] = r.violating_rn_size;
    }
    return j;
}

nlohmann::json two_clique_to_json(const TwoCliqueHost& h) {
    return nlohmann::json{{"n", h.n},
                          {"gamma", h.gamma},
                          {"clique_a", h.clique_a},
                          {"clique_b", h.clique_b},
                          {"overlap", h.overlap},
                          {"overlap_set", h.overlap_set.ids()},
                          {"min_degree_expected", h.min_degree_expected},
                          {"min_degree_actual", h.graph.min_degree()},
                          {"rounding_deviation", h.rounding_deviation}};
}

} // namespace sbl
