#include "sbl/expander.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "sbl/errors.hpp"
#include "sbl/graph_ops.hpp"
#include "sbl/io.hpp"
#include "sbl/rng.hpp"

namespace sbl {

namespace {

// One pairing-model attempt: pair up vertex stubs, rejecting any stub pair
// that would form a loop or repeated edge; fails (returns empty) when the
// remaining stubs admit no legal pair.
bool pairing_attempt(int k, int r, std::mt19937_64& rng,
                     std::vector<std::pair<int, int>>& edges) {
    edges.clear();
    std::vector<int> stubs;
    stubs.reserve(std::size_t(k) * r);
    for (int v = 0; v < k; ++v)
        for (int i = 0; i < r; ++i) stubs.push_back(v);

    std::set<std::pair<int, int>> present;
    auto legal = [&](int u, int v) {
        if (u == v) return false;
        return !present.count({std::min(u, v), std::max(u, v)});
    };

    while (!stubs.empty()) {
        bool placed = false;
        int budget = 40 + int(stubs.size());
        std::uniform_int_distribution<std::size_t> pick(0, stubs.size() - 1);
        while (budget-- > 0) {
            std::size_t i = pick(rng), j = pick(rng);
            if (i == j) continue;
            int u = stubs[i], v = stubs[j];
            if (!legal(u, v)) continue;
            present.insert({std::min(u, v), std::max(u, v)});
            edges.emplace_back(u, v);
            if (i < j) std::swap(i, j); // remove the later index first
            stubs[i] = stubs.back(); stubs.pop_back();
            stubs[j] = stubs.back(); stubs.pop_back();
            placed = true;
            break;
        }
        if (placed) continue;
        // random probing stalled: scan for any legal pair before giving up
        for (std::size_t i = 0; i < stubs.size() && !placed; ++i)
            for (std::size_t j = i + 1; j < stubs.size() && !placed; ++j)
                if (legal(stubs[i], stubs[j])) {
                    present.insert({std::min(stubs[i], stubs[j]), std::max(stubs[i], stubs[j])});
                    edges.emplace_back(stubs[i], stubs[j]);
                    stubs[j] = stubs.back(); stubs.pop_back();
                    stubs[i] = stubs.back(); stubs.pop_back();
                    placed = true;
                }
        if (!placed) return false;
    }
    return true;
}

Graph pairing_model(int k, int r, std::uint64_t seed, int max_restarts) {
    if (r == 0) return Graph(k, {});
    std::vector<std::pair<int, int>> edges;
    for (int attempt = 0; attempt < max_restarts; ++attempt) {
        auto rng = make_rng(substream(seed, std::uint64_t(attempt)));
        if (pairing_attempt(k, r, rng, edges)) return Graph(k, edges);
    }
    throw generation_error("random_regular: pairing model failed to produce a simple graph",
                           max_restarts);
}

Graph complement(const Graph& g) {
    std::vector<std::pair<int, int>> edges;
    int n = g.vertex_count();
    edges.reserve(std::size_t(n) * (n - 1) / 2 - g.edges().size());
    for (int u = 0; u < n; ++u) {
        const auto& adj = g.neighbors(u);
        std::size_t p = 0;
        for (int v = u + 1; v < n; ++v) {
            while (p < adj.size() && adj[p] < v) ++p;
            if (p < adj.size() && adj[p] == v) continue;
            edges.emplace_back(u, v);
        }
    }
    return Graph(n, std::move(edges));
}

} // namespace

Graph random_regular(int k, int r, std::uint64_t seed, int max_restarts) {
    if (r < 3) throw parameter_error("random_regular: need r >= 3");
    if (k <= r) throw parameter_error("random_regular: need k > r");
    if ((long long)k * r % 2 != 0)
        throw parameter_error("random_regular: k*r must be even (k=" + std::to_string(k) +
                              ", r=" + std::to_string(r) + ")");
    // dense side: build the sparse complement and invert
    if (r > k / 2) return complement(pairing_model(k, k - 1 - r, seed, max_restarts));
    return pairing_model(k, r, seed, max_restarts);
}

double second_eigenvalue(const Graph& g) {
    int k = g.vertex_count();
    if (k < 2) throw parameter_error("second_eigenvalue: need at least 2 vertices");
    if (k > 4000) throw parameter_error("second_eigenvalue: k > 4000 not supported (dense solver)");
    int r = g.degree(0);
    for (int v = 1; v < k; ++v)
        if (g.degree(v) != r) throw parameter_error("second_eigenvalue: graph is not regular");
    if (!is_connected(g)) throw parameter_error("second_eigenvalue: graph is disconnected");

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    for (auto [u, v] : g.edges()) {
        a(u, v) = 1.0;
        a(v, u) = 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues(); // ascending; ev[k-1] = r (simple, connected)
    return std::max(std::abs(ev(0)), std::abs(ev(k - 2)));
}

RegularGraphReport analyze_regular(Graph g, double eig_tolerance) {
    RegularGraphReport rep;
    rep.k = g.vertex_count();
    rep.r = rep.k > 0 ? g.degree(0) : 0;
    rep.graph = std::move(g);
    rep.lambda = second_eigenvalue(rep.graph);
    rep.ramanujan_threshold = 2.0 * std::sqrt(double(rep.r - 1));
    rep.eig_tolerance = eig_tolerance >= 0 ? eig_tolerance : default_eig_tolerance(rep.r);
    rep.is_ramanujan = rep.lambda <= rep.ramanujan_threshold + rep.eig_tolerance;
    return rep;
}

RegularGraphReport random_near_ramanujan(int k, int r, std::uint64_t seed, int max_resamples,
                                         double eig_tolerance) {
    RegularGraphReport best;
    bool have_best = false;
    for (int attempt = 0; attempt < max_resamples; ++attempt) {
        Graph g = random_regular(k, r, substream(seed, 0x52454700ULL + attempt));
        if (!is_connected(g)) continue;
        RegularGraphReport rep = analyze_regular(std::move(g), eig_tolerance);
        rep.resamples_used = attempt + 1;
        if (rep.is_ramanujan) return rep;
        if (!have_best || rep.lambda < best.lambda) {
            best = std::move(rep);
            have_best = true;
        }
    }
    if (!have_best)
        throw generation_error("random_near_ramanujan: no connected sample", max_resamples);
    best.near_ramanujan = false; // downstream bounds fall back to measured lambda
    best.resamples_used = max_resamples;
    return best;
}

MixingDeviation mixing_deviation(const RegularGraphReport& report, const VertexSet& a,
                                 const VertexSet& b) {
    if (a.empty() || b.empty()) throw parameter_error("mixing_deviation: A, B must be nonempty");
    MixingDeviation out;
    double k = report.k;
    double af = a.size() / k, bf = b.size() / k;
    out.observed = cross_pair_count(report.graph, a, b);
    out.expected = af * bf * report.r * k;
    out.lambda_used = report.is_ramanujan ? report.ramanujan_threshold : report.lambda;
    out.bound = out.lambda_used * std::sqrt(af * bf) * k;
    out.bound_measured = report.lambda * std::sqrt(af * bf) * k;
    double dev = std::abs(double(out.observed) - out.expected);
    out.holds = dev <= out.bound + 1e-9;
    out.holds_measured = dev <= out.bound_measured + 1e-9;
    return out;
}

MixingDeviation mixing_deviation(const Graph& g, const VertexSet& a, const VertexSet& b) {
    return mixing_deviation(analyze_regular(g), a, b);
}

DoubleCover double_cover_with_matching(const RegularGraphReport& report) {
    const Graph& u = report.graph;
    int k = u.vertex_count();
    std::vector<std::pair<int, int>> edges;
    edges.reserve(2 * u.edges().size() + k);
    for (auto [x, y] : u.edges()) {
        edges.emplace_back(x, k + y);
        edges.emplace_back(y, k + x);
    }
    for (int x = 0; x < k; ++x) edges.emplace_back(x, k + x);

    DoubleCover cover;
    cover.graph = Graph(2 * k, std::move(edges));
    std::vector<int> c1(k), c2(k);
    for (int i = 0; i < k; ++i) {
        c1[i] = i;
        c2[i] = k + i;
    }
    cover.class_v1 = VertexSet(std::move(c1));
    cover.class_v2 = VertexSet(std::move(c2));
    cover.source = report;
    return cover;
}

ThirdsReport thirds_edge_check(const RegularGraphReport& report, int trials, std::uint64_t seed) {
    if (trials < 1) throw parameter_error("thirds_edge_check: trials >= 1");
    int k = report.k;
    int s = k / 3;
    if (s < 1) throw parameter_error("thirds_edge_check: k too small for thirds");
    ThirdsReport out;
    out.trials = trials;
    out.set_size = s;
    out.low_r_warning = report.r < 35;
    out.min_edges = -1;
    for (int t = 0; t < trials; ++t) {
        auto rng = make_rng(substream(seed, std::uint64_t(t)));
        auto both = sample_distinct(rng, k, 2 * s);
        std::shuffle(both.begin(), both.end(), rng);
        VertexSet a(std::vector<int>(both.begin(), both.begin() + s));
        VertexSet b(std::vector<int>(both.begin() + s, both.end()));
        long long e = cross_pair_count(report.graph, a, b);
        if (e < 1) ++out.violations;
        if (out.min_edges < 0 || e < out.min_edges) out.min_edges = e;
    }
    return out;
}

ThirdsReport thirds_edge_check(const DoubleCover& cover, int trials, std::uint64_t seed) {
    if (trials < 1) throw parameter_error("thirds_edge_check: trials >= 1");
    int k = cover.class_v1.size();
    int s = k / 3;
    if (s < 1) throw parameter_error("thirds_edge_check: k too small for thirds");
    ThirdsReport out;
    out.trials = trials;
    out.set_size = s;
    out.min_edges = -1;
    for (int t = 0; t < trials; ++t) {
        auto rng = make_rng(substream(seed, 0xD0C0ULL + std::uint64_t(t)));
        VertexSet a(sample_from(rng, cover.class_v1.ids(), s));
        VertexSet b(sample_from(rng, cover.class_v2.ids(), s));
        long long e = cross_pair_count(cover.graph, a, b);
        if (e < 1) ++out.violations;
        if (out.min_edges < 0 || e < out.min_edges) out.min_edges = e;
    }
    return out;
}

ExpansionResult expansion_check(const DoubleCover& cover, const VertexSet& a) {
    bool in1 = true, in2 = true;
    for (int v : a) {
        if (!cover.class_v1.contains(v)) in1 = false;
        if (!cover.class_v2.contains(v)) in2 = false;
    }
    if (!in1 && !in2)
        throw parameter_error("expansion_check: A must lie within a single class of F");
    std::vector<char> seen(cover.graph.vertex_count(), 0);
    int count = 0;
    for (int v : a)
        for (int w : cover.graph.neighbors(v))
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
            }
    ExpansionResult out;
    out.neighborhood_size = count;
    out.holds = count >= a.size();
    return out;
}

nlohmann::json regular_report_to_json(const RegularGraphReport& r, bool include_graph) {
    nlohmann::json j;
    if (include_graph) j["graph"] = graph_to_json(r.graph);
    j["r"] = r.r;
    j["k"] = r.k;
    j["lambda"] = r.lambda;
    j["ramanujan_threshold"] = r.ramanujan_threshold;
    j["is_ramanujan"] = r.is_ramanujan;
    j["eig_tolerance"] = r.eig_tolerance;
    j["resamples_used"] = r.resamples_used;
    j["near_ramanujan"] = r.near_ramanujan;
    return j;
}

RegularGraphReport regular_report_from_json(const nlohmann::json& j) {
    RegularGraphReport r;
    r.graph = graph_from_json(j.at("graph"));
    r.r = j.at("r").get<int>();
    r.k = j.at("k").get<int>();
    r.lambda = j.at("lambda").get<double>();
    r.ramanujan_threshold = j.at("ramanujan_threshold").get<double>();
    r.is_ramanujan = j.at("is_ramanujan").get<bool>();
    r.eig_tolerance = j.at("eig_tolerance").get<double>();
    r.resamples_used = j.value("resamples_used", 0);
    r.near_ramanujan = j.value("near_ramanujan", true);
    return r;
}

} // namespace sbl
