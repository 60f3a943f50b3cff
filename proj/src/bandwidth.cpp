#include "sbl/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "sbl/errors.hpp"
#include "sbl/graph_ops.hpp"
#include "sbl/rng.hpp"

namespace sbl {

bool is_valid_ordering(const Graph& g, const Ordering& pi) {
    int n = g.vertex_count();
    if (int(pi.position.size()) != n) return false;
    std::vector<char> seen(n, 0);
    for (int p : pi.position) {
        if (p < 0 || p >= n || seen[p]) return false;
        seen[p] = 1;
    }
    return true;
}

int ordering_stretch(const Graph& g, const Ordering& pi) {
    if (!is_valid_ordering(g, pi)) throw parameter_error("ordering_stretch: invalid ordering");
    int best = 0;
    for (auto [u, v] : g.edges())
        best = std::max(best, std::abs(pi.position[u] - pi.position[v]));
    return best;
}

namespace {

// static interchangeability classes: u ~ v iff N(u)\{u,v} == N(v)\{u,v}
std::vector<int> twin_classes(const Graph& g) {
    int n = g.vertex_count();
    auto bits = g.adjacency_bitsets();
    std::vector<int> cls(n, -1);
    int next = 0;
    for (int u = 0; u < n; ++u) {
        if (cls[u] != -1) continue;
        cls[u] = next;
        for (int v = u + 1; v < n; ++v) {
            if (cls[v] != -1 || g.degree(u) != g.degree(v)) continue;
            DynBitset a = bits[u], b = bits[v];
            a.set(u); a.set(v);
            b.set(u); b.set(v);
            if (a == b) cls[v] = next;
        }
        ++next;
    }
    return cls;
}

// Decision search: does an ordering with stretch <= b exist? Positions are
// filled left to right; pruning via per-vertex slack (a placed vertex's
// unplaced neighbors must fit within pos+b) and twin symmetry breaking.
struct DecisionSearch {
    const Graph& g;
    int n, b;
    long long* budget;
    bool limit_hit = false;
    std::vector<int> pos;           // -1 = unplaced
    std::vector<int> unplaced_deg;
    std::vector<int> placed;        // in position order
    const std::vector<int>& twins;

    DecisionSearch(const Graph& graph, int bound, long long* node_budget,
                   const std::vector<int>& twin_cls)
        : g(graph), n(graph.vertex_count()), b(bound), budget(node_budget), twins(twin_cls) {
        pos.assign(n, -1);
        unplaced_deg.resize(n);
        for (int v = 0; v < n; ++v) unplaced_deg[v] = g.degree(v);
    }

    bool extend(int i) {
        if (i == n) return true;
        if (--(*budget) < 0) {
            limit_hit = true;
            return false;
        }
        // slack check; when a placed vertex is exactly tight, the next slot
        // must go to one of its neighbors
        int forced = -1;
        for (int u : placed) {
            if (unplaced_deg[u] == 0) continue;
            int slack = pos[u] + b - i + 1; // slots still usable for u's neighbors
            if (slack < unplaced_deg[u]) return false;
            if (slack == unplaced_deg[u]) forced = u;
        }
        std::vector<char> tried_class(std::size_t(n), 0);
        for (int v = 0; v < n; ++v) {
            if (pos[v] != -1) continue;
            if (tried_class[twins[v]]) continue;
            if (forced != -1 && !g.has_edge(forced, v)) continue;
            if (unplaced_deg[v] > b) continue; // its future neighbors sit in (i, i+b]
            bool ok = true;
            for (int w : g.neighbors(v))
                if (pos[w] != -1 && i - pos[w] > b) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            tried_class[twins[v]] = 1;

            pos[v] = i;
            placed.push_back(v);
            for (int w : g.neighbors(v)) --unplaced_deg[w];
            if (extend(i + 1)) return true;
            for (int w : g.neighbors(v)) ++unplaced_deg[w];
            placed.pop_back();
            pos[v] = -1;
            if (limit_hit) return false;
        }
        return false;
    }
};

} // namespace

ExactBandwidthResult exact_bandwidth(const Graph& g, long long node_limit) {
    ExactBandwidthResult out;
    int n = g.vertex_count();
    if (n <= 1 || g.edge_count() == 0) {
        out.exact = 0;
        return out;
    }
    int lb = 0;
    for (int v = 0; v < n; ++v) lb = std::max(lb, (g.degree(v) + 1) / 2);
    auto [o1, s1] = heuristic_ordering(g, OrderingStrategy::bfs_level, 0);
    auto [o2, s2] = heuristic_ordering(g, OrderingStrategy::min_width_greedy, 0);
    int ub = std::min(s1, s2);
    out.lower = lb;
    out.upper = ub;

    auto twins = twin_classes(g);
    long long budget = node_limit;
    for (int b = lb; b < ub; ++b) {
        DecisionSearch search(g, b, &budget, twins);
        bool found = search.extend(0);
        out.nodes = node_limit - budget;
        if (search.limit_hit) {
            out.limit_hit = true;
            out.lower = b; // everything below b was refuted
            return out;
        }
        if (found) {
            out.exact = b;
            out.lower = b;
            out.upper = b;
            return out;
        }
        out.lower = b + 1;
    }
    out.exact = ub;
    out.lower = ub;
    return out;
}

namespace {

std::vector<int> bfs_layers(const Graph& g, int start, std::vector<int>& order_out) {
    std::vector<int> depth(g.vertex_count(), -1);
    std::deque<int> q{start};
    depth[start] = 0;
    order_out.clear();
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        order_out.push_back(u);
        for (int w : g.neighbors(u))
            if (depth[w] == -1) {
                depth[w] = depth[u] + 1;
                q.push_back(w);
            }
    }
    return depth;
}

Ordering bfs_level_ordering(const Graph& g) {
    int n = g.vertex_count();
    Ordering pi;
    pi.position.assign(n, -1);
    std::vector<char> done(n, 0);
    int next_pos = 0;
    for (int s = 0; s < n; ++s) {
        if (done[s]) continue;
        // double sweep for a pseudo-peripheral start
        std::vector<int> order;
        auto d1 = bfs_layers(g, s, order);
        int far = s;
        for (int v : order)
            if (d1[v] > d1[far] || (d1[v] == d1[far] && v < far)) far = v;
        auto depth = bfs_layers(g, far, order);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b2) {
            if (depth[a] != depth[b2]) return depth[a] < depth[b2];
            if (g.degree(a) != g.degree(b2)) return g.degree(a) < g.degree(b2);
            return a < b2;
        });
        for (int v : order) {
            pi.position[v] = next_pos++;
            done[v] = 1;
        }
    }
    return pi;
}

// Greedy: next vertex minimizes max(committed stretch, forced future
// stretch), where a placed vertex u with c unplaced neighbors forces a
// stretch of at least (i + c - pos[u]) eventually.
Ordering min_width_ordering(const Graph& g, int start) {
    int n = g.vertex_count();
    Ordering pi;
    pi.position.assign(n, -1);
    std::vector<int> unplaced_deg(n);
    for (int v = 0; v < n; ++v) unplaced_deg[v] = g.degree(v);
    std::vector<int> placed_active; // placed vertices that still have unplaced neighbors
    std::vector<char> in_frontier(n, 0);
    std::vector<int> frontier;

    auto place = [&](int v, int i) {
        pi.position[v] = i;
        for (int w : g.neighbors(v)) {
            --unplaced_deg[w];
            if (pi.position[w] == -1 && !in_frontier[w]) {
                in_frontier[w] = 1;
                frontier.push_back(w);
            }
        }
        if (unplaced_deg[v] > 0) placed_active.push_back(v);
    };

    place(start, 0);
    int committed = 0;
    for (int i = 1; i < n; ++i) {
        placed_active.erase(std::remove_if(placed_active.begin(), placed_active.end(),
                                           [&](int u) { return unplaced_deg[u] == 0; }),
                            placed_active.end());
        std::vector<int> cands;
        for (int v : frontier)
            if (pi.position[v] == -1) cands.push_back(v);
        if (cands.empty())
            for (int v = 0; v < n; ++v)
                if (pi.position[v] == -1) {
                    cands.push_back(v);
                    break; // fresh component: lowest id
                }
        int best = -1, best_cost = -1, best_tie = -1;
        for (int v : cands) {
            int immediate = committed;
            for (int w : g.neighbors(v))
                if (pi.position[w] != -1) immediate = std::max(immediate, i - pi.position[w]);
            int future = 0;
            for (int u : placed_active) {
                int c = unplaced_deg[u] - (g.has_edge(u, v) ? 1 : 0);
                if (c > 0) future = std::max(future, i + c - pi.position[u]);
            }
            if (unplaced_deg[v] > 0) future = std::max(future, unplaced_deg[v]);
            int cost = std::max(immediate, future);
            int tie = unplaced_deg[v];
            if (best == -1 || cost < best_cost ||
                (cost == best_cost && (tie < best_tie || (tie == best_tie && v < best)))) {
                best = v;
                best_cost = cost;
                best_tie = tie;
            }
        }
        place(best, i);
        for (int w : g.neighbors(best))
            if (pi.position[w] != -1)
                committed = std::max(committed, i - pi.position[w]);
    }
    return pi;
}

} // namespace

std::pair<Ordering, int> heuristic_ordering(const Graph& g, OrderingStrategy strategy,
                                            std::uint64_t seed) {
    int n = g.vertex_count();
    if (n == 0) return {Ordering{}, 0};
    if (strategy == OrderingStrategy::bfs_level) {
        Ordering pi = bfs_level_ordering(g);
        return {pi, ordering_stretch(g, pi)};
    }
    // min_width_greedy: a few deterministic starts plus one seeded one
    int max_deg_v = 0;
    for (int v = 1; v < n; ++v)
        if (g.degree(v) > g.degree(max_deg_v)) max_deg_v = v;
    auto rng = make_rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> starts{0, max_deg_v, pick(rng)};
    Ordering best;
    int best_stretch = -1;
    for (int s : starts) {
        Ordering pi = min_width_ordering(g, s);
        int st = ordering_stretch(g, pi);
        if (best_stretch < 0 || st < best_stretch) {
            best = std::move(pi);
            best_stretch = st;
        }
    }
    return {best, best_stretch};
}

ShortPathWitness short_path_witness(const HrtGraph& h, const VertexSet& x, const VertexSet& y) {
    int n = h.params.n;
    int need = int(std::floor(0.35 * n));
    if (x.size() < need || y.size() < need)
        throw parameter_error("short_path_witness: |X|, |Y| must be >= 0.35 n");
    if (!x.disjoint_with(y)) throw parameter_error("short_path_witness: X, Y must be disjoint");

    auto dist = bfs_distance(h.graph, x, y);
    if (!dist.reachable)
        throw lemma_violation("short_path_witness: X and Y are disconnected in H");
    int bound = 2 * h.params.t + 4;
    if (dist.distance > bound)
        throw lemma_violation("short_path_witness: distance " + std::to_string(dist.distance) +
                              " exceeds 2t+4 = " + std::to_string(bound));
    ShortPathWitness w;
    w.path = dist.path;
    w.x = w.path.front();
    w.y = w.path.back();
    w.length = dist.distance;
    w.x_set_size = x.size();
    w.y_set_size = y.size();
    return w;
}

BandwidthBoundReport bandwidth_lower_bound(const HrtGraph& h, int orderings_to_probe,
                                           std::uint64_t seed) {
    const Graph& g = h.graph;
    int n = h.params.n, t = h.params.t;
    BandwidthBoundReport rep;
    rep.n = n;
    rep.t_used = t;
    // ceil(0.3 n / (2t+4)) as an exact integer: 3n / (10 (2t+4))
    long long denom = 10LL * (2 * t + 4);
    rep.lower_bound = int((3LL * n + denom - 1) / denom);
    rep.lower_provenance = "short_path_certificate";

    std::vector<Ordering> probes;
    auto [h1, s1] = heuristic_ordering(g, OrderingStrategy::bfs_level, seed);
    auto [h2, s2] = heuristic_ordering(g, OrderingStrategy::min_width_greedy, seed);
    rep.upper_bound = std::min(s1, s2);
    rep.upper_witness = s1 <= s2 ? h1 : h2;
    probes.push_back(std::move(h1));
    probes.push_back(std::move(h2));
    for (int p = 0; p < orderings_to_probe; ++p) {
        auto rng = make_rng(substream(seed, 0xB0BAULL + std::uint64_t(p)));
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        probes.push_back(Ordering{std::move(perm)});
    }
    rep.probes = int(probes.size());

    int s = int(std::floor(0.35 * n));
    rep.min_probe_stretch = -1;
    for (const auto& pi : probes) {
        std::vector<int> by_pos(n);
        for (int v = 0; v < n; ++v) by_pos[pi.position[v]] = v;
        VertexSet x(std::vector<int>(by_pos.begin(), by_pos.begin() + s));
        VertexSet y(std::vector<int>(by_pos.end() - s, by_pos.end()));
        ShortPathWitness w = short_path_witness(h, x, y);
        int stretch = 0;
        for (std::size_t i = 0; i + 1 < w.path.size(); ++i)
            stretch = std::max(stretch,
                               std::abs(pi.position[w.path[i]] - pi.position[w.path[i + 1]]));
        if (stretch < rep.lower_bound)
            throw lemma_violation("bandwidth_lower_bound: probe found witness stretch " +
                                  std::to_string(stretch) + " below the certified bound " +
                                  std::to_string(rep.lower_bound));
        if (rep.min_probe_stretch < 0 || stretch < rep.min_probe_stretch)
            rep.min_probe_stretch = stretch;
    }
    if (rep.upper_bound < rep.lower_bound)
        throw lemma_violation("bandwidth_lower_bound: heuristic upper bound below lower bound");
    return rep;
}

nlohmann::json witness_to_json(const ShortPathWitness& w) {
    return nlohmann::json{{"x", w.x},
                          {"y", w.y},
                          {"path", w.path},
                          {"length", w.length},
                          {"x_set_size", w.x_set_size},
                          {"y_set_size", w.y_set_size}};
}

nlohmann::json bandwidth_report_to_json(const BandwidthBoundReport& r) {
    nlohmann::json j{{"n", r.n},
                     {"lower_bound", r.lower_bound},
                     {"lower_provenance", r.lower_provenance},
                     {"upper_bound", r.upper_bound},
                     {"upper_witness_positions", r.upper_witness.position},
                     {"t_used", r.t_used},
                     {"probes", r.probes},
                     {"min_probe_stretch", r.min_probe_stretch}};
    if (r.exact) j["exact"] = *r.exact;
    return j;
}

} // namespace sbl
