#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "sbl/graph.hpp"

// Small graph families and brute-force oracles shared by the test suites.
// The oracles are intentionally independent of the library's search code.

inline sbl::Graph path_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return sbl::Graph(n, e);
}

inline sbl::Graph cycle_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return sbl::Graph(n, e);
}

inline sbl::Graph star_graph(int n) { // K_{1,n-1}, center 0
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i < n; ++i) e.emplace_back(0, i);
    return sbl::Graph(n, e);
}

inline sbl::Graph complete_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return sbl::Graph(n, e);
}

inline sbl::Graph complete_bipartite(int a, int b) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) e.emplace_back(i, a + j);
    return sbl::Graph(a + b, e);
}

inline sbl::Graph random_graph(int n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng)) e.emplace_back(i, j);
    return sbl::Graph(n, e);
}

// all-permutations bandwidth, reversal symmetry halved
inline int brute_force_bandwidth(const sbl::Graph& g) {
    int n = g.vertex_count();
    if (n <= 1 || g.edge_count() == 0) return 0;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    int best = n - 1;
    do {
        if (perm[0] > perm[n - 1]) continue;
        std::vector<int> pos(n);
        for (int i = 0; i < n; ++i) pos[perm[i]] = i;
        int stretch = 0;
        for (auto [u, v] : g.edges()) {
            stretch = std::max(stretch, std::abs(pos[u] - pos[v]));
            if (stretch >= best) break;
        }
        best = std::min(best, stretch);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// all-injections subgraph containment oracle (|H| small)
inline bool injection_embeds(const sbl::Graph& h, const sbl::Graph& g) {
    int nh = h.vertex_count(), ng = g.vertex_count();
    if (nh > ng) return false;
    std::vector<int> image(nh, -1);
    std::vector<char> used(ng, 0);
    std::function<bool(int)> rec = [&](int v) -> bool {
        if (v == nh) {
            for (auto [a, b] : h.edges())
                if (!g.has_edge(image[a], image[b])) return false;
            return true;
        }
        for (int u = 0; u < ng; ++u) {
            if (used[u]) continue;
            used[u] = 1;
            image[v] = u;
            if (rec(v + 1)) return true;
            used[u] = 0;
        }
        return false;
    };
    return rec(0);
}

// bitmask-DP maximum matching size (n <= ~16)
inline int dp_matching_size(const sbl::Graph& g) {
    int n = g.vertex_count();
    std::vector<int> adj(n, 0);
    for (auto [u, v] : g.edges()) {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    std::vector<int> memo(1 << n, -1);
    std::function<int(int)> rec = [&](int mask) -> int {
        if (mask == 0) return 0;
        if (memo[mask] >= 0) return memo[mask];
        int i = __builtin_ctz(mask);
        int best = rec(mask & ~(1 << i));
        int cands = adj[i] & mask & ~(1 << i);
        while (cands) {
            int j = __builtin_ctz(cands);
            cands &= cands - 1;
            best = std::max(best, 1 + rec(mask & ~(1 << i) & ~(1 << j)));
        }
        return memo[mask] = best;
    };
    return rec((1 << n) - 1);
}
