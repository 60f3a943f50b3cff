#include "sbl/matching.hpp"

#include <algorithm>

namespace sbl {

namespace {

// Standard O(V^3) blossom algorithm. `base[v]` tracks the base of the
// blossom containing v in the current search forest; blossoms are handled
// implicitly by marking path vertices up to their common base.
struct BlossomSearch {
    const Graph& g;
    int n;
    std::vector<int>& mate;
    std::vector<int> parent, base;
    std::vector<char> used, blossom;
    std::vector<int> queue;

    BlossomSearch(const Graph& graph, std::vector<int>& m)
        : g(graph), n(graph.vertex_count()), mate(m) {}

    int lowest_common_base(int a, int b) {
        std::vector<char> seen(n, 0);
        for (int v = a;; v = parent[mate[v]]) {
            v = base[v];
            seen[v] = 1;
            if (mate[v] == -1) break;
        }
        for (int v = b;; v = parent[mate[v]]) {
            v = base[v];
            if (seen[v]) return v;
        }
    }

    void mark_path(int v, int b, int child) {
        while (base[v] != b) {
            blossom[base[v]] = 1;
            blossom[base[mate[v]]] = 1;
            parent[v] = child;
            child = mate[v];
            v = parent[mate[v]];
        }
    }

    // BFS for an augmenting path from `root`; returns its far endpoint or -1.
    int find_path(int root) {
        used.assign(n, 0);
        parent.assign(n, -1);
        base.resize(n);
        for (int i = 0; i < n; ++i) base[i] = i;
        used[root] = 1;
        queue.assign(1, root);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int v = queue[head];
            for (int to : g.neighbors(v)) {
                if (base[v] == base[to] || mate[v] == to) continue;
                if (to == root || (mate[to] != -1 && parent[mate[to]] != -1)) {
                    // odd cycle: contract the blossom
                    int b = lowest_common_base(v, to);
                    blossom.assign(n, 0);
                    mark_path(v, b, to);
                    mark_path(to, b, v);
                    for (int i = 0; i < n; ++i)
                        if (blossom[base[i]]) {
                            base[i] = b;
                            if (!used[i]) {
                                used[i] = 1;
                                queue.push_back(i);
                            }
                        }
                } else if (parent[to] == -1) {
                    parent[to] = v;
                    if (mate[to] == -1) return to;
                    used[mate[to]] = 1;
                    queue.push_back(mate[to]);
                }
            }
        }
        return -1;
    }

    void augment(int v) {
        while (v != -1) {
            int pv = parent[v], ppv = mate[pv];
            mate[v] = pv;
            mate[pv] = v;
            v = ppv;
        }
    }
};

} // namespace

std::vector<int> max_matching(const Graph& g) {
    int n = g.vertex_count();
    std::vector<int> mate(n, -1);

    // greedy seed matching cuts down the number of augmenting searches
    for (int v = 0; v < n; ++v)
        if (mate[v] == -1)
            for (int to : g.neighbors(v))
                if (mate[to] == -1) {
                    mate[v] = to;
                    mate[to] = v;
                    break;
                }

    BlossomSearch search(g, mate);
    for (int v = 0; v < n; ++v)
        if (mate[v] == -1) {
            int end = search.find_path(v);
            if (end != -1) search.augment(end);
        }
    return mate;
}

std::vector<std::pair<int, int>> max_matching_pairs(const Graph& g) {
    auto mate = max_matching(g);
    std::vector<std::pair<int, int>> pairs;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (mate[v] > v) pairs.emplace_back(v, mate[v]);
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

} // namespace sbl
