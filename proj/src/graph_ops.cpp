#include "sbl/graph_ops.hpp"

#include <algorithm>
#include <deque>

#include "sbl/errors.hpp"

namespace sbl {

namespace {

void check_range(const Graph& g, const VertexSet& s, const char* name) {
    if (!s.empty() && s.max_id() >= g.vertex_count())
        throw parameter_error(std::string(name) + " contains an id outside the graph");
}

} // namespace

double density(const Graph& g, const VertexSet& x, const VertexSet& y) {
    if (x.empty() || y.empty()) throw parameter_error("density: X and Y must be nonempty");
    if (!x.disjoint_with(y)) throw parameter_error("density: X and Y must be disjoint");
    check_range(g, x, "X");
    check_range(g, y, "Y");
    long long e = cross_pair_count(g, x, y);
    return double(e) / (double(x.size()) * double(y.size()));
}

long long cross_pair_count(const Graph& g, const VertexSet& a, const VertexSet& b) {
    check_range(g, a, "A");
    check_range(g, b, "B");
    // iterate the smaller side's adjacency against a membership mask
    const VertexSet& small = a.size() <= b.size() ? a : b;
    const VertexSet& large = a.size() <= b.size() ? b : a;
    std::vector<char> in_large(g.vertex_count(), 0);
    for (int v : large) in_large[v] = 1;
    long long count = 0;
    for (int u : small)
        for (int w : g.neighbors(u)) count += in_large[w];
    return count;
}

SetDistance bfs_distance(const Graph& g, const VertexSet& x, const VertexSet& y) {
    if (x.empty() || y.empty()) throw parameter_error("bfs_distance: X and Y must be nonempty");
    check_range(g, x, "X");
    check_range(g, y, "Y");

    SetDistance out;
    std::vector<char> in_y(g.vertex_count(), 0);
    for (int v : y) in_y[v] = 1;
    for (int v : x)
        if (in_y[v]) {
            out.reachable = true;
            out.distance = 0;
            out.path = {v};
            return out;
        }

    std::vector<int> prev(g.vertex_count(), -2); // -2 unvisited, -1 source
    std::deque<int> queue;
    for (int v : x) {
        prev[v] = -1;
        queue.push_back(v);
    }
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int w : g.neighbors(u)) {
            if (prev[w] != -2) continue;
            prev[w] = u;
            if (in_y[w]) {
                std::vector<int> path{w};
                for (int c = u; c != -1; c = prev[c]) path.push_back(c);
                std::reverse(path.begin(), path.end());
                out.reachable = true;
                out.distance = int(path.size()) - 1;
                out.path = std::move(path);
                return out;
            }
            queue.push_back(w);
        }
    }
    return out; // unreachable
}

std::vector<VertexSet> components_after_removal(const Graph& g, const VertexSet& s) {
    check_range(g, s, "S");
    std::vector<char> removed(g.vertex_count(), 0);
    for (int v : s) removed[v] = 1;

    std::vector<VertexSet> out;
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<int> stack;
    for (int start = 0; start < g.vertex_count(); ++start) {
        if (removed[start] || seen[start]) continue;
        std::vector<int> comp;
        stack.assign(1, start);
        seen[start] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (int w : g.neighbors(u))
                if (!removed[w] && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        out.emplace_back(VertexSet(std::move(comp)));
    }
    return out;
}

std::optional<std::pair<VertexSet, VertexSet>> bipartition(const Graph& g) {
    std::vector<int> color(g.vertex_count(), -1);
    std::deque<int> queue;
    for (int start = 0; start < g.vertex_count(); ++start) {
        if (color[start] != -1) continue;
        color[start] = 0;
        queue.assign(1, start);
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int w : g.neighbors(u)) {
                if (color[w] == -1) {
                    color[w] = 1 - color[u];
                    queue.push_back(w);
                } else if (color[w] == color[u]) {
                    return std::nullopt;
                }
            }
        }
    }
    std::vector<int> c0, c1;
    for (int v = 0; v < g.vertex_count(); ++v) (color[v] == 0 ? c0 : c1).push_back(v);
    return std::make_pair(VertexSet(std::move(c0)), VertexSet(std::move(c1)));
}

bool is_connected(const Graph& g) {
    if (g.vertex_count() <= 1) return true;
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int w : g.neighbors(u))
            if (!seen[w]) {
                seen[w] = 1;
                ++visited;
                stack.push_back(w);
            }
    }
    return visited == g.vertex_count();
}

} // namespace sbl
