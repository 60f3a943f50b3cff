#include "sbl/embed.hpp"

#include <algorithm>
#include <deque>

#include "sbl/errors.hpp"
#include "sbl/rng.hpp"

namespace sbl {

VerifyResult verify_embedding(const Graph& guest, const Graph& host,
                              const std::vector<int>& image) {
    VerifyResult out;
    if (int(image.size()) != guest.vertex_count())
        throw parameter_error("verify_embedding: map must be total on V(H)");
    std::vector<int> seen(host.vertex_count(), -1);
    for (int v = 0; v < guest.vertex_count(); ++v) {
        int w = image[v];
        if (w < 0 || w >= host.vertex_count()) {
            out.violation = "image out of range";
            out.a = v;
            return out;
        }
        if (seen[w] != -1) {
            out.violation = "not injective";
            out.a = seen[w];
            out.b = v;
            return out;
        }
        seen[w] = v;
    }
    for (auto [u, v] : guest.edges())
        if (!host.has_edge(image[u], image[v])) {
            out.violation = "guest edge not preserved";
            out.a = u;
            out.b = v;
            return out;
        }
    out.ok = true;
    return out;
}

namespace {

// u, v are interchangeable host vertices iff N(u)\{u,v} == N(v)\{u,v};
// trying one representative per class is sound for both positive and
// negative answers (swap the two images in any embedding).
std::vector<int> host_twin_classes(const Graph& g) {
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

// guest order: components largest first, BFS within a component from its
// max-degree vertex — every non-root has a placed neighbor.
std::vector<int> guest_order(const Graph& g) {
    int n = g.vertex_count();
    std::vector<char> done(n, 0);
    std::vector<std::vector<int>> comps;
    for (int s = 0; s < n; ++s) {
        if (done[s]) continue;
        std::vector<int> comp;
        std::deque<int> q{s};
        done[s] = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            comp.push_back(u);
            for (int w : g.neighbors(u))
                if (!done[w]) {
                    done[w] = 1;
                    q.push_back(w);
                }
        }
        comps.push_back(std::move(comp));
    }
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
    });
    std::vector<int> order;
    for (auto& comp : comps) {
        int root = comp.front();
        for (int v : comp)
            if (g.degree(v) > g.degree(root) || (g.degree(v) == g.degree(root) && v < root))
                root = v;
        std::vector<char> seen(n, 0);
        std::deque<int> q{root};
        seen[root] = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            order.push_back(u);
            for (int w : g.neighbors(u))
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push_back(w);
                }
        }
    }
    return order;
}

struct ExactSearch {
    const Graph& guest;
    const Graph& host;
    std::vector<DynBitset> host_bits;
    std::vector<int> twins;
    int class_count = 0;
    std::vector<int> order;
    std::vector<int> image;      // guest -> host
    DynBitset used;
    long long nodes = 0, node_limit;
    bool limit_hit = false;

    ExactSearch(const Graph& gst, const Graph& hst, long long limit)
        : guest(gst), host(hst), node_limit(limit) {
        host_bits = host.adjacency_bitsets();
        twins = host_twin_classes(host);
        for (int c : twins) class_count = std::max(class_count, c + 1);
        order = guest_order(guest);
        image.assign(guest.vertex_count(), -1);
        used = DynBitset(host.vertex_count());
    }

    bool place(std::size_t idx) {
        if (idx == order.size()) return true;
        if (++nodes > node_limit) {
            limit_hit = true;
            return false;
        }
        int v = order[idx];
        // candidates: common neighborhood of already-placed neighbors
        DynBitset cand(host.vertex_count());
        bool have = false;
        for (int w : guest.neighbors(v)) {
            if (image[w] < 0) continue;
            if (!have) {
                cand = host_bits[image[w]];
                have = true;
            } else {
                cand.and_with(host_bits[image[w]]);
            }
        }
        if (!have) {
            for (int u = 0; u < host.vertex_count(); ++u) cand.set(u);
        }
        cand.and_not_with(used);

        std::vector<char> class_tried(std::size_t(class_count), 0);
        for (int u = cand.first(); u >= 0; u = cand.next(u)) {
            if (class_tried[twins[u]]) continue;
            class_tried[twins[u]] = 1;
            if (host.degree(u) < guest.degree(v)) continue;
            image[v] = u;
            used.set(u);
            if (place(idx + 1)) return true;
            used.reset(u);
            image[v] = -1;
            if (limit_hit) return false;
        }
        return false;
    }
};

} // namespace

EmbedSearchResult exact_embed(const Graph& guest, const Graph& host, long long node_limit) {
    EmbedSearchResult out;
    if (guest.vertex_count() > host.vertex_count()) {
        out.status = EmbedStatus::does_not_embed;
        return out;
    }
    if (guest.vertex_count() == 0) {
        out.status = EmbedStatus::embeds;
        out.map.verified = true;
        return out;
    }
    ExactSearch search(guest, host, node_limit);
    bool found = search.place(0);
    out.nodes = search.nodes;
    if (found) {
        out.status = EmbedStatus::embeds;
        out.map.image = search.image;
        auto check = verify_embedding(guest, host, out.map.image);
        if (!check.ok) throw lemma_violation("exact_embed produced an invalid map: " + check.violation);
        out.map.verified = true;
    } else if (search.limit_hit) {
        out.status = EmbedStatus::inconclusive;
    } else {
        out.status = EmbedStatus::does_not_embed;
    }
    return out;
}

DenseEmbedReport dense_embed_separator(const Graph& guest, const Graph& host, double rho,
                                       std::uint64_t seed, int retries) {
    if (!(rho > 0 && rho < 1)) throw parameter_error("dense_embed_separator: need 0 < rho < 1");
    int n = guest.vertex_count(), nh = host.vertex_count();
    if (n > nh) throw parameter_error("dense_embed_separator: guest larger than host");

    DenseEmbedReport rep;
    double pairs = double(nh) * (nh - 1) / 2.0;
    rep.host_density = pairs > 0 ? host.edge_count() / pairs : 0.0;
    if (rep.host_density + 1e-12 < rho)
        throw parameter_error("dense_embed_separator: host density below rho");
    int delta = guest.max_degree();
    rep.premise_required_n = 8.0 * delta * std::pow(rho, -double(delta)) * n;
    rep.premise_met = nh >= rep.premise_required_n;

    auto host_bits = host.adjacency_bitsets();
    auto order = guest_order(guest);

    for (int attempt = 0; attempt < std::max(1, retries); ++attempt) {
        auto rng = make_rng(substream(seed, 0xDE4BULL + std::uint64_t(attempt)));
        std::vector<int> image(n, -1);
        DynBitset used(nh);
        DynBitset unused_mask(nh);
        for (int u = 0; u < nh; ++u) unused_mask.set(u);
        bool dead = false;

        for (int v : order) {
            DynBitset cand = unused_mask;
            for (int w : guest.neighbors(v))
                if (image[w] >= 0) cand.and_with(host_bits[image[w]]);
            // keep candidates whose surviving degree stays >= rho/2
            int remaining = unused_mask.count() - 1;
            std::vector<int> good;
            for (int u = cand.first(); u >= 0; u = cand.next(u)) {
                int surv = host_bits[u].and_count(unused_mask) - (host_bits[u].test(u) ? 1 : 0);
                if (remaining <= 0 || surv >= 0.5 * rho * remaining) good.push_back(u);
            }
            if (rep.min_candidates_seen < 0 || int(good.size()) < rep.min_candidates_seen)
                rep.min_candidates_seen = int(good.size());
            if (good.empty()) {
                dead = true;
                rep.dead_end_vertex = v;
                break;
            }
            std::uniform_int_distribution<std::size_t> pick(0, good.size() - 1);
            int u = good[pick(rng)];
            image[v] = u;
            used.set(u);
            unused_mask.reset(u);
        }
        rep.retries_used = attempt + 1;
        if (!dead) {
            auto check = verify_embedding(guest, host, image);
            if (!check.ok)
                throw lemma_violation("dense_embed_separator produced an invalid map: " +
                                      check.violation);
            rep.success = true;
            rep.map.image = std::move(image);
            rep.map.verified = true;
            return rep;
        }
    }
    return rep; // success = false; caller decides how to report
}

nlohmann::json dense_embed_report_to_json(const DenseEmbedReport& r, bool include_map) {
    nlohmann::json j{{"success", r.success},
                     {"host_density", r.host_density},
                     {"premise_met", r.premise_met},
                     {"premise_required_n", r.premise_required_n},
                     {"retries_used", r.retries_used},
                     {"min_candidates_seen", r.min_candidates_seen}};
    if (r.dead_end_vertex >= 0) j["dead_end_vertex"] = r.dead_end_vertex;
    if (r.success && include_map) j["map"] = r.map.image;
    return j;
}

} // namespace sbl
