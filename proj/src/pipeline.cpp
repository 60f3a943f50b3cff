#include "sbl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "sbl/errors.hpp"
#include "sbl/graph_ops.hpp"
#include "sbl/matching.hpp"
#include "sbl/rng.hpp"

namespace sbl {

namespace {

std::vector<int> host_cluster_index(const RegularPartition& p, int host_n) {
    std::vector<int> idx(host_n, -1);
    for (int c = 0; c < p.cluster_count(); ++c)
        for (int v : p.clusters[c]) idx[v] = c;
    return idx;
}

DynBitset set_mask(const VertexSet& s, int n) {
    DynBitset m(n);
    for (int v : s) m.set(v);
    return m;
}

} // namespace

void recompute_pair_densities(const Graph& host, RegularPartition& p) {
    int l = p.cluster_count();
    p.pair_density.assign(l, std::vector<double>(l, 0.0));
    for (int i = 0; i < l; ++i)
        for (int j = i + 1; j < l; ++j) {
            if (p.clusters[i].empty() || p.clusters[j].empty()) continue;
            double d = double(cross_pair_count(host, p.clusters[i], p.clusters[j])) /
                       (double(p.clusters[i].size()) * p.clusters[j].size());
            p.pair_density[i][j] = p.pair_density[j][i] = d;
        }
}

nlohmann::json partition_to_json(const RegularPartition& p) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : p.clusters) clusters.push_back(c.ids());
    return nlohmann::json{{"clusters", clusters}, {"exceptional", p.exceptional.ids()},
                          {"m", p.m},             {"eps", p.eps},
                          {"d", p.d},             {"pair_density", p.pair_density},
                          {"planted", p.planted}};
}

RegularPartition partition_from_json(const nlohmann::json& j) {
    RegularPartition p;
    for (const auto& c : j.at("clusters")) p.clusters.emplace_back(VertexSet(c.get<std::vector<int>>()));
    p.exceptional = VertexSet(j.at("exceptional").get<std::vector<int>>());
    p.m = j.at("m").get<int>();
    p.eps = j.at("eps").get<double>();
    p.d = j.at("d").get<double>();
    if (j.contains("pair_density"))
        p.pair_density = j.at("pair_density").get<std::vector<std::vector<double>>>();
    p.planted = j.value("planted", false);
    return p;
}

PlantedHost planted_regular_host(int n, int l, double d, double delta_super, std::uint64_t seed,
                                 double planted_density,
                                 const std::vector<std::pair<int, int>>* designed_pairs) {
    if (l < 2 || n < 2 * l) throw parameter_error("planted_regular_host: need l >= 2 and n >= 2l");
    if (!(d > 0 && d < 1) || !(delta_super > 0 && delta_super < 0.95))
        throw parameter_error("planted_regular_host: need 0 < d < 1, 0 < delta_super < 0.95");
    double p_planted = planted_density > 0 ? planted_density : std::min(0.95, d + 0.3);
    if (p_planted < delta_super)
        throw parameter_error("planted_regular_host: planted density below delta_super");
    int m = n / l;

    std::vector<std::pair<int, int>> pairs;
    if (designed_pairs) {
        pairs = *designed_pairs;
    } else {
        for (int i = 0; i < l; ++i)
            for (int j = i + 1; j < l; ++j) pairs.emplace_back(i, j);
    }

    auto begin_of = [&](int c) { return c * m; };
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<char>> has; // per pair, m x m incidence for the repair pass
    int repaired = 0;

    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        auto [ci, cj] = pairs[pi];
        if (ci < 0 || cj < 0 || ci >= l || cj >= l || ci == cj)
            throw parameter_error("planted_regular_host: bad designed pair");
        auto rng = make_rng(substream(seed, 0x9A17ULL + pi));
        std::bernoulli_distribution coin(p_planted);
        std::vector<std::vector<char>> inc(m, std::vector<char>(m, 0));
        std::vector<int> deg_i(m, 0), deg_j(m, 0);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (coin(rng)) {
                    inc[a][b] = 1;
                    ++deg_i[a];
                    ++deg_j[b];
                }
        // repair min cross-degree up to delta_super * m
        int need = int(std::ceil(delta_super * m - 1e-9));
        std::uniform_int_distribution<int> pick(0, m - 1);
        auto repair_row = [&](int a) {
            ++repaired;
            while (deg_i[a] < need) {
                int b = pick(rng);
                if (!inc[a][b]) {
                    inc[a][b] = 1;
                    ++deg_i[a];
                    ++deg_j[b];
                }
            }
        };
        auto repair_col = [&](int b) {
            ++repaired;
            while (deg_j[b] < need) {
                int a = pick(rng);
                if (!inc[a][b]) {
                    inc[a][b] = 1;
                    ++deg_i[a];
                    ++deg_j[b];
                }
            }
        };
        for (int a = 0; a < m; ++a)
            if (deg_i[a] < need) repair_row(a);
        for (int b = 0; b < m; ++b)
            if (deg_j[b] < need) repair_col(b);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (inc[a][b]) edges.emplace_back(begin_of(ci) + a, begin_of(cj) + b);
    }

    // intra-cluster edges at the same density: the host is a genuine dense
    // graph; the regularity structure (independent clusters) belongs to the
    // cross pairs only
    for (int c = 0; c < l; ++c) {
        auto rng = make_rng(substream(seed, 0x1A7AULL + c));
        std::bernoulli_distribution coin(p_planted);
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b)
                if (coin(rng)) edges.emplace_back(begin_of(c) + a, begin_of(c) + b);
    }

    // leftover vertices form W_0; they get planted-density edges everywhere
    int rem_begin = l * m;
    for (int v = rem_begin; v < n; ++v) {
        auto rng = make_rng(substream(seed, 0xE0ULL + v));
        std::bernoulli_distribution coin(p_planted);
        for (int w = 0; w < v; ++w)
            if (coin(rng)) edges.emplace_back(v, w);
    }

    PlantedHost out;
    out.graph = Graph(n, std::move(edges));
    out.repaired_vertices = repaired;
    out.min_degree_fraction = n > 0 ? double(out.graph.min_degree()) / n : 0.0;

    RegularPartition part;
    part.m = m;
    part.d = d;
    part.planted = true;
    for (int c = 0; c < l; ++c) {
        std::vector<int> ids(m);
        for (int i = 0; i < m; ++i) ids[i] = begin_of(c) + i;
        part.clusters.emplace_back(VertexSet(std::move(ids)));
    }
    std::vector<int> w0;
    for (int v = rem_begin; v < n; ++v) w0.push_back(v);
    part.exceptional = VertexSet(std::move(w0));
    recompute_pair_densities(out.graph, part);
    out.partition = std::move(part);
    return out;
}

namespace {

RegularityCheck sample_regularity_impl(const std::vector<DynBitset>& bits, int host_n,
                                       const VertexSet& a, const VertexSet& b, double eps,
                                       int samples, std::uint64_t seed) {
    if (!a.disjoint_with(b)) throw parameter_error("sample_regularity: A, B must be disjoint");
    if (a.empty() || b.empty()) throw parameter_error("sample_regularity: A, B must be nonempty");

    RegularityCheck out;
    DynBitset mask_a = set_mask(a, host_n), mask_b = set_mask(b, host_n);
    auto pair_edges = [&](const VertexSet& x, const DynBitset& ymask) {
        long long e = 0;
        for (int u : x) e += bits[u].and_count(ymask);
        return e;
    };
    double den = double(pair_edges(a, mask_b)) / (double(a.size()) * b.size());
    out.pair_density = den;

    auto try_witness = [&](const VertexSet& x, const VertexSet& y) {
        if (x.empty() || y.empty()) return false;
        DynBitset ym = set_mask(y, host_n);
        double dxy = double(pair_edges(x, ym)) / (double(x.size()) * y.size());
        if (std::abs(dxy - den) >= eps - 1e-12) {
            out.falsified = true;
            out.witness_x = x;
            out.witness_y = y;
            out.witness_density = dxy;
            return true;
        }
        return false;
    };

    // degree-split candidates: an oversized atypical set is itself a witness
    std::vector<int> low_a, high_a, low_b, high_b;
    for (int u : a) {
        int deg = bits[u].and_count(mask_b);
        if (deg <= (den - eps) * b.size()) low_a.push_back(u);
        if (deg >= (den + eps) * b.size()) high_a.push_back(u);
    }
    for (int u : b) {
        int deg = bits[u].and_count(mask_a);
        if (deg <= (den - eps) * a.size()) low_b.push_back(u);
        if (deg >= (den + eps) * a.size()) high_b.push_back(u);
    }
    out.atypical_low = int(low_a.size());
    out.atypical_high = int(high_a.size());
    out.atypical_ok = low_a.size() <= eps * a.size() + 1e-9;

    if (double(low_a.size()) > eps * a.size() && try_witness(VertexSet(low_a), b)) return out;
    if (double(high_a.size()) > eps * a.size() && try_witness(VertexSet(high_a), b)) return out;
    if (double(low_b.size()) > eps * b.size() && try_witness(a, VertexSet(low_b))) return out;
    if (double(high_b.size()) > eps * b.size() && try_witness(a, VertexSet(high_b))) return out;

    int smin_a = int(std::ceil(eps * a.size())) + 1;
    int smin_b = int(std::ceil(eps * b.size())) + 1;
    if (smin_a > a.size() || smin_b > b.size()) return out; // sets too small to subsample
    for (int s = 0; s < samples; ++s) {
        auto rng = make_rng(substream(seed, 0x5A3EULL + std::uint64_t(s)));
        std::uniform_int_distribution<int> size_a(smin_a, a.size());
        std::uniform_int_distribution<int> size_b(smin_b, b.size());
        VertexSet x(sample_from(rng, a.ids(), size_a(rng)));
        VertexSet y(sample_from(rng, b.ids(), size_b(rng)));
        ++out.samples_run;
        if (try_witness(x, y)) return out;
    }
    return out;
}

} // namespace

RegularityCheck sample_regularity(const Graph& g, const VertexSet& a, const VertexSet& b,
                                  double eps, int samples, std::uint64_t seed) {
    auto bits = g.adjacency_bitsets();
    return sample_regularity_impl(bits, g.vertex_count(), a, b, eps, samples, seed);
}

ReducedGraph reduced_graph_and_matching(const Graph& host, RegularPartition& p, double eps_check,
                                        int samples, std::uint64_t seed,
                                        double host_min_degree_fraction) {
    int l = p.cluster_count();
    if (l < 2) throw parameter_error("reduced_graph_and_matching: need at least 2 clusters");
    recompute_pair_densities(host, p);
    auto bits = host.adjacency_bitsets();

    ReducedGraph out;
    std::vector<std::pair<int, int>> redges;
    for (int i = 0; i < l; ++i)
        for (int j = i + 1; j < l; ++j) {
            if (p.pair_density[i][j] + 1e-12 < p.d) continue;
            auto check = sample_regularity_impl(bits, host.vertex_count(), p.clusters[i],
                                                p.clusters[j], eps_check, samples,
                                                substream(seed, 0x6E0DULL + std::uint64_t(i) * l + j));
            if (check.falsified) {
                ++out.falsified_pairs;
                continue;
            }
            redges.emplace_back(i, j);
        }
    Graph reduced(l, redges);
    out.min_reduced_degree = reduced.min_degree();
    double theta = 2.0 * p.eps + p.d;
    out.reduced_degree_bound = (host_min_degree_fraction - theta) * l;
    out.reduced_degree_ok = out.min_reduced_degree + 1e-9 >= out.reduced_degree_bound;

    auto mate = max_matching(reduced);
    std::vector<int> uncovered;
    for (int i = 0; i < l; ++i)
        if (mate[i] == -1) uncovered.push_back(i);
    if (uncovered.size() >= 2)
        throw parameter_error("host too sparse: matching leaves " +
                              std::to_string(uncovered.size()) + " clusters uncovered");

    if (uncovered.size() == 1) {
        int dropped = uncovered[0];
        out.dropped_cluster = dropped;
        p.exceptional = p.exceptional.set_union(p.clusters[dropped]);
        p.clusters.erase(p.clusters.begin() + dropped);
        // remap indices above the dropped cluster
        std::vector<std::pair<int, int>> remapped;
        for (auto [u, v] : redges) {
            if (u == dropped || v == dropped) continue;
            remapped.emplace_back(u - (u > dropped), v - (v > dropped));
        }
        redges = std::move(remapped);
        std::vector<int> mate2(l - 1, -1);
        for (int i = 0; i < l; ++i) {
            if (i == dropped || mate[i] == -1) continue;
            mate2[i - (i > dropped)] = mate[i] - (mate[i] > dropped);
        }
        mate = std::move(mate2);
        --l;
        reduced = Graph(l, redges);
        recompute_pair_densities(host, p);
    }

    out.graph = std::move(reduced);
    out.partner = mate;
    for (int i = 0; i < l; ++i)
        if (mate[i] > i) out.matching.emplace_back(i, mate[i]);
    return out;
}

SuperRegularReport make_super_regular(const Graph& host, RegularPartition& p,
                                      const ReducedGraph& r, double delta) {
    int l = p.cluster_count();
    SuperRegularReport rep;
    rep.m_before = p.m;
    for (const auto& c : p.clusters)
        if (c.size() != p.m)
            throw parameter_error("make_super_regular: clusters must share the common size m");

    std::vector<std::vector<int>> members(l);
    for (int i = 0; i < l; ++i) members[i] = p.clusters[i].ids();
    std::vector<std::vector<int>> removed(l);
    auto bits = host.adjacency_bitsets();
    double cap = p.eps * p.m + 1e-9;

    auto cross_deg = [&](int v, const std::vector<int>& other) {
        // other stays sorted; count via bitset of the smaller representation
        int c = 0;
        for (int w : other) c += bits[v].test(w);
        return c;
    };

    bool changed = true;
    while (changed) {
        ++rep.rounds;
        if (rep.rounds > 60)
            throw parameter_error("make_super_regular: removal loop failed to converge");
        changed = false;
        for (auto [i, j] : r.matching) {
            for (int side = 0; side < 2; ++side) {
                int from = side == 0 ? i : j, to = side == 0 ? j : i;
                std::vector<int> keep, drop;
                for (int v : members[from]) {
                    if (cross_deg(v, members[to]) <= delta * members[to].size())
                        drop.push_back(v);
                    else
                        keep.push_back(v);
                }
                if (!drop.empty()) {
                    changed = true;
                    members[from] = std::move(keep);
                    for (int v : drop) removed[from].push_back(v);
                    if (double(removed[from].size()) > cap)
                        throw parameter_error("irregularity: cluster " + std::to_string(from) +
                                              " needs more than eps*m removals for super-regularity");
                }
            }
        }
        // pad every cluster to the same removal count
        int max_removed = 0;
        for (int i = 0; i < l; ++i) max_removed = std::max(max_removed, int(removed[i].size()));
        for (int i = 0; i < l; ++i) {
            while (int(removed[i].size()) < max_removed) {
                changed = true;
                int partner = r.partner[i];
                int worst = -1, worst_deg = -1;
                for (int v : members[i]) {
                    int dv = cross_deg(v, members[partner]);
                    if (worst == -1 || dv < worst_deg || (dv == worst_deg && v < worst)) {
                        worst = v;
                        worst_deg = dv;
                    }
                }
                members[i].erase(std::find(members[i].begin(), members[i].end(), worst));
                removed[i].push_back(worst);
            }
        }
    }

    rep.moved_per_cluster.resize(l);
    std::vector<int> all_removed;
    for (int i = 0; i < l; ++i) {
        rep.moved_per_cluster[i] = int(removed[i].size());
        rep.max_moved = std::max(rep.max_moved, rep.moved_per_cluster[i]);
        all_removed.insert(all_removed.end(), removed[i].begin(), removed[i].end());
        p.clusters[i] = VertexSet(members[i]);
    }
    p.exceptional = p.exceptional.set_union(VertexSet(all_removed));
    p.m -= rep.max_moved;
    rep.m_after = p.m;

    rep.pairs_ok = true;
    for (auto [i, j] : r.matching) {
        for (int v : p.clusters[i])
            if (cross_deg(v, p.clusters[j].ids()) <= delta * p.clusters[j].size()) rep.pairs_ok = false;
        for (int v : p.clusters[j])
            if (cross_deg(v, p.clusters[i].ids()) <= delta * p.clusters[i].size()) rep.pairs_ok = false;
    }
    recompute_pair_densities(host, p);
    return rep;
}

DistributeReport distribute_exceptional(const Graph& host, RegularPartition& p,
                                        const ReducedGraph& r, double delta, double gamma_eff,
                                        double host_min_degree_fraction) {
    int l = p.cluster_count();
    DistributeReport rep;
    rep.w0_size = p.exceptional.size();
    rep.gain_bound = l > 0 ? 2.0 * rep.w0_size / l : 0.0;
    rep.spread_bound = 3.0 * p.eps * p.m;
    double gamma_pp = 3.0 * (std::cbrt(gamma_eff) - 2.0 * (p.eps + p.d));
    rep.lemma_bound = (0.5 + gamma_pp) * l;
    rep.lemma_applicable = host_min_degree_fraction >= 0.5 + 3.0 * std::cbrt(gamma_eff);
    rep.min_j_degree = l;

    std::vector<std::vector<int>> members(l);
    for (int i = 0; i < l; ++i) members[i] = p.clusters[i].ids();
    std::vector<int> gains(l, 0);
    auto bits = host.adjacency_bitsets();
    std::vector<DynBitset> partner_mask(l);
    for (int i = 0; i < l; ++i) {
        if (r.partner[i] < 0) throw parameter_error("distribute_exceptional: unmatched cluster");
        partner_mask[i] = set_mask(p.clusters[r.partner[i]], host.vertex_count());
    }

    for (int v : p.exceptional) {
        int best = -1;
        int j_deg = 0;
        for (int i = 0; i < l; ++i) {
            if (bits[v].and_count(partner_mask[i]) < delta * p.m) continue;
            ++j_deg;
            if (best == -1 || gains[i] < gains[best]) best = i;
        }
        rep.min_j_degree = std::min(rep.min_j_degree, j_deg);
        if (best == -1)
            throw parameter_error("host-degree error: exceptional vertex " + std::to_string(v) +
                                  " has no J-neighbor");
        members[best].push_back(v);
        ++gains[best];
    }
    for (int i = 0; i < l; ++i) {
        rep.max_gain = std::max(rep.max_gain, gains[i]);
        p.clusters[i] = VertexSet(members[i]);
    }
    p.exceptional = VertexSet();

    int min_sz = p.clusters[0].size(), max_sz = min_sz;
    for (const auto& c : p.clusters) {
        min_sz = std::min(min_sz, c.size());
        max_sz = std::max(max_sz, c.size());
    }
    rep.size_spread = max_sz - min_sz;
    rep.gain_ok = rep.w0_size == 0 || rep.max_gain <= rep.gain_bound + 1e-9;
    rep.spread_ok = rep.size_spread < rep.spread_bound + 1e-9;
    rep.lemma_ok = !rep.lemma_applicable || rep.min_j_degree + 1e-9 >= rep.lemma_bound;
    return rep;
}

namespace {

// bipartition classes of a broom: vertices at even/odd depth from the first
std::pair<std::vector<int>, std::vector<int>> broom_classes(const BroomComponent& comp) {
    std::vector<int> even, odd;
    int t = int(comp.path.size());
    for (int i = 0; i < t; ++i) (i % 2 == 0 ? even : odd).push_back(comp.path[i]);
    for (int leaf : comp.leaves) (t % 2 == 0 ? even : odd).push_back(leaf);
    return {even, odd};
}

std::vector<int> proportional_quota(const std::vector<int>& sizes, int total) {
    int l = int(sizes.size());
    long long sum = std::accumulate(sizes.begin(), sizes.end(), 0LL);
    if (sum < total) throw parameter_error("guest does not fit: clusters too small");
    std::vector<int> quota(l);
    std::vector<std::pair<double, int>> rem(l);
    int assigned = 0;
    for (int i = 0; i < l; ++i) {
        double share = double(total) * sizes[i] / double(sum);
        quota[i] = int(std::floor(share));
        assigned += quota[i];
        rem[i] = {share - quota[i], i};
    }
    std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (int i = 0; i < total - assigned; ++i) ++quota[rem[i].second];
    for (int i = 0; i < l; ++i)
        if (quota[i] > sizes[i]) throw parameter_error("quota exceeds cluster capacity");
    return quota;
}

} // namespace

std::pair<AssignmentState, AssignReport> assign_components(const HrtGraph& guest,
                                                           const RegularPartition& p,
                                                           const ReducedGraph& r,
                                                           std::uint64_t seed, double load_slack,
                                                           int retries, double reassign_cap) {
    if (r.matching.empty()) throw parameter_error("assign_components: empty matching");
    int l = p.cluster_count();
    int n_guest = guest.graph.vertex_count();
    int comp_count = int(guest.components.size());
    int comp_size = guest.params.t + guest.params.D - 1;
    int total = comp_count * comp_size;

    std::vector<int> sizes(l);
    for (int i = 0; i < l; ++i) sizes[i] = p.clusters[i].size();
    std::vector<int> quota = proportional_quota(sizes, total);

    double mean_load = double(total) / double(r.matching.size());
    AssignReport rep;
    rep.mean_load = mean_load;
    rep.load_slack = load_slack;

    std::vector<std::pair<std::vector<int>, std::vector<int>>> classes;
    classes.reserve(comp_count);
    for (const auto& comp : guest.components) classes.push_back(broom_classes(comp));

    AssignmentState state;
    for (int attempt = 0; attempt < retries; ++attempt) {
        auto rng = make_rng(substream(seed, 0xA551ULL + std::uint64_t(attempt)));
        std::uniform_int_distribution<int> edge_pick(0, int(r.matching.size()) - 1);
        std::bernoulli_distribution flip_pick(0.5);

        std::vector<int> cluster_of(n_guest, -1);
        std::vector<int> assigned(l, 0);
        std::vector<long long> loads(r.matching.size(), 0);
        std::vector<int> comp_edge(comp_count), comp_flip(comp_count);

        for (int ci = 0; ci < comp_count; ++ci) {
            int e = edge_pick(rng);
            int flip = flip_pick(rng) ? 1 : 0;
            comp_edge[ci] = e;
            comp_flip[ci] = flip;
            auto [q1, q2] = r.matching[e];
            int even_cluster = flip == 0 ? q1 : q2;
            int odd_cluster = flip == 0 ? q2 : q1;
            for (int v : classes[ci].first) {
                cluster_of[v] = even_cluster;
                ++assigned[even_cluster];
            }
            for (int v : classes[ci].second) {
                cluster_of[v] = odd_cluster;
                ++assigned[odd_cluster];
            }
            loads[e] += comp_size;
        }

        bool ok = true;
        for (long long load : loads)
            if (std::abs(double(load) - mean_load) > load_slack * mean_load + 1e-9) ok = false;
        int max_dev = 0;
        for (int i = 0; i < l; ++i) max_dev = std::max(max_dev, std::abs(assigned[i] - quota[i]));
        if (max_dev > 0.8 * reassign_cap + 1e-9) ok = false;

        rep.retries_used = attempt + 1;
        if (!ok) continue;

        rep.edge_loads = std::move(loads);
        rep.max_quota_dev = max_dev;
        rep.ok = true;
        state.cluster_of = std::move(cluster_of);
        state.image_of.assign(n_guest, -1);
        state.restriction.assign(n_guest, std::nullopt);
        state.assigned_count = std::move(assigned);
        state.quota = std::move(quota);
        state.reassigned_first.assign(l, 0);
        state.reassigned_leaf.assign(l, 0);
        state.component_edge = std::move(comp_edge);
        state.component_flip = std::move(comp_flip);
        return {std::move(state), rep};
    }
    throw generation_error("assign_components: no seed met the balance windows", retries);
}

FirstVertexReport reassign_first_vertices(const HrtGraph& guest, AssignmentState& state,
                                          const Graph& host, const RegularPartition& p,
                                          const ReducedGraph& r, double threshold,
                                          int required_choices, double reassign_cap) {
    int l = p.cluster_count();
    FirstVertexReport rep;
    rep.threshold = threshold;
    rep.required_choices = required_choices;
    rep.cap = reassign_cap;
    auto cluster_idx = host_cluster_index(p, host.vertex_count());

    for (std::size_t ci = 0; ci < guest.components.size(); ++ci) {
        const auto& comp = guest.components[ci];
        int y = comp.first();
        int v = state.image_of[comp.anchor];
        if (v < 0) throw parameter_error("reassign_first_vertices: anchor image missing (run Step 1)");

        std::vector<int> deg_into(l, 0);
        for (int w : host.neighbors(v))
            if (cluster_idx[w] >= 0) ++deg_into[cluster_idx[w]];

        int cy = state.cluster_of[y];
        auto set_restriction = [&](int cluster) {
            std::vector<int> t;
            for (int w : host.neighbors(v))
                if (cluster_idx[w] == cluster) t.push_back(w);
            state.restriction[y] = VertexSet(std::move(t));
        };

        if (deg_into[cy] >= threshold) {
            set_restriction(cy);
            continue;
        }
        ++rep.triggered;
        std::vector<int> big;
        for (int j = 0; j < l; ++j)
            if (deg_into[j] >= threshold) big.push_back(j);
        if (rep.min_l_size < 0 || int(big.size()) < rep.min_l_size) rep.min_l_size = int(big.size());
        if (int(big.size()) < (l + 1) / 2) rep.l_ge_half_ok = false;

        // the component's matching edge; W_i is the endpoint holding y's
        // in-component neighbors
        auto [q1, q2] = r.matching[state.component_edge[ci]];
        int even_cluster = state.component_flip[ci] == 0 ? q1 : q2;
        int wi = even_cluster == q1 ? q2 : q1; // partner of the first-vertex side

        std::vector<int> choices;
        for (int j : big)
            if (r.graph.has_edge(j, wi)) choices.push_back(j);
        if (rep.min_choices_seen < 0 || int(choices.size()) < rep.min_choices_seen)
            rep.min_choices_seen = int(choices.size());
        if (int(choices.size()) < required_choices)
            throw parameter_error("host-degree error: only " + std::to_string(choices.size()) +
                                  " reassignment choices for a first vertex (need " +
                                  std::to_string(required_choices) + ")");
        int best = choices[0];
        for (int j : choices)
            if (state.reassigned_first[j] < state.reassigned_first[best] ||
                (state.reassigned_first[j] == state.reassigned_first[best] && j < best))
                best = j;
        --state.assigned_count[cy];
        ++state.assigned_count[best];
        state.cluster_of[y] = best;
        ++state.reassigned_first[best];
        set_restriction(best);
    }
    for (int j = 0; j < l; ++j) rep.max_reassigned_into = std::max(rep.max_reassigned_into,
                                                                   state.reassigned_first[j]);
    rep.cap_ok = rep.max_reassigned_into <= reassign_cap + 1e-9;
    return rep;
}

RebalanceReport rebalance_leaves(const HrtGraph& guest, AssignmentState& state,
                                 const ReducedGraph& r, const RegularPartition& p,
                                 double reassign_cap, double gamma_eff) {
    int l = p.cluster_count();
    RebalanceReport rep;
    rep.cap = reassign_cap;
    int t = guest.params.t, D = guest.params.D;
    rep.leaf_supply_bound = (D - 1) * (1.0 - gamma_eff) * p.m / (2.0 * (t + D - 1));

    // leaf inventory: (leaf, parent last vertex), queried by current clusters
    struct LeafRef {
        int leaf;
        int last;
    };
    std::vector<LeafRef> leaves;
    for (const auto& comp : guest.components)
        for (int leaf : comp.leaves) leaves.push_back({leaf, comp.last()});

    std::vector<int> leaves_per_cluster(l, 0);
    for (const auto& lr : leaves) ++leaves_per_cluster[state.cluster_of[lr.leaf]];
    rep.min_leaves_per_cluster = *std::min_element(leaves_per_cluster.begin(),
                                                   leaves_per_cluster.end());
    rep.leaf_supply_ok = rep.min_leaves_per_cluster + 1e-9 >= rep.leaf_supply_bound;

    auto movable = [&](int from, int to) {
        std::vector<int> out;
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            if (state.cluster_of[leaves[i].leaf] != from) continue;
            if (r.graph.has_edge(state.cluster_of[leaves[i].last], to)) out.push_back(int(i));
        }
        return out;
    };
    auto move_leaf = [&](int idx, int to) {
        int leaf = leaves[idx].leaf;
        int from = state.cluster_of[leaf];
        --state.assigned_count[from];
        ++state.assigned_count[to];
        state.cluster_of[leaf] = to;
        ++state.reassigned_leaf[to];
        // restriction marker: the leaf's target cluster (its live constraint
        // is its parent's neighborhood inside that cluster)
        state.restriction[leaf] = p.clusters[to];
        ++rep.moves;
    };

    int guard = 10 * l * l + 100;
    while (guard-- > 0) {
        std::vector<int> surplus, deficit;
        for (int i = 0; i < l; ++i) {
            if (state.assigned_count[i] > state.quota[i]) surplus.push_back(i);
            if (state.assigned_count[i] < state.quota[i]) deficit.push_back(i);
        }
        if (surplus.empty() && deficit.empty()) {
            rep.filled = true;
            break;
        }
        if (surplus.empty() != deficit.empty())
            throw lemma_violation("rebalance_leaves: totals out of sync with quotas");
        std::sort(surplus.begin(), surplus.end(), [&](int a, int b) {
            int sa = state.assigned_count[a] - state.quota[a];
            int sb = state.assigned_count[b] - state.quota[b];
            return sa != sb ? sa > sb : a < b;
        });
        std::sort(deficit.begin(), deficit.end(), [&](int a, int b) {
            int da = state.quota[a] - state.assigned_count[a];
            int db = state.quota[b] - state.assigned_count[b];
            return da != db ? da > db : a < b;
        });

        bool moved_any = false;
        bool any_leaf_in_surplus = false;
        for (int ws : surplus) {
            int have = state.assigned_count[ws] - state.quota[ws];
            for (int wi : deficit) {
                int need = std::min(have, state.quota[wi] - state.assigned_count[wi]);
                auto direct = movable(ws, wi);
                if (!direct.empty()) any_leaf_in_surplus = true;
                int take = std::min<int>(need, int(direct.size()));
                if (take > 0) {
                    for (int i = 0; i < take; ++i) move_leaf(direct[i], wi);
                    moved_any = true;
                    break;
                }
                // two hops through an intermediate cluster: ws -> wp, wp -> wi
                for (int wp = 0; wp < l && !moved_any; ++wp) {
                    if (wp == ws || wp == wi) continue;
                    auto hop2 = movable(wp, wi);
                    if (hop2.empty()) continue;
                    auto hop1 = movable(ws, wp);
                    if (hop1.empty()) continue;
                    any_leaf_in_surplus = true;
                    int c = std::min<int>({need, int(hop1.size()), int(hop2.size())});
                    if (c <= 0) continue;
                    for (int i = 0; i < c; ++i) move_leaf(hop2[i], wi);
                    for (int i = 0; i < c; ++i) move_leaf(hop1[i], wp);
                    rep.two_hop_moves += c;
                    moved_any = true;
                }
                if (moved_any) break;
            }
            if (moved_any) break;
        }
        if (!moved_any) {
            if (!any_leaf_in_surplus)
                throw parameter_error("leaf supply insufficient for rebalancing (D=" +
                                      std::to_string(D) + ", t=" + std::to_string(t) +
                                      ", m=" + std::to_string(p.m) + ")");
            throw parameter_error("reduced-graph-degree error: no rebalancing route exists");
        }
    }
    if (!rep.filled) throw lemma_violation("rebalance_leaves: did not converge");
    for (int i = 0; i < l; ++i) rep.max_arrivals = std::max(rep.max_arrivals,
                                                            state.reassigned_leaf[i]);
    rep.cap_ok = rep.max_arrivals <= reassign_cap + 1e-9;
    return rep;
}

BlowupResult blowup_embed(const HrtGraph& guest, AssignmentState& state, const Graph& host,
                          const RegularPartition& p, double c_restriction, double alpha,
                          std::uint64_t seed, int component_retries, int global_restarts) {
    int l = p.cluster_count();
    int host_n = host.vertex_count();
    BlowupResult out;

    // restriction caps checked before any placement
    std::vector<int> restr_count(l, 0);
    for (int v = 0; v < guest.graph.vertex_count(); ++v) {
        if (!state.restriction[v]) continue;
        int c = state.cluster_of[v];
        if (c < 0) throw parameter_error("blowup_embed: restricted vertex outside clusters");
        ++restr_count[c];
        if (state.restriction[v]->size() < c_restriction * p.clusters[c].size() - 1e-9)
            throw parameter_error("blowup_embed: restriction set below c*|W| for guest vertex " +
                                  std::to_string(v));
    }
    for (int c = 0; c < l; ++c)
        if (restr_count[c] > alpha * p.clusters[c].size() + 1e-9)
            throw parameter_error("blowup_embed: restriction count exceeds alpha*|W| in cluster " +
                                  std::to_string(c));

    auto bits = host.adjacency_bitsets();
    std::vector<DynBitset> cluster_mask(l);
    for (int c = 0; c < l; ++c) cluster_mask[c] = set_mask(p.clusters[c], host_n);

    // components largest first (sizes are equal here; anchor order breaks ties)
    std::vector<int> comp_order(guest.components.size());
    std::iota(comp_order.begin(), comp_order.end(), 0);

    // BFS order within a component, rooted at the first vertex
    auto comp_bfs = [&](const BroomComponent& comp) {
        std::vector<std::pair<int, int>> order; // (vertex, parent)
        order.emplace_back(comp.first(), -1);
        for (std::size_t i = 1; i < comp.path.size(); ++i)
            order.emplace_back(comp.path[i], comp.path[i - 1]);
        for (int leaf : comp.leaves) order.emplace_back(leaf, comp.last());
        return order;
    };

    DynBitset used_base(host_n);
    for (int v = 0; v < guest.graph.vertex_count(); ++v)
        if (state.image_of[v] >= 0) used_base.set(state.image_of[v]);

    for (int restart = 0; restart <= global_restarts; ++restart) {
        DynBitset used = used_base;
        std::vector<int> image = state.image_of;
        bool all_placed = true;
        out.global_restarts = restart;

        for (int ci : comp_order) {
            const auto& comp = guest.components[ci];
            auto order = comp_bfs(comp);
            bool comp_done = false;
            for (int attempt = 0; attempt < component_retries && !comp_done; ++attempt) {
                ++out.component_retries;
                auto rng = make_rng(substream(seed, (std::uint64_t(restart) << 40) ^
                                                        (std::uint64_t(ci) << 16) ^
                                                        std::uint64_t(attempt)));
                long long budget = 80LL * int(order.size());
                std::vector<int> placed;
                // DFS with bounded backtracking inside the component
                std::function<bool(std::size_t)> place = [&](std::size_t idx) -> bool {
                    if (idx == order.size()) return true;
                    if (--budget < 0) return false;
                    auto [v, parent] = order[idx];
                    if (parent < 0 && !state.restriction[v])
                        throw parameter_error("blowup_embed: first vertex lacks its restriction set");
                    DynBitset cand = parent < 0 ? set_mask(*state.restriction[v], host_n)
                                                : bits[image[parent]];
                    cand.and_with(cluster_mask[state.cluster_of[v]]);
                    if (parent >= 0 && state.restriction[v])
                        cand.and_with(set_mask(*state.restriction[v], host_n));
                    cand.and_not_with(used);
                    auto options = cand.to_vector();
                    if (out.min_candidates_seen < 0 || int(options.size()) < out.min_candidates_seen)
                        out.min_candidates_seen = int(options.size());
                    std::shuffle(options.begin(), options.end(), rng);
                    for (int u : options) {
                        image[v] = u;
                        used.set(u);
                        placed.push_back(u);
                        if (place(idx + 1)) return true;
                        used.reset(u);
                        placed.pop_back();
                        image[v] = -1;
                        if (budget < 0) return false;
                    }
                    return false;
                };
                if (place(0)) {
                    comp_done = true;
                } else {
                    for (int u : placed) used.reset(u);
                    for (auto [v, parent] : order) image[v] = -1;
                }
            }
            if (!comp_done) {
                out.failed_component = ci;
                all_placed = false;
                break;
            }
        }
        if (all_placed) {
            out.success = true;
            out.map.image = std::move(image);
            auto check = verify_embedding(guest.graph, host, out.map.image);
            if (!check.ok)
                throw lemma_violation("blowup_embed produced an invalid map: " + check.violation);
            out.map.verified = true;
            state.image_of = out.map.image;
            break;
        }
    }
    out.occupancy.assign(l, 0);
    for (int v = 0; v < guest.graph.vertex_count(); ++v) {
        int c = state.cluster_of[v];
        if (c >= 0 && state.image_of[v] >= 0 && out.success) ++out.occupancy[c];
    }
    return out;
}

namespace {

nlohmann::json flag_json(bool b) { return b; }

} // namespace

PipelineResult run_pipeline(const HrtGraph& guest, const Graph& host,
                            const RegularPartition& partition, const PipelineConfig& cfg) {
    PipelineResult result;
    nlohmann::json& rep = result.report;

    double gamma = cfg.gamma_eff.value_or(guest.params.gamma_achieved);
    double d = cfg.d.value_or(partition.d > 0 ? partition.d : std::sqrt(gamma));
    double eps = cfg.eps.value_or(d / 20.0);
    double eps_check = std::max(eps, cfg.eps_check_floor);
    double delta = cfg.delta.value_or(0.3 * d);
    double gamma13 = std::cbrt(gamma), gamma23 = gamma13 * gamma13;

    int k2 = 2 * guest.params.k;
    RegularPartition p = partition;
    p.eps = eps;
    p.d = d;

    double l_threshold_frac = cfg.l_threshold_frac.value_or(3.0 * gamma23);
    double reassign_cap_frac = cfg.reassign_cap_frac.value_or(gamma23);
    double min_choices_frac = cfg.min_choices_frac.value_or(2.0 * gamma13);

    rep["config"] = {{"seed", cfg.seed},
                     {"rho", cfg.rho},
                     {"gamma_eff", gamma},
                     {"d", d},
                     {"eps", eps},
                     {"eps_check", eps_check},
                     {"delta", delta},
                     {"c_restriction", cfg.c_restriction},
                     {"alpha", cfg.alpha},
                     {"load_slack", cfg.load_slack},
                     {"assign_retries", cfg.assign_retries},
                     {"regularity_samples", cfg.regularity_samples},
                     {"l_threshold_frac", l_threshold_frac},
                     {"reassign_cap_frac", reassign_cap_frac},
                     {"min_choices_frac", min_choices_frac},
                     {"dense_retries", cfg.dense_retries},
                     {"blowup_component_retries", cfg.blowup_component_retries},
                     {"blowup_global_restarts", cfg.blowup_global_restarts}};

    std::vector<std::pair<std::string, bool>> flags;
    auto add_flag = [&](const std::string& name, bool ok) { flags.emplace_back(name, ok); };

    // ---- Step 1: embed H[S] densely, then work in the remainder
    std::vector<std::pair<int, int>> s_edges;
    for (auto [u, v] : guest.graph.edges())
        if (u < k2 && v < k2) s_edges.emplace_back(u, v);
    Graph hs(k2, std::move(s_edges));
    auto dense = dense_embed_separator(hs, host, cfg.rho, substream(cfg.seed, 1), cfg.dense_retries);
    rep["step1_dense"] = dense_embed_report_to_json(dense, false);
    if (!dense.success) {
        rep["success"] = false;
        rep["failure"] = "step1_dense_embed_failed";
        return result;
    }

    std::vector<char> used_host(host.vertex_count(), 0);
    for (int v = 0; v < k2; ++v) used_host[dense.map.image[v]] = 1;

    // delta(G~) as a fraction, informational premise check
    {
        long long min_deg = -1;
        for (int v = 0; v < host.vertex_count(); ++v) {
            if (used_host[v]) continue;
            long long deg = 0;
            for (int w : host.neighbors(v)) deg += !used_host[w];
            if (min_deg < 0 || deg < min_deg) min_deg = deg;
        }
        int gtilde_n = host.vertex_count() - k2;
        double frac = gtilde_n > 0 ? double(min_deg) / gtilde_n : 0.0;
        rep["step1_dense"]["gtilde_min_degree_fraction"] = frac;
        rep["step1_dense"]["gtilde_premise_met"] = frac >= 0.5 + 2.0 * gamma13;
    }

    // ---- Step 2: restrict the partition to the remainder, equalize sizes
    {
        std::vector<int> spill;
        int m_min = -1;
        std::vector<std::vector<int>> members;
        for (auto& c : p.clusters) {
            std::vector<int> kept;
            for (int v : c)
                if (!used_host[v]) kept.push_back(v);
            members.push_back(std::move(kept));
            if (m_min < 0 || int(members.back().size()) < m_min) m_min = int(members.back().size());
        }
        for (auto& kept : members) {
            while (int(kept.size()) > m_min) { // trim highest ids into W_0
                spill.push_back(kept.back());
                kept.pop_back();
            }
        }
        for (std::size_t i = 0; i < members.size(); ++i) p.clusters[i] = VertexSet(members[i]);
        std::vector<int> w0;
        for (int v : p.exceptional)
            if (!used_host[v]) w0.push_back(v);
        w0.insert(w0.end(), spill.begin(), spill.end());
        p.exceptional = VertexSet(std::move(w0));
        p.m = m_min;

        int gtilde_n = host.vertex_count() - k2;
        bool w0_ok = p.exceptional.size() <= eps * gtilde_n + 1e-9;
        double gamma_prime = 2.0 * gamma13 - std::sqrt(gamma) - eps;
        rep["step2_partition"] = {{"m", p.m},
                                  {"w0_size", p.exceptional.size()},
                                  {"w0_bound", eps * gtilde_n},
                                  {"w0_ok", w0_ok},
                                  {"gamma_prime", gamma_prime},
                                  {"gamma_prime_gt_gamma13", gamma_prime > gamma13}};
        add_flag("w0_bound", w0_ok);
    }

    double host_min_frac = double(host.min_degree()) / host.vertex_count();

    // ---- Step 3: reduced graph and matching
    auto reduced = reduced_graph_and_matching(host, p, eps_check, cfg.regularity_samples,
                                              substream(cfg.seed, 3), host_min_frac);
    rep["step3_reduced"] = {{"l", p.cluster_count()},
                           {"edges", reduced.graph.edge_count()},
                           {"matching_size", int(reduced.matching.size())},
                           {"dropped_cluster", reduced.dropped_cluster ? nlohmann::json(*reduced.dropped_cluster)
                                                                       : nlohmann::json(nullptr)},
                           {"min_reduced_degree", reduced.min_reduced_degree},
                           {"reduced_degree_bound", reduced.reduced_degree_bound},
                           {"reduced_degree_ok", reduced.reduced_degree_ok},
                           {"falsified_pairs", reduced.falsified_pairs}};
    add_flag("matching_coverage", int(reduced.matching.size()) * 2 == p.cluster_count());
    add_flag("reduced_degree", reduced.reduced_degree_ok);

    // ---- Step 4: super-regularize the matching edges
    auto super = make_super_regular(host, p, reduced, delta);
    rep["step4_super_regular"] = {{"m_before", super.m_before},
                                  {"m_after", super.m_after},
                                  {"max_moved", super.max_moved},
                                  {"rounds", super.rounds},
                                  {"pairs_ok", super.pairs_ok}};
    add_flag("super_regular_pairs", super.pairs_ok);

    // ---- Step 5: distribute W_0
    auto dist = distribute_exceptional(host, p, reduced, delta, gamma, host_min_frac);
    rep["step5_distribute"] = {{"w0_size", dist.w0_size},
                               {"max_gain", dist.max_gain},
                               {"gain_bound", dist.gain_bound},
                               {"gain_ok", dist.gain_ok},
                               {"size_spread", dist.size_spread},
                               {"spread_bound", dist.spread_bound},
                               {"spread_ok", dist.spread_ok},
                               {"min_j_degree", dist.min_j_degree},
                               {"lemma_bound", dist.lemma_bound},
                               {"lemma_applicable", dist.lemma_applicable},
                               {"lemma_ok", dist.lemma_ok}};
    add_flag("w0_gain", dist.gain_ok);
    add_flag("cluster_spread", dist.spread_ok);
    add_flag("aux_lemma", dist.lemma_ok);

    // statistical recheck of the matched pairs after the additions
    {
        double eps_adas = std::max(eps_check, 2.0 * std::sqrt(eps));
        bool adas_ok = true;
        for (auto [i, j] : reduced.matching) {
            auto chk = sample_regularity(host, p.clusters[i], p.clusters[j], eps_adas,
                                         cfg.regularity_samples / 2,
                                         substream(cfg.seed, 0xADA5ULL + i));
            if (chk.falsified) adas_ok = false;
        }
        rep["step5_distribute"]["adas_eps"] = eps_adas;
        rep["step5_distribute"]["adas_ok"] = adas_ok;
        add_flag("adas_regularity", adas_ok);
    }

    double reassign_cap = reassign_cap_frac * p.m;

    // ---- Step 6: random component assignment + first-vertex restrictions
    AssignmentState state;
    try {
        auto [st, assign_rep] = assign_components(guest, p, reduced, substream(cfg.seed, 6),
                                                  cfg.load_slack, cfg.assign_retries, reassign_cap);
        state = std::move(st);
        rep["step6_assign"] = {{"retries_used", assign_rep.retries_used},
                               {"edge_loads", assign_rep.edge_loads},
                               {"mean_load", assign_rep.mean_load},
                               {"load_slack", assign_rep.load_slack},
                               {"max_quota_dev", assign_rep.max_quota_dev},
                               {"ok", assign_rep.ok}};
        add_flag("load_window", assign_rep.ok);
    } catch (const generation_error& e) {
        rep["step6_assign"] = {{"ok", false}, {"error", e.what()}};
        rep["success"] = false;
        rep["failure"] = "step6_balance_exhausted";
        return result;
    }
    for (int v = 0; v < k2; ++v) state.image_of[v] = dense.map.image[v];

    auto first_rep = reassign_first_vertices(guest, state, host, p, reduced,
                                             l_threshold_frac * p.m,
                                             int(std::ceil(min_choices_frac * p.cluster_count())),
                                             reassign_cap);
    rep["step6_first"] = {{"triggered", first_rep.triggered},
                          {"max_reassigned_into", first_rep.max_reassigned_into},
                          {"cap", first_rep.cap},
                          {"cap_ok", first_rep.cap_ok},
                          {"min_l_size", first_rep.min_l_size},
                          {"l_ge_half_ok", first_rep.l_ge_half_ok},
                          {"min_choices_seen", first_rep.min_choices_seen},
                          {"threshold", first_rep.threshold},
                          {"required_choices", first_rep.required_choices}};
    add_flag("first_vertex_cap", first_rep.cap_ok);

    // ---- Step 7: leaf rebalancing to exact quota fill
    auto rebalance = rebalance_leaves(guest, state, reduced, p, reassign_cap, gamma);
    rep["step7_rebalance"] = {{"moves", rebalance.moves},
                              {"two_hop_moves", rebalance.two_hop_moves},
                              {"max_arrivals", rebalance.max_arrivals},
                              {"cap", rebalance.cap},
                              {"cap_ok", rebalance.cap_ok},
                              {"min_leaves_per_cluster", rebalance.min_leaves_per_cluster},
                              {"leaf_supply_bound", rebalance.leaf_supply_bound},
                              {"leaf_supply_ok", rebalance.leaf_supply_ok},
                              {"filled", rebalance.filled}};
    add_flag("leaf_cap", rebalance.cap_ok);
    add_flag("exact_fill", rebalance.filled);

    // ---- Step 8: restriction-aware greedy blow-up
    auto blowup = blowup_embed(guest, state, host, p, cfg.c_restriction, cfg.alpha,
                               substream(cfg.seed, 8), cfg.blowup_component_retries,
                               cfg.blowup_global_restarts);
    rep["step8_blowup"] = {{"success", blowup.success},
                           {"component_retries", blowup.component_retries},
                           {"global_restarts", blowup.global_restarts},
                           {"failed_component", blowup.failed_component},
                           {"occupancy", blowup.occupancy},
                           {"min_candidates_seen", blowup.min_candidates_seen}};

    nlohmann::json flags_json = nlohmann::json::object();
    bool all_flags = true;
    for (auto& [name, ok] : flags) {
        flags_json[name] = flag_json(ok);
        all_flags = all_flags && ok;
    }
    rep["stage_flags"] = std::move(flags_json);

    bool verified = blowup.success && blowup.map.verified;
    rep["verified"] = verified;
    result.success = verified && all_flags;
    rep["success"] = result.success;
    if (!blowup.success) rep["failure"] = "step8_blowup_failed";
    if (verified) {
        result.map = blowup.map;
        rep["map"] = blowup.map.image;
    }
    return result;
}

} // namespace sbl
