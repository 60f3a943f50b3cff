#include <doctest.h>

#include <cmath>

#include "sbl/errors.hpp"
#include "sbl/graph_ops.hpp"
#include "sbl/pipeline.hpp"
#include "sbl/rng.hpp"

#include "helpers.hpp"

using namespace sbl;

TEST_CASE("planted host: complete pair at density 1, measured degrees at 0.5") {
    auto full = planted_regular_host(80, 2, 0.9, 0.3, 1, 1.0);
    CHECK(full.partition.pair_density[0][1] == doctest::Approx(1.0));
    auto chk = sample_regularity(full.graph, full.partition.clusters[0],
                                 full.partition.clusters[1], 0.05, 100, 2);
    CHECK_FALSE(chk.falsified); // all sub-densities equal 1

    auto host = planted_regular_host(300, 3, 0.5, 0.3, 7, 0.5);
    CHECK(host.partition.m == 100);
    for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 2}})
        CHECK(host.partition.pair_density[i][j] == doctest::Approx(0.5).epsilon(0.08));
    // min cross-degree per designed pair respects delta_super
    for (int v : host.partition.clusters[0]) {
        int deg = 0;
        for (int w : host.graph.neighbors(v))
            if (host.partition.clusters[1].contains(w)) ++deg;
        CHECK(deg >= int(std::ceil(0.3 * 100 - 1e-9)));
    }
    CHECK_THROWS_AS(planted_regular_host(100, 2, 0.5, 0.96, 1), parameter_error);
}

TEST_CASE("sample_regularity falsifies a planted irregular pair") {
    // A's first half is complete to B, second half empty: d(A,B) = 0.5
    int m = 60;
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < m / 2; ++a)
        for (int b = 0; b < m; ++b) edges.emplace_back(a, m + b);
    Graph g(2 * m, edges);
    VertexSet A = VertexSet(std::vector<int>([&] {
        std::vector<int> v(m);
        std::iota(v.begin(), v.end(), 0);
        return v;
    }()));
    VertexSet B = VertexSet(std::vector<int>([&] {
        std::vector<int> v(m);
        std::iota(v.begin(), v.end(), m);
        return v;
    }()));
    auto chk = sample_regularity(g, A, B, 0.1, 200, 3);
    CHECK(chk.falsified);
    CHECK(chk.pair_density == doctest::Approx(0.5));
    CHECK(std::abs(chk.witness_density - chk.pair_density) >= 0.1);
    CHECK_FALSE(chk.atypical_ok); // half of A sits at degree 0 <= (d-eps)|B|

    // remark-style atypicality bound holds on an honest planted pair
    auto host = planted_regular_host(240, 2, 0.5, 0.3, 11, 0.6);
    auto good = sample_regularity(host.graph, host.partition.clusters[0],
                                  host.partition.clusters[1], 0.1, 300, 5);
    CHECK_FALSE(good.falsified);
    CHECK(good.atypical_ok);
    CHECK(good.samples_run == 300);
}

TEST_CASE("reduced graph and matching") {
    SUBCASE("two clusters, one dense pair") {
        auto host = planted_regular_host(120, 2, 0.5, 0.3, 5, 0.8);
        auto p = host.partition;
        p.eps = 0.05;
        auto r = reduced_graph_and_matching(host.graph, p, 0.1, 40, 1, 0.5);
        CHECK(r.matching.size() == 1);
        CHECK(r.matching[0] == std::pair<int, int>{0, 1});
        CHECK(r.partner[0] == 1);
    }
    SUBCASE("ten dense clusters give a perfect matching of size 5") {
        auto host = planted_regular_host(600, 10, 0.5, 0.3, 6, 0.8);
        auto p = host.partition;
        p.eps = 0.05;
        auto r = reduced_graph_and_matching(host.graph, p, 0.1, 30, 2, 0.7);
        CHECK(r.matching.size() == 5);
        CHECK_FALSE(r.dropped_cluster.has_value());
        CHECK(r.reduced_degree_ok);
        // claim arithmetic: bound = (c - (2 eps + d)) l
        CHECK(r.reduced_degree_bound ==
              doctest::Approx((0.7 - (2 * 0.05 + 0.5)) * 10));
    }
    SUBCASE("odd cluster count folds the leftover into W_0") {
        auto host = planted_regular_host(500, 5, 0.5, 0.3, 8, 0.8);
        auto p = host.partition;
        p.eps = 0.05;
        int before = p.cluster_count();
        auto r = reduced_graph_and_matching(host.graph, p, 0.1, 30, 3, 0.6);
        CHECK(before == 5);
        CHECK(p.cluster_count() == 4);
        CHECK(r.matching.size() == 2);
        CHECK(r.dropped_cluster.has_value());
        CHECK(p.exceptional.size() == 100);
    }
    SUBCASE("sparse design with isolated clusters is a host-too-sparse error") {
        std::vector<std::pair<int, int>> pairs{{0, 1}};
        auto host = planted_regular_host(400, 4, 0.5, 0.3, 9, 0.8, &pairs);
        auto p = host.partition;
        p.eps = 0.05;
        CHECK_THROWS_AS(reduced_graph_and_matching(host.graph, p, 0.1, 20, 4, 0.5),
                        parameter_error);
    }
}

TEST_CASE("make_super_regular moves exactly the sabotaged vertices plus padding") {
    auto host = planted_regular_host(80, 2, 0.5, 0.35, 13, 0.7);
    auto p = host.partition; // m = 40: tiny eps-subsets are pure noise, check coarsely
    p.eps = 0.2;
    auto r = reduced_graph_and_matching(host.graph, p, 0.25, 30, 1, 0.5);
    REQUIRE(r.matching.size() == 1);

    SUBCASE("healthy planted pair moves nothing") {
        auto rep = make_super_regular(host.graph, p, r, 0.15);
        CHECK(rep.max_moved == 0);
        CHECK(rep.m_after == 40);
        CHECK(rep.pairs_ok);
    }
    SUBCASE("five low-degree vertices are detected") {
        // strip cluster-0 vertices 0..4 down to 3 cross-neighbors each
        std::vector<std::pair<int, int>> edges;
        for (auto [u, v] : host.graph.edges()) {
            int low = std::min(u, v);
            if (low <= 4 && std::max(u, v) >= 43) continue; // keep 3 neighbors 40,41,42
            edges.emplace_back(u, v);
        }
        Graph sabotaged(host.graph.vertex_count(), edges);
        for (int v = 0; v <= 4; ++v) {
            int deg = 0;
            for (int w : sabotaged.neighbors(v)) deg += w >= 40;
            CHECK(deg <= 3);
        }
        auto p2 = host.partition;
        p2.eps = 0.2;
        auto rep = make_super_regular(sabotaged, p2, r, 0.15); // threshold 0.15*40 = 6
        CHECK(rep.max_moved == 5);
        CHECK(rep.m_after == 35);
        CHECK(rep.pairs_ok);
        for (int v = 0; v <= 4; ++v) CHECK(p2.exceptional.contains(v));
        CHECK(rep.moved_per_cluster[0] == 5);
        CHECK(rep.moved_per_cluster[1] == 5); // padded
    }
    SUBCASE("too many bad vertices is an irregularity error") {
        auto p3 = host.partition;
        p3.eps = 0.02; // cap below the sabotage size
        std::vector<std::pair<int, int>> edges;
        for (auto [u, v] : host.graph.edges()) {
            int low = std::min(u, v);
            if (low <= 4 && std::max(u, v) >= 43) continue;
            edges.emplace_back(u, v);
        }
        Graph sabotaged(host.graph.vertex_count(), edges);
        CHECK_THROWS_AS(make_super_regular(sabotaged, p3, r, 0.15), parameter_error);
    }
}

TEST_CASE("distribute_exceptional") {
    auto host = planted_regular_host(630, 6, 0.5, 0.3, 17, 0.8); // m=105, 0 leftover
    auto p = host.partition;
    p.eps = 0.1;
    auto r = reduced_graph_and_matching(host.graph, p, 0.1, 20, 2, 0.6);
    REQUIRE(r.matching.size() == 3);

    SUBCASE("empty W_0 is a no-op") {
        auto rep = distribute_exceptional(host.graph, p, r, 0.15, 0.1, 0.6);
        CHECK(rep.w0_size == 0);
        CHECK(rep.max_gain == 0);
        CHECK(rep.gain_ok);
        CHECK(rep.spread_ok);
    }
    SUBCASE("30 exceptional vertices spread with max gain <= 2|W_0|/l") {
        // move the first 5 vertices of each cluster into W_0
        RegularPartition q = p;
        std::vector<int> w0;
        for (int c = 0; c < 6; ++c) {
            auto ids = q.clusters[c].ids();
            w0.insert(w0.end(), ids.begin(), ids.begin() + 5);
            q.clusters[c] = VertexSet(std::vector<int>(ids.begin() + 5, ids.end()));
        }
        q.exceptional = VertexSet(w0);
        q.m = 100;
        auto rep = distribute_exceptional(host.graph, q, r, 0.15, 0.1, 0.6);
        CHECK(rep.w0_size == 30);
        CHECK(rep.max_gain <= 10); // 2*30/6
        CHECK(rep.gain_ok);
        CHECK(rep.spread_ok);
        CHECK(rep.min_j_degree == 6); // dense planted host: J is complete
        CHECK(q.exceptional.empty());
        int total = 0;
        for (const auto& c : q.clusters) total += c.size();
        CHECK(total == 630);
    }
}

namespace {

// a small guest + dense planted host for the stage tests
struct MiniSetup {
    HrtGraph guest;
    PlantedHost host;
    RegularPartition p;
    ReducedGraph reduced;
};

MiniSetup mini_setup(std::uint64_t seed = 5) {
    MiniSetup s{build_reference(solve_params(200, 5, 1, 10, 0.1, seed)),
                planted_regular_host(480, 4, 0.5, 0.3, seed + 1, 0.8),
                {},
                {}};
    s.p = s.host.partition;
    s.p.eps = 0.05;
    s.reduced = reduced_graph_and_matching(s.host.graph, s.p, 0.1, 30, seed + 2, 0.5);
    return s;
}

} // namespace

TEST_CASE("assign_components balances loads and preserves adjacency") {
    auto s = mini_setup();
    REQUIRE(s.reduced.matching.size() == 2);
    double cap = std::pow(0.1, 2.0 / 3.0) * s.p.m;
    auto [state, rep] = assign_components(s.guest, s.p, s.reduced, 42, 0.10, 500, cap);
    CHECK(rep.ok);
    CHECK(rep.edge_loads.size() == 2);
    for (auto load : rep.edge_loads)
        CHECK(std::abs(double(load) - rep.mean_load) <= 0.10 * rep.mean_load + 1e-9);

    // guest edges outside S land on matching edges
    int k2 = 2 * s.guest.params.k;
    for (auto [u, v] : s.guest.graph.edges()) {
        if (u < k2 || v < k2) continue;
        int cu = state.cluster_of[u], cv = state.cluster_of[v];
        CHECK(cu != cv);
        CHECK(s.reduced.partner[cu] == cv);
    }
    // loads count every non-S vertex exactly once
    long long total = 0;
    for (auto load : rep.edge_loads) total += load;
    CHECK(total == s.guest.graph.vertex_count() - k2);

    SUBCASE("single matching edge takes everything") {
        auto host1 = planted_regular_host(240, 2, 0.5, 0.3, 3, 0.8);
        auto p1 = host1.partition;
        p1.eps = 0.05;
        auto r1 = reduced_graph_and_matching(host1.graph, p1, 0.1, 30, 4, 0.5);
        auto [st1, rep1] = assign_components(s.guest, p1, r1, 1, 0.10, 10, 1e9);
        CHECK(rep1.edge_loads[0] == s.guest.graph.vertex_count() - k2);
    }
}

TEST_CASE("reassign_first_vertices restriction sets and trigger path") {
    auto s = mini_setup();
    double cap = std::pow(0.1, 2.0 / 3.0) * s.p.m;
    auto [state, arep] = assign_components(s.guest, s.p, s.reduced, 7, 0.10, 500, cap);

    // step-1 images: embed H[S] densely first
    int k2 = 2 * s.guest.params.k;
    std::vector<std::pair<int, int>> se;
    for (auto [u, v] : s.guest.graph.edges())
        if (u < k2 && v < k2) se.emplace_back(u, v);
    auto dense = dense_embed_separator(Graph(k2, se), s.host.graph, 0.5, 99, 20);
    REQUIRE(dense.success);
    // re-run the partition restriction: for this unit test we keep the planted
    // partition intact and simply avoid reusing the S images as candidates by
    // filling image_of now (blowup is not run here).
    for (int v = 0; v < k2; ++v) state.image_of[v] = dense.map.image[v];

    SUBCASE("generous threshold: no vertex triggers, restrictions recorded") {
        auto rep = reassign_first_vertices(s.guest, state, s.host.graph, s.p, s.reduced,
                                           10.0, 1, cap);
        CHECK(rep.triggered == 0);
        CHECK(rep.cap_ok);
        for (const auto& comp : s.guest.components) {
            int y = comp.first();
            REQUIRE(state.restriction[y].has_value());
            int v = state.image_of[comp.anchor];
            for (int w : *state.restriction[y]) {
                CHECK(s.host.graph.has_edge(v, w));
                CHECK(s.p.clusters[state.cluster_of[y]].contains(w));
            }
        }
    }
    SUBCASE("medium threshold: triggers happen, choices found, counts balanced") {
        double threshold = 0.75 * s.p.m; // planted degree ~0.8m, a few anchors trigger
        auto rep = reassign_first_vertices(s.guest, state, s.host.graph, s.p, s.reduced,
                                           threshold, 1, cap);
        CHECK(rep.min_choices_seen >= (rep.triggered > 0 ? 1 : -1));
        CHECK(rep.cap_ok);
        long long total_assigned = 0;
        for (int c : state.assigned_count) total_assigned += c;
        CHECK(total_assigned == s.guest.graph.vertex_count() - k2);
    }
    SUBCASE("impossible threshold is a host-degree error") {
        CHECK_THROWS_AS(reassign_first_vertices(s.guest, state, s.host.graph, s.p, s.reduced,
                                                double(s.p.m) + 1, 1, cap),
                        parameter_error);
    }
}

TEST_CASE("rebalance_leaves direct and two-hop routes") {
    auto s = mini_setup();
    double cap = 1e9; // caps are asserted separately; here we test routing
    auto [state, arep] = assign_components(s.guest, s.p, s.reduced, 11, 0.10, 500,
                                           std::pow(0.1, 2.0 / 3.0) * s.p.m);

    SUBCASE("already balanced quotas are a no-op") {
        auto st2 = state;
        st2.quota = st2.assigned_count;
        auto rep = rebalance_leaves(s.guest, st2, s.reduced, s.p, cap, 0.1);
        CHECK(rep.moves == 0);
        CHECK(rep.filled);
    }
    SUBCASE("a planted imbalance of 3 moves exactly 3 leaves") {
        auto st2 = state;
        st2.quota = st2.assigned_count;
        // shift quota by 3 between the two clusters of one matching edge's
        // opposite pair: source must hold leaves of the first edge
        int from = -1, to = -1;
        for (int c = 0; c < 4 && from < 0; ++c)
            if (st2.assigned_count[c] >= 3) from = c;
        for (int c = 0; c < 4; ++c)
            if (c != from) to = c;
        st2.quota[from] -= 3;
        st2.quota[to] += 3;
        auto rep = rebalance_leaves(s.guest, st2, s.reduced, s.p, cap, 0.1);
        CHECK(rep.filled);
        CHECK(rep.moves >= 3);
        CHECK(st2.assigned_count == st2.quota);
        // moved leaves keep their parent adjacency in the reduced graph
        for (const auto& comp : s.guest.components)
            for (int leaf : comp.leaves) {
                int cl = st2.cluster_of[leaf], cp = st2.cluster_of[comp.last()];
                CHECK(s.reduced.graph.has_edge(cl, cp));
            }
    }
}

TEST_CASE("rebalance routes through two hops when the direct edge is missing") {
    // reduced graph on 6 clusters: matching (0,1),(2,3),(4,5), extra edges
    // (1,2) and (3,5); moving mass 0 -> 5 needs the two-hop route via 2
    auto guest = build_reference(solve_params(180, 4, 1, 9, 0.1, 21)); // 18 components
    RegularPartition p;
    p.m = 50;
    p.eps = 0.05;
    p.d = 0.5;
    for (int c = 0; c < 6; ++c) {
        std::vector<int> ids(50);
        std::iota(ids.begin(), ids.end(), c * 50);
        p.clusters.emplace_back(VertexSet(ids));
    }
    ReducedGraph r;
    r.graph = Graph(6, {{0, 1}, {2, 3}, {4, 5}, {1, 2}, {3, 5}});
    r.matching = {{0, 1}, {2, 3}, {4, 5}};
    r.partner = {1, 0, 3, 2, 5, 4};

    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto [state, arep] = assign_components(guest, p, r, seed, 10.0, 50, 1e9);
        // need leaves in 0 (parents in 1) and leaves in 2 (parents in 3)
        int leaves0 = 0, leaves2 = 0;
        for (const auto& comp : guest.components)
            for (int leaf : comp.leaves) {
                if (state.cluster_of[leaf] == 0) ++leaves0;
                if (state.cluster_of[leaf] == 2) ++leaves2;
            }
        if (leaves0 < 2 || leaves2 < 2 || state.assigned_count[0] < 2) continue;

        auto st2 = state;
        st2.quota = st2.assigned_count;
        st2.quota[0] -= 2;
        st2.quota[5] += 2;
        auto rep = rebalance_leaves(guest, st2, r, p, 1e9, 0.1);
        CHECK(rep.filled);
        CHECK(rep.two_hop_moves >= 2);
        return;
    }
    FAIL("no seed produced the leaf layout needed for the two-hop scenario");
}

TEST_CASE("blowup precondition checks and a trivial placement") {
    auto s = mini_setup();
    auto [state, arep] = assign_components(s.guest, s.p, s.reduced, 13, 0.10, 500,
                                           std::pow(0.1, 2.0 / 3.0) * s.p.m);
    int k2 = 2 * s.guest.params.k;
    std::vector<std::pair<int, int>> se;
    for (auto [u, v] : s.guest.graph.edges())
        if (u < k2 && v < k2) se.emplace_back(u, v);
    auto dense = dense_embed_separator(Graph(k2, se), s.host.graph, 0.5, 5, 20);
    REQUIRE(dense.success);
    for (int v = 0; v < k2; ++v) state.image_of[v] = dense.map.image[v];
    auto frep = reassign_first_vertices(s.guest, state, s.host.graph, s.p, s.reduced, 10.0, 1,
                                        1e9);
    CHECK(frep.cap_ok);
    auto st_balanced = state;
    st_balanced.quota = st_balanced.assigned_count;

    SUBCASE("alpha cap violation is rejected before placement") {
        CHECK_THROWS_AS(blowup_embed(s.guest, st_balanced, s.host.graph, s.p, 0.3, 0.0, 1),
                        parameter_error);
    }
    SUBCASE("c cap violation is rejected before placement") {
        auto st2 = st_balanced;
        int y = s.guest.components[0].first();
        st2.restriction[y] = VertexSet({st2.restriction[y]->ids()[0]}); // shrink T_y to 1
        CHECK_THROWS_AS(blowup_embed(s.guest, st2, s.host.graph, s.p, 0.3, 0.35, 1),
                        parameter_error);
    }
    SUBCASE("greedy placement succeeds and verifies on the dense mini host") {
        auto res = blowup_embed(s.guest, st_balanced, s.host.graph, s.p, 0.3, 0.35, 99);
        REQUIRE(res.success);
        CHECK(res.map.verified);
        CHECK(verify_embedding(s.guest.graph, s.host.graph, res.map.image).ok);
    }
}

TEST_CASE("mini pipeline end to end") {
    auto guest = build_reference(solve_params(200, 5, 1, 10, 0.1, 31));
    auto host = planted_regular_host(500, 4, 0.5, 0.3, 77, 0.8);

    PipelineConfig cfg;
    cfg.seed = 5;
    cfg.eps = 0.05;
    auto result = run_pipeline(guest, host.graph, host.partition, cfg);
    if (!result.success) {
        // one retry with a different seed keeps the test robust to rare
        // unlucky assignments; the acceptance suite measures the actual rate
        cfg.seed = 6;
        result = run_pipeline(guest, host.graph, host.partition, cfg);
    }
    REQUIRE(result.success);
    CHECK(result.map.verified);
    CHECK(verify_embedding(guest.graph, host.graph, result.map.image).ok);
    CHECK(result.report.at("stage_flags").at("exact_fill").get<bool>());
    CHECK(result.report.at("stage_flags").at("matching_coverage").get<bool>());

    // determinism: identical config reproduces the identical report
    auto again = run_pipeline(guest, host.graph, host.partition, cfg);
    CHECK(again.report.dump() == result.report.dump());
}
