#include <doctest.h>

#include <cmath>

#include "sbl/errors.hpp"
#include "sbl/expander.hpp"
#include "sbl/graph_ops.hpp"
#include "sbl/rng.hpp"

#include "helpers.hpp"

using namespace sbl;

TEST_CASE("random_regular basics") {
    // only one 3-regular graph on 4 vertices
    Graph k4 = random_regular(4, 3, 1);
    CHECK(k4.edge_count() == 6);
    for (int v = 0; v < 4; ++v) CHECK(k4.degree(v) == 3);

    Graph cubic = random_regular(6, 3, 42);
    for (int v = 0; v < 6; ++v) CHECK(cubic.degree(v) == 3);

    CHECK_THROWS_AS(random_regular(5, 3, 1), parameter_error); // odd k*r

    // deterministic per seed
    CHECK(random_regular(20, 4, 7).edges() == random_regular(20, 4, 7).edges());
    CHECK(random_regular(20, 4, 7).edges() != random_regular(20, 4, 8).edges());

    // dense side goes through the complement
    Graph dense = random_regular(40, 35, 3);
    for (int v = 0; v < 40; ++v) CHECK(dense.degree(v) == 35);
}

TEST_CASE("degree sum invariant on generated regular graphs") {
    auto rng = make_rng(0);
    for (auto [k, r] : {std::pair{30, 4}, {25, 6}, {16, 9}, {21, 16}}) {
        Graph g = random_regular(k, r, rng());
        long long sum = 0;
        for (int v = 0; v < k; ++v) sum += g.degree(v);
        CHECK(sum == (long long)k * r);
    }
}

TEST_CASE("second_eigenvalue on known spectra") {
    CHECK(second_eigenvalue(complete_graph(4)) == doctest::Approx(1.0).epsilon(1e-8));
    // K_n as (n-1)-regular always gives 1
    CHECK(second_eigenvalue(complete_graph(9)) == doctest::Approx(1.0).epsilon(1e-8));
    // bipartite graphs carry -r as an eigenvalue, so lambda = r
    CHECK(second_eigenvalue(complete_bipartite(3, 3)) == doctest::Approx(3.0).epsilon(1e-8));
    // C_6 is bipartite too: -2 is an eigenvalue, so lambda = 2 (not 2cos(pi/3))
    CHECK(second_eigenvalue(cycle_graph(6)) == doctest::Approx(2.0).epsilon(1e-8));
    // odd cycle: |2cos(4*pi/5)| = golden ratio
    CHECK(second_eigenvalue(cycle_graph(5)) ==
          doctest::Approx(std::abs(2.0 * std::cos(2.0 * M_PI * 2 / 5))).epsilon(1e-8));

    CHECK_THROWS_AS(second_eigenvalue(path_graph(4)), parameter_error);     // irregular
    CHECK_THROWS_AS(second_eigenvalue(Graph(4, {{0, 1}, {2, 3}})), parameter_error); // disconnected
}

TEST_CASE("random_near_ramanujan verifies the spectral bound") {
    auto rep = random_near_ramanujan(60, 6, 12345);
    CHECK(rep.k == 60);
    CHECK(rep.r == 6);
    CHECK(rep.ramanujan_threshold == doctest::Approx(2.0 * std::sqrt(5.0)));
    CHECK(rep.is_ramanujan);
    CHECK(rep.lambda <= rep.ramanujan_threshold + rep.eig_tolerance);
    CHECK(rep.lambda >= 0.0);
}

TEST_CASE("mixing_deviation examples") {
    auto k4 = analyze_regular(complete_graph(4));

    SUBCASE("A = B = V has zero deviation") {
        auto full = mixing_deviation(k4, VertexSet::range(4), VertexSet::range(4));
        CHECK(full.observed == 12); // r*k = sum of degrees, edges inside counted twice
        CHECK(full.expected == doctest::Approx(12.0));
        CHECK(full.holds);
    }
    SUBCASE("disjoint pairs in K_4") {
        auto dev = mixing_deviation(k4, VertexSet({0, 1}), VertexSet({2, 3}));
        CHECK(dev.observed == 4);
        CHECK(dev.expected == doctest::Approx(3.0));
        // lemma bound at a=b=1/2: 2*sqrt(2)*sqrt(1/4)*4 = 4*sqrt(2)
        CHECK(dev.bound == doctest::Approx(4.0 * std::sqrt(2.0)));
        CHECK(dev.holds);
        CHECK(dev.holds_measured);
    }
}

TEST_CASE("mixing_deviation graph-surface overload matches the report path") {
    Graph k4 = complete_graph(4);
    auto via_graph = mixing_deviation(k4, VertexSet({0, 1}), VertexSet({2, 3}));
    auto via_report = mixing_deviation(analyze_regular(k4), VertexSet({0, 1}), VertexSet({2, 3}));
    CHECK(via_graph.observed == via_report.observed);
    CHECK(via_graph.bound == via_report.bound);
    CHECK(via_graph.holds == via_report.holds);
}

TEST_CASE("corollary margin closed form at r=35") {
    double margin = 35.0 / 9.0 - 2.0 * std::sqrt(34.0) / 3.0;
    CHECK(margin == doctest::Approx(0.001588).epsilon(1e-3));
    CHECK(std::abs(margin - 0.001588) < 1e-6);
    CHECK(margin > 0.0);
}

TEST_CASE("mixing inequality with measured lambda never fails on a verified graph") {
    auto rep = random_near_ramanujan(80, 6, 777);
    auto rng = make_rng(101);
    std::uniform_int_distribution<int> size_pick(1, 80);
    for (int trial = 0; trial < 1000; ++trial) {
        VertexSet a(sample_distinct(rng, 80, size_pick(rng)));
        VertexSet b(sample_distinct(rng, 80, size_pick(rng)));
        auto dev = mixing_deviation(rep, a, b);
        CHECK(dev.holds_measured); // theorem given the eigenvalue
    }
}

TEST_CASE("double cover construction") {
    auto k4 = analyze_regular(complete_graph(4));
    auto cover = double_cover_with_matching(k4);
    CHECK(cover.graph.vertex_count() == 8);
    CHECK(cover.graph.edge_count() == 16); // 2e + k = 12 + 4
    for (int v = 0; v < 8; ++v) CHECK(cover.graph.degree(v) == 4);
    auto classes = bipartition(cover.graph);
    REQUIRE(classes.has_value());
    for (int i = 0; i < 4; ++i) CHECK(cover.graph.has_edge(i, 4 + i));

    // C_3 is 2-regular: F on 6 vertices, 3-regular, 9 edges
    auto c3 = analyze_regular(cycle_graph(3));
    auto cover3 = double_cover_with_matching(c3);
    CHECK(cover3.graph.vertex_count() == 6);
    CHECK(cover3.graph.edge_count() == 9);
    for (int v = 0; v < 6; ++v) CHECK(cover3.graph.degree(v) == 3);
}

TEST_CASE("expansion_check holds for every subset (matching guarantees it)") {
    auto u = random_near_ramanujan(24, 5, 9);
    auto cover = double_cover_with_matching(u);

    CHECK(expansion_check(cover, VertexSet()).neighborhood_size == 0);
    CHECK(expansion_check(cover, VertexSet()).holds);
    auto full = expansion_check(cover, cover.class_v1);
    CHECK(full.neighborhood_size >= 24);
    CHECK(full.holds);

    auto rng = make_rng(31);
    std::uniform_int_distribution<int> size_pick(1, 24);
    for (int trial = 0; trial < 300; ++trial) {
        VertexSet a(sample_from(rng, (trial % 2 ? cover.class_v1 : cover.class_v2).ids(),
                                size_pick(rng)));
        CHECK(expansion_check(cover, a).holds);
    }
    CHECK_THROWS_AS(expansion_check(cover, VertexSet({0, 24})), parameter_error);
}

TEST_CASE("thirds_edge_check in both modes") {
    // K_4 thirds have size 1; any two distinct vertices are adjacent
    auto k4 = analyze_regular(complete_graph(4));
    auto plain = thirds_edge_check(k4, 50, 3);
    CHECK(plain.violations == 0);
    CHECK(plain.min_edges >= 1);
    CHECK(plain.low_r_warning); // r = 3 < 35

    auto u = random_near_ramanujan(36, 5, 21);
    auto cover = double_cover_with_matching(u);
    auto dc = thirds_edge_check(cover, 200, 4);
    CHECK(dc.set_size == 12);
    CHECK(dc.violations == 0);

    // matched thirds meet in at least |T| matching edges
    auto trng = make_rng(8);
    VertexSet t(sample_distinct(trng, 36, 12));
    std::vector<int> a, b;
    for (int x : t) {
        a.push_back(x);
        b.push_back(36 + x);
    }
    CHECK(cross_pair_count(cover.graph, VertexSet(a), VertexSet(b)) >= 12);
}

TEST_CASE("regular report json round trip") {
    auto rep = random_near_ramanujan(20, 4, 5);
    auto j = regular_report_to_json(rep);
    auto back = regular_report_from_json(j);
    CHECK(back.lambda == rep.lambda);
    CHECK(back.graph.edges() == rep.graph.edges());
    CHECK(back.is_ramanujan == rep.is_ramanujan);
}
