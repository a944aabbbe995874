#include <doctest.h>

#include <numeric>
#include <sstream>

#include "cachecast/coloring.hpp"
#include "helpers.hpp"

using namespace cachecast;

TEST_SUITE_BEGIN("coloring");

namespace {

// Packet-per-color reference coloring of the tiny instance (colors ordered by
// packet: A1=0, A2=1, A3=2, B1=3, B2=4; vertices 0..5 as in the graph tests).
Coloring tiny_packet_coloring() {
    Coloring c;
    c.color_of = {1, 2, 0, 2, 3, 4};
    c.num_colors = 5;
    return c;
}

}  // namespace

TEST_CASE("local_number: packet coloring of the tiny instance scores 4 with 5 colors") {
    auto t = testutil::make_example_instance();
    Coloring c = tiny_packet_coloring();
    CHECK(c.num_colors == 5);
    CHECK(local_number(t.graph, c) == 4);
}

TEST_CASE("local_number: one color on an edgeless graph") {
    auto g = ConflictGraph::from_edges(4, {});
    Coloring c;
    c.color_of = {0, 0, 0, 0};
    c.num_colors = 1;
    CHECK(local_number(g, c) == 1);
}

TEST_CASE("local_number: rainbow coloring scores 1 + max out-degree") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        auto inst = testutil::random_instance(seed, 4, 5, 4);
        const int V = inst.graph.num_vertices();
        if (V == 0) continue;
        Coloring c;
        c.color_of.resize(V);
        std::iota(c.color_of.begin(), c.color_of.end(), 0);
        c.num_colors = V;
        int maxdeg = 0;
        for (int v = 0; v < V; ++v) {
            maxdeg = std::max(maxdeg, static_cast<int>(inst.graph.out_neighbors(v).size()));
        }
        CHECK(local_number(inst.graph, c) == 1 + maxdeg);
    }
}

TEST_CASE("local_number: agrees with direct evaluation on random instances") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto inst = testutil::random_instance(seed, 5, 6, 4, 3);
        if (inst.graph.num_vertices() == 0) continue;
        auto out = gclc1(inst.graph, inst.meta);
        CHECK(out.local_number == testutil::slow_local_number(inst.graph, out.coloring));
        auto out2 = gclc2(inst.graph);
        CHECK(out2.local_number == testutil::slow_local_number(inst.graph, out2.coloring));
    }
}

TEST_CASE("local_number: invalid coloring raises naming an edge") {
    auto t = testutil::make_example_instance();
    Coloring bad;
    bad.color_of.assign(6, 0);
    bad.num_colors = 1;
    CHECK_THROWS_WITH_AS(local_number(t.graph, bad),
                         doctest::Contains("adjacent"), ColoringValidityError);
}

TEST_CASE("gclc1: tiny instance gets 4 colors and local number 3") {
    auto t = testutil::make_example_instance();
    auto out = gclc1(t.graph, t.meta);
    CHECK(out.coloring.num_colors == 4);
    CHECK(out.local_number == 3);
    CHECK(testutil::coloring_is_valid(t.graph, out.coloring));
    // strict set grouping merges further
    auto strict = gclc1(t.graph, t.meta, Gclc1Options{true});
    CHECK(strict.coloring.num_colors == 3);
    CHECK(strict.local_number == 3);
}

TEST_CASE("gclc1: edgeless graph with equal group sizes uses one color") {
    auto g = ConflictGraph::from_edges(6, {});
    VertexMeta meta;
    meta.t_size.assign(6, 2);
    meta.k_size.assign(6, 1);
    auto out = gclc1(g, meta);
    CHECK(out.coloring.num_colors == 1);
    CHECK(out.local_number == 1);
}

TEST_CASE("gclc1: complete graph needs |V| colors") {
    auto inst = testutil::complete_instance(6);
    auto out = gclc1(inst.graph, inst.meta);
    CHECK(out.coloring.num_colors == 6);
    CHECK(out.local_number == 6);
}

TEST_CASE("gclc1: deterministic") {
    auto inst = testutil::random_instance(77, 5, 6, 4);
    auto a = gclc1(inst.graph, inst.meta);
    auto b = gclc1(inst.graph, inst.meta);
    CHECK(a.coloring.color_of == b.coloring.color_of);
}

TEST_CASE("gclc2: tiny instance uses one color per distinct packet") {
    auto t = testutil::make_example_instance();
    auto out = gclc2(t.graph);
    CHECK(out.coloring.num_colors == 5);
    CHECK(out.local_number == 4);
}

TEST_CASE("gclc2: single shared packet collapses to one color") {
    NetworkConfig cfg;
    cfg.m = 1;
    cfg.n = 3;
    cfg.B = 1;
    cfg.M = {0.0, 0.0, 0.0};
    cfg.L = {1, 1, 1};
    cfg.Q = {1.0, 1.0, 1.0};
    cfg.P = {1.0, 1.0, 1.0};
    cfg.validate();
    CacheRealization cache(3, 1, 1);
    auto w = DemandRealization::from_requests(cfg, {{1}, {1}, {1}}, cache);
    auto g = ConflictGraph::build(cfg, cache, w);
    auto out = gclc2(g);
    CHECK(out.coloring.num_colors == 1);
    CHECK(out.local_number == 1);
}

TEST_CASE("gclc2: color count equals the distinct packet count") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        auto inst = testutil::random_instance(seed, 4, 5, 4, 3);
        auto out = gclc2(inst.graph);
        CHECK(out.coloring.num_colors == inst.graph.num_packets());
        CHECK(testutil::coloring_is_valid(inst.graph, out.coloring));
    }
}

TEST_CASE("hglc1: tiny instance reaches local number 3") {
    auto t = testutil::make_example_instance();
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto out = hglc1(t.graph, t.meta, HglcParams{}, seed);
        CHECK(testutil::coloring_is_valid(t.graph, out.coloring));
        CHECK(out.local_number == 3);
        CHECK(out.coloring.num_colors == 3);
    }
}

TEST_CASE("hglc1: edgeless shared-packet hierarchy packs groups of n") {
    const int n = 4, copies = 3;  // 12 vertices, all k_size = n
    auto g = ConflictGraph::from_edges(n * copies, {});
    VertexMeta meta;
    meta.t_size.assign(n * copies, 1);
    meta.k_size.assign(n * copies, n);
    auto raw = hglc1(g, meta, HglcParams{}, 5, false);
    CHECK(raw.coloring.num_colors == copies);
    CHECK(raw.local_number == 1);
    // the closing search pass then merges the independent classes
    auto searched = hglc1(g, meta, HglcParams{}, 5, true);
    CHECK(searched.coloring.num_colors == 1);
    CHECK(searched.local_number == 1);
}

TEST_CASE("hglc1: complete graph colors every vertex, also at a=b=1") {
    auto inst = testutil::complete_instance(7);
    auto out = hglc1(inst.graph, inst.meta, HglcParams{1.0, 1.0}, 9);
    CHECK(out.coloring.num_colors == 7);
    CHECK(out.local_number == 7);
}

TEST_CASE("hglc1: deterministic given seed") {
    auto inst = testutil::random_instance(4242, 5, 6, 5);
    auto a = hglc1(inst.graph, inst.meta, HglcParams{}, 11);
    auto b = hglc1(inst.graph, inst.meta, HglcParams{}, 11);
    CHECK(a.coloring.color_of == b.coloring.color_of);
}

TEST_CASE("hglc1: local search never worsens the local number") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        auto inst = testutil::random_instance(seed * 13 + 1, 5, 8, 5, 2);
        if (inst.graph.num_vertices() == 0) continue;
        auto raw = hglc1(inst.graph, inst.meta, HglcParams{}, seed, false);
        auto full = hglc1(inst.graph, inst.meta, HglcParams{}, seed, true);
        CHECK(full.local_number <= raw.local_number);
    }
}

TEST_CASE("hglc1: params outside [0,1] rejected") {
    auto t = testutil::make_example_instance();
    CHECK_THROWS_AS(hglc1(t.graph, t.meta, HglcParams{1.5, 0.0}, 1), ConfigError);
}

TEST_CASE("local_search: chromatic coloring of a complete graph is unchanged") {
    auto inst = testutil::complete_instance(5);
    Coloring c;
    c.color_of = {0, 1, 2, 3, 4};
    c.num_colors = 5;
    auto after = local_search(inst.graph, c);
    CHECK(after.color_of == c.color_of);
    CHECK(after.num_colors == 5);
}

TEST_CASE("local_search: path graph drops to two colors") {
    auto g = ConflictGraph::from_edges(3, {{0, 1}, {1, 2}});
    Coloring c;
    c.color_of = {0, 1, 2};
    c.num_colors = 3;
    auto after = local_search(g, c);
    CHECK(after.num_colors == 2);
    CHECK(after.color_of[0] == after.color_of[2]);
    CHECK(after.color_of[0] != after.color_of[1]);
    CHECK(testutil::coloring_is_valid(g, after));
}

TEST_CASE("local_search: validity and monotone color count on random inputs") {
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 500; ++seed) {
        auto inst = testutil::random_instance(seed, 5, 6, 4, 2);
        if (inst.graph.num_vertices() == 0) continue;
        auto base = gclc2(inst.graph);
        auto after = local_search(inst.graph, base.coloring);
        CHECK(after.num_colors <= base.coloring.num_colors);
        CHECK(testutil::coloring_is_valid(inst.graph, after));
        ++checked;
    }
}

TEST_CASE("local_search: rejects invalid input") {
    auto t = testutil::make_example_instance();
    Coloring bad;
    bad.color_of.assign(6, 0);
    bad.num_colors = 1;
    CHECK_THROWS_AS(local_search(t.graph, bad), ColoringValidityError);
}

TEST_CASE("oracle: tiny instance optimum is 3") {
    // {A2@1, A1@2} can share a color (each side cached at the other user),
    // {A3@1, A3@2} share their packet, and the triangle {A2@1, B1@3, B2@3}
    // forces at least 3 colors in user 3's closed out-neighborhood.
    auto t = testutil::make_example_instance();
    auto out = brute_force_oracle(t.graph);
    CHECK(out.local_number == 3);
    CHECK(testutil::coloring_is_valid(t.graph, out.coloring));
}

TEST_CASE("oracle: edgeless graph scores 1") {
    auto g = ConflictGraph::from_edges(5, {});
    auto out = brute_force_oracle(g);
    CHECK(out.local_number == 1);
    CHECK(out.coloring.num_colors == 1);
}

TEST_CASE("oracle: complete graph on five vertices scores 5") {
    auto inst = testutil::complete_instance(5);
    auto out = brute_force_oracle(inst.graph);
    CHECK(out.local_number == 5);
}

TEST_CASE("oracle: refuses more than 12 vertices") {
    auto g = ConflictGraph::from_edges(13, {});
    CHECK_THROWS_AS(brute_force_oracle(g), SizeError);
}

TEST_CASE("greedy algorithms never beat the oracle") {
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 60; ++seed) {
        auto inst = testutil::random_instance(seed, 3, 3, 3);
        const int V = inst.graph.num_vertices();
        if (V == 0 || V > 10) continue;
        auto best = brute_force_oracle(inst.graph);
        CHECK(gclc1(inst.graph, inst.meta).local_number >= best.local_number);
        CHECK(gclc2(inst.graph).local_number >= best.local_number);
        CHECK(hglc1(inst.graph, inst.meta, HglcParams{}, seed).local_number >=
              best.local_number);
        ++checked;
    }
}

TEST_CASE("combined schemes take the better variant, ties to variant 1") {
    auto t = testutil::make_example_instance();
    auto g = gclc(t.graph, t.meta);
    CHECK(g.local_number == 3);
    CHECK(g.algorithm == ColoringAlgorithm::Gclc1);
    auto h = hglc(t.graph, t.meta, HglcParams{}, 3);
    CHECK(h.local_number == 3);
    CHECK(h.algorithm == ColoringAlgorithm::Hglc1);
}

TEST_CASE("combined schemes never exceed the packet-wise coloring") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto inst = testutil::random_instance(seed + 500, 4, 6, 4, 2);
        if (inst.graph.num_vertices() == 0) continue;
        int base = gclc2(inst.graph).local_number;
        CHECK(gclc(inst.graph, inst.meta).local_number <= base);
        CHECK(hglc(inst.graph, inst.meta, HglcParams{}, seed).local_number <= base);
    }
}

TEST_CASE("hierarchical beats plain greedy on average at 25% cache") {
    NetworkConfig cfg;
    cfg.m = 12;
    cfg.n = 8;
    cfg.B = 40;
    cfg.M.assign(8, 3.0);
    cfg.L.assign(8, 1);
    cfg.Q.assign(static_cast<std::size_t>(8) * 12, 1.0 / 12);
    cfg.P.assign(static_cast<std::size_t>(8) * 12, 1.0 / 12);
    cfg.validate();
    double sum_h = 0, sum_g = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto cache = rap_place(cfg, 900 + trial);
        auto demand = sample_demands(cfg, 900 + trial, cache);
        auto graph = ConflictGraph::build(cfg, cache, demand);
        auto meta = compute_vertex_meta(cfg, cache, demand, graph);
        sum_h += hglc1(graph, meta, HglcParams{}, trial).local_number;
        sum_g += gclc1(graph, meta).local_number;
    }
    CHECK(sum_h <= sum_g);
}

TEST_CASE("coloring dump and summary formats") {
    Coloring c;
    c.color_of = {0, 1, 0};
    c.num_colors = 2;
    std::ostringstream os;
    write_coloring(os, c);
    CHECK(os.str() == "0 0\n1 1\n2 0\n");
    ColoringOutcome out;
    out.coloring = c;
    out.local_number = 2;
    out.algorithm = ColoringAlgorithm::Gclc2;
    auto j = coloring_summary_json(out, 1.5);
    CHECK(j.find("\"algorithm\":\"GCLC2\"") != std::string::npos);
    CHECK(j.find("\"num_colors\":2") != std::string::npos);
}

TEST_SUITE_END();
