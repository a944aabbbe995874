#pragma once

// Shared test fixtures and independent oracles.  Everything here is
// deliberately brute force so it cannot share bugs with the library paths it
// checks.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "cachecast/coloring.hpp"
#include "cachecast/conflict_graph.hpp"
#include "cachecast/model.hpp"
#include "cachecast/rng.hpp"

namespace testutil {

using namespace cachecast;

// Three users, three files (1=A, 2=B, 3=C), three packets per file.  User u
// caches packet u of every file; users request A, A, B.  The canonical tiny
// instance used across the suites.
struct TinyInstance {
    NetworkConfig cfg;
    CacheRealization cache;
    DemandRealization demand;
    ConflictGraph graph;
    VertexMeta meta;
};

inline TinyInstance make_example_instance() {
    TinyInstance t;
    t.cfg.m = 3;
    t.cfg.n = 3;
    t.cfg.B = 3;
    t.cfg.M = {1.0, 1.0, 1.0};
    t.cfg.L = {1, 1, 1};
    t.cfg.Q.assign(9, 1.0 / 3.0);
    t.cfg.P.assign(9, 1.0 / 3.0);
    t.cfg.validate();
    std::vector<std::vector<std::vector<int>>> sets(3,
        std::vector<std::vector<int>>(3));
    for (int u = 0; u < 3; ++u) {
        for (int f = 0; f < 3; ++f) sets[u][f] = {u + 1};
    }
    t.cache = CacheRealization::from_sets(t.cfg, sets);
    t.demand = DemandRealization::from_requests(t.cfg, {{1}, {1}, {2}}, t.cache);
    t.graph = ConflictGraph::build(t.cfg, t.cache, t.demand);
    t.meta = compute_vertex_meta(t.cfg, t.cache, t.demand, t.graph);
    return t;
}

// Random small instance: n <= max_n users, m <= max_m files, B <= max_B.
struct RandomInstance {
    NetworkConfig cfg;
    CacheRealization cache;
    DemandRealization demand;
    ConflictGraph graph;
    VertexMeta meta;
};

inline NetworkConfig random_config(Rng& rng, int max_n, int max_m, int max_B, int max_L = 2) {
    NetworkConfig cfg;
    cfg.n = 1 + static_cast<int>(rng.below(max_n));
    cfg.m = 1 + static_cast<int>(rng.below(max_m));
    cfg.B = 1 + static_cast<int>(rng.below(max_B));
    cfg.M.resize(cfg.n);
    cfg.L.resize(cfg.n);
    for (int u = 0; u < cfg.n; ++u) {
        cfg.M[u] = static_cast<double>(rng.below(cfg.m + 1));
        cfg.L[u] = 1 + static_cast<int>(rng.below(std::min(cfg.m, max_L)));
    }
    cfg.Q.resize(static_cast<std::size_t>(cfg.n) * cfg.m);
    cfg.P.resize(static_cast<std::size_t>(cfg.n) * cfg.m);
    for (int u = 0; u < cfg.n; ++u) {
        double qsum = 0.0;
        std::vector<double> qs(cfg.m);
        for (int f = 0; f < cfg.m; ++f) {
            qs[f] = 0.05 + rng.unit();
            qsum += qs[f];
        }
        for (int f = 0; f < cfg.m; ++f) {
            cfg.Q[static_cast<std::size_t>(u) * cfg.m + f] = qs[f] / qsum;
        }
        // caching distribution: uniform respects the 1/M cap for M <= m
        for (int f = 0; f < cfg.m; ++f) {
            cfg.P[static_cast<std::size_t>(u) * cfg.m + f] = 1.0 / cfg.m;
        }
    }
    cfg.validate();
    return cfg;
}

inline RandomInstance random_instance(std::uint64_t seed, int max_n, int max_m, int max_B,
                                      int max_L = 2) {
    Rng rng(seed);
    RandomInstance inst;
    inst.cfg = random_config(rng, max_n, max_m, max_B, max_L);
    inst.cache = rap_place(inst.cfg, rng.next());
    inst.demand = sample_demands(inst.cfg, rng.next(), inst.cache);
    inst.graph = ConflictGraph::build(inst.cfg, inst.cache, inst.demand);
    inst.meta = compute_vertex_meta(inst.cfg, inst.cache, inst.demand, inst.graph);
    return inst;
}

// Edge oracle: the interference rule applied pairwise from first principles.
inline long long brute_force_edge_count(const NetworkConfig& cfg, const CacheRealization& cache,
                                        const ConflictGraph& g) {
    long long edges = 0;
    const int V = g.num_vertices();
    for (int a = 0; a < V; ++a) {
        for (int b = 0; b < V; ++b) {
            if (a == b) continue;
            PacketId pb = g.packet(b);
            if (pb == g.packet(a)) continue;
            if (!cache.cached(g.user(a), pb)) ++edges;
        }
    }
    (void)cfg;
    return edges;
}

// Direct local-number evaluation from neighbor lists.
inline int slow_local_number(const ConflictGraph& g, const Coloring& c) {
    int best = 0;
    for (int v = 0; v < g.num_vertices(); ++v) {
        std::set<int> colors;
        colors.insert(c.color_of[v]);
        for (int w : g.out_neighbors(v)) colors.insert(c.color_of[w]);
        best = std::max(best, static_cast<int>(colors.size()));
    }
    return best;
}

inline bool coloring_is_valid(const ConflictGraph& g, const Coloring& c) {
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (c.color_of[v] < 0 || c.color_of[v] >= c.num_colors) return false;
        for (int w : g.undirected_neighbors(v)) {
            if (c.color_of[w] == c.color_of[v]) return false;
        }
    }
    return true;
}

// Complete instance on k vertices: k users, zero cache, distinct packets.
inline RandomInstance complete_instance(int k) {
    RandomInstance inst;
    NetworkConfig& cfg = inst.cfg;
    cfg.n = k;
    cfg.m = k;
    cfg.B = 1;
    cfg.M.assign(k, 0.0);
    cfg.L.assign(k, 1);
    cfg.Q.assign(static_cast<std::size_t>(k) * k, 0.0);
    cfg.P.assign(static_cast<std::size_t>(k) * k, 1.0 / k);
    for (int u = 0; u < k; ++u) cfg.Q[static_cast<std::size_t>(u) * k + u] = 1.0;
    cfg.validate();
    inst.cache = CacheRealization(k, k, 1);
    std::vector<std::vector<int>> requests(k);
    for (int u = 0; u < k; ++u) requests[u] = {u + 1};
    inst.demand = DemandRealization::from_requests(cfg, requests, inst.cache);
    inst.graph = ConflictGraph::build(cfg, inst.cache, inst.demand);
    inst.meta = compute_vertex_meta(cfg, inst.cache, inst.demand, inst.graph);
    return inst;
}

}  // namespace testutil
