#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cachecast/conflict_graph.hpp"

namespace cachecast {

// Proper vertex coloring with dense color ids starting at 0.
struct Coloring {
    std::vector<int> color_of;
    int num_colors = 0;
};

enum class ColoringAlgorithm { Gclc1, Gclc2, Hglc1, Oracle };

const char* to_string(ColoringAlgorithm a);

struct ColoringOutcome {
    Coloring coloring;
    int local_number = 0;  // max over v of |colors(closed out-neighborhood)|
    ColoringAlgorithm algorithm = ColoringAlgorithm::Gclc1;
};

// Per-vertex grouping data derived from a (cache, demand) pair:
//   t_size[v] = |{user(v)} ∪ {u : packet(v) cached by u}|
//   k_size[v] = |{u : packet(v) requested or cached by u}|
// t_sets holds the actual user sets for the strict grouping mode.
struct VertexMeta {
    std::vector<int> t_size;
    std::vector<int> k_size;
    std::vector<std::vector<int>> t_sets;
};

VertexMeta compute_vertex_meta(const NetworkConfig& cfg, const CacheRealization& cache,
                               const DemandRealization& demand, const ConflictGraph& g);

// Throws ColoringValidityError naming an offending edge.
void validate_coloring(const ConflictGraph& g, const Coloring& c);

// Validates, then returns max_v |c(N+(v))|.
int local_number(const ConflictGraph& g, const Coloring& c);

struct Gclc1Options {
    // Group candidates by the cardinality |T_v| (default) or by the exact
    // user set T_v.
    bool strict_set_equality = false;
};

// Greedy constrained local coloring, variant 1: repeatedly seeds the
// lowest-id uncolored vertex and grows an independent set among vertices in
// the same |T_v| group.
ColoringOutcome gclc1(const ConflictGraph& g, const VertexMeta& meta, const Gclc1Options& opts = {});

// Variant 2: one color per distinct requested packet.
ColoringOutcome gclc2(const ConflictGraph& g);

struct HglcParams {
    double a = 0.25;  // candidate-pool width for seed picks
    double b = 0.25;  // candidate-pool width for growth picks
};

// Hierarchical greedy local coloring.  Processes hierarchies i = n..1 of
// vertices grouped by k_size, first harvesting exact-size-i independent sets,
// then growing randomized sets accepting size >= i and demoting failed seeds,
// finishing with local search (kept only when it does not worsen the local
// number).  Deterministic given seed.
ColoringOutcome hglc1(const ConflictGraph& g, const VertexMeta& meta, const HglcParams& params,
                      std::uint64_t seed, bool use_local_search = true);

// Color-class elimination pass: retires a color when every member can move to
// another existing color absent from its neighborhood.  Never increases the
// color count.
Coloring local_search(const ConflictGraph& g, const Coloring& c);

// Exhaustive minimizer of the local number over all proper colorings
// (restricted-growth enumeration).  Guarded to |V| <= 12.
ColoringOutcome brute_force_oracle(const ConflictGraph& g);

// Combined schemes: the better of the two colorings, ties to the first.
ColoringOutcome gclc(const ConflictGraph& g, const VertexMeta& meta, const Gclc1Options& opts = {});
ColoringOutcome hglc(const ConflictGraph& g, const VertexMeta& meta, const HglcParams& params,
                     std::uint64_t seed);

// "<vertex-id> <color-id>" per line.
void write_coloring(std::ostream& os, const Coloring& c);

// JSON summary {algorithm, num_colors, local_number, runtime_ms}.
std::string coloring_summary_json(const ColoringOutcome& outcome, double runtime_ms);

}  // namespace cachecast
