#include "cachecast/coloring.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "cachecast/rng.hpp"

namespace cachecast {

namespace {

inline void or_row(std::uint64_t* dst, const std::uint64_t* src, std::size_t words) {
    for (std::size_t i = 0; i < words; ++i) dst[i] |= src[i];
}

inline bool test_bit(const std::uint64_t* row, int i) {
    return (row[i >> 6] >> (i & 63)) & 1u;
}

inline void set_bit(std::uint64_t* row, int i) { row[i >> 6] |= std::uint64_t{1} << (i & 63); }

// Fenwick tree over member slots; supports k-th-alive selection.
class Fenwick {
public:
    void init(int n) {
        n_ = n;
        tree_.assign(n + 1, 0);
        total_ = 0;
    }
    void add(int i, int delta) {
        total_ += delta;
        for (++i; i <= n_; i += i & -i) tree_[i] += delta;
    }
    int prefix(int count) const {  // sum over [0, count)
        int s = 0;
        for (int i = count; i > 0; i -= i & -i) s += tree_[i];
        return s;
    }
    int total() const { return total_; }
    // Slot of the k-th alive element, 0-based; k < total().
    int select(int k) const {
        int pos = 0, rem = k + 1;
        int log = std::bit_width(static_cast<unsigned>(n_));
        for (int step = 1 << log; step > 0; step >>= 1) {
            if (pos + step <= n_ && tree_[pos + step] < rem) {
                pos += step;
                rem -= tree_[pos];
            }
        }
        return pos;  // tree_ is 1-based; pos is the 0-based slot
    }

private:
    int n_ = 0;
    int total_ = 0;
    std::vector<int> tree_;
};

}  // namespace

const char* to_string(ColoringAlgorithm a) {
    switch (a) {
        case ColoringAlgorithm::Gclc1: return "GCLC1";
        case ColoringAlgorithm::Gclc2: return "GCLC2";
        case ColoringAlgorithm::Hglc1: return "HGLC1";
        case ColoringAlgorithm::Oracle: return "ORACLE";
    }
    return "?";
}

VertexMeta compute_vertex_meta(const NetworkConfig& cfg, const CacheRealization& cache,
                               const DemandRealization& demand, const ConflictGraph& g) {
    (void)demand;
    const int V = g.num_vertices();
    const int P = g.num_packets();
    std::vector<std::vector<int>> cachers(P);
    for (int p = 0; p < P; ++p) {
        PacketId pid = g.distinct_packets()[p];
        for (int u = 0; u < cfg.n; ++u) {
            if (cache.cached(u, pid)) cachers[p].push_back(u);
        }
    }
    VertexMeta meta;
    meta.t_size.resize(V);
    meta.k_size.resize(V);
    meta.t_sets.resize(V);
    for (int v = 0; v < V; ++v) {
        const int p = g.packet_index(v);
        meta.t_size[v] = 1 + static_cast<int>(cachers[p].size());
        meta.k_size[v] =
            static_cast<int>(cachers[p].size() + g.packet_vertices()[p].size());
        std::vector<int> t = cachers[p];
        t.push_back(g.user(v));
        std::sort(t.begin(), t.end());
        meta.t_sets[v] = std::move(t);
    }
    return meta;
}

void validate_coloring(const ConflictGraph& g, const Coloring& c) {
    const int V = g.num_vertices();
    if (static_cast<int>(c.color_of.size()) != V) {
        throw ColoringValidityError("coloring covers " + std::to_string(c.color_of.size()) +
                                    " vertices, graph has " + std::to_string(V));
    }
    if (V == 0) return;
    std::vector<std::vector<int>> classes(c.num_colors);
    for (int v = 0; v < V; ++v) {
        int col = c.color_of[v];
        if (col < 0 || col >= c.num_colors) {
            throw ColoringValidityError("vertex " + std::to_string(v) + " has no valid color");
        }
        classes[col].push_back(v);
    }
    const std::size_t words = g.undirected_matrix().row_words();
    std::vector<std::uint64_t> blocked(words);
    for (int col = 0; col < c.num_colors; ++col) {
        std::fill(blocked.begin(), blocked.end(), 0);
        int prev = -1;
        for (int v : classes[col]) {
            if (test_bit(blocked.data(), v)) {
                // locate a concrete offending neighbor for the message
                int other = prev;
                for (int w : classes[col]) {
                    if (w != v && g.adjacent(w, v)) {
                        other = w;
                        break;
                    }
                }
                throw ColoringValidityError("vertices " + std::to_string(other) + " and " +
                                            std::to_string(v) + " are adjacent but share color " +
                                            std::to_string(col));
            }
            or_row(blocked.data(), g.undirected_matrix().row(v), words);
            prev = v;
        }
    }
}

int local_number(const ConflictGraph& g, const Coloring& c) {
    validate_coloring(g, c);
    const int V = g.num_vertices();
    if (V == 0) return 0;
    const std::size_t words = g.out_matrix().row_words();

    // Group vertices by user; within a group all out-rows typically equal the
    // user's interference template minus the vertex's own-packet copies, which
    // lets the color census be maintained incrementally.
    std::map<int, std::vector<int>> by_user;
    for (int v = 0; v < V; ++v) by_user[g.user(v)].push_back(v);

    std::vector<int> cnt(c.num_colors, 0);
    std::vector<std::uint64_t> tmpl(words), candidate(words);
    std::vector<int> bits;
    int best = 0;

    auto dup_vertices = [&](int v) -> const std::vector<int>& {
        return g.packet_vertices()[g.packet_index(v)];
    };
    auto build_closure = [&](int v, std::vector<std::uint64_t>& dst) {
        std::memcpy(dst.data(), g.out_matrix().row(v), words * sizeof(std::uint64_t));
        for (int w : dup_vertices(v)) set_bit(dst.data(), w);
    };

    for (auto& [user, vs] : by_user) {
        (void)user;
        build_closure(vs.front(), tmpl);
        bits.clear();
        collect_bits(tmpl.data(), words, V, bits);
        int distinct = 0;
        for (int w : bits) {
            if (cnt[c.color_of[w]]++ == 0) ++distinct;
        }
        for (int v : vs) {
            build_closure(v, candidate);
            if (std::memcmp(candidate.data(), tmpl.data(), words * sizeof(std::uint64_t)) == 0) {
                // N+(v) = template minus same-packet copies, plus v itself
                int d = distinct;
                for (int w : dup_vertices(v)) {
                    if (--cnt[c.color_of[w]] == 0) --d;
                }
                if (cnt[c.color_of[v]]++ == 0) ++d;
                best = std::max(best, d);
                // undo
                --cnt[c.color_of[v]];
                for (int w : dup_vertices(v)) ++cnt[c.color_of[w]];
            } else {
                // irregular row (synthetic graphs): count directly
                std::vector<int> nb;
                collect_bits(g.out_matrix().row(v), words, V, nb);
                std::vector<char> seen(c.num_colors, 0);
                int d = 0;
                if (!seen[c.color_of[v]]) {
                    seen[c.color_of[v]] = 1;
                    ++d;
                }
                for (int w : nb) {
                    if (!seen[c.color_of[w]]) {
                        seen[c.color_of[w]] = 1;
                        ++d;
                    }
                }
                best = std::max(best, d);
            }
        }
        for (int w : bits) cnt[c.color_of[w]]--;
    }
    return best;
}

ColoringOutcome gclc1(const ConflictGraph& g, const VertexMeta& meta, const Gclc1Options& opts) {
    const int V = g.num_vertices();
    ColoringOutcome out;
    out.algorithm = ColoringAlgorithm::Gclc1;
    out.coloring.color_of.assign(V, -1);
    if (V == 0) return out;
    if (static_cast<int>(meta.t_size.size()) != V) {
        throw InvalidInputError("gclc1: meta does not match graph");
    }

    // Group vertices that may share a class.
    std::vector<int> bucket_of(V);
    std::vector<std::vector<int>> buckets;
    if (opts.strict_set_equality) {
        if (static_cast<int>(meta.t_sets.size()) != V) {
            throw InvalidInputError("gclc1: strict mode requires t_sets");
        }
        std::map<std::vector<int>, int> ids;
        for (int v = 0; v < V; ++v) {
            auto [it, inserted] = ids.emplace(meta.t_sets[v], static_cast<int>(buckets.size()));
            if (inserted) buckets.emplace_back();
            bucket_of[v] = it->second;
            buckets[it->second].push_back(v);
        }
    } else {
        std::map<int, int> ids;
        for (int v = 0; v < V; ++v) {
            auto [it, inserted] = ids.emplace(meta.t_size[v], static_cast<int>(buckets.size()));
            if (inserted) buckets.emplace_back();
            bucket_of[v] = it->second;
            buckets[it->second].push_back(v);
        }
    }

    const std::size_t words = g.undirected_matrix().row_words();
    std::vector<std::uint64_t> blocked(words);
    auto& color_of = out.coloring.color_of;
    int colors = 0;
    for (int seed = 0; seed < V; ++seed) {
        if (color_of[seed] >= 0) continue;
        const int c = colors++;
        std::fill(blocked.begin(), blocked.end(), 0);
        color_of[seed] = c;
        or_row(blocked.data(), g.undirected_matrix().row(seed), words);
        for (int v : buckets[bucket_of[seed]]) {
            if (color_of[v] >= 0 || v == seed) continue;
            if (!test_bit(blocked.data(), v)) {
                color_of[v] = c;
                or_row(blocked.data(), g.undirected_matrix().row(v), words);
            }
        }
    }
    out.coloring.num_colors = colors;
    out.local_number = local_number(g, out.coloring);
    return out;
}

ColoringOutcome gclc2(const ConflictGraph& g) {
    const int V = g.num_vertices();
    ColoringOutcome out;
    out.algorithm = ColoringAlgorithm::Gclc2;
    out.coloring.color_of.resize(V);
    for (int v = 0; v < V; ++v) out.coloring.color_of[v] = g.packet_index(v);
    out.coloring.num_colors = g.num_packets();
    out.local_number = V == 0 ? 0 : local_number(g, out.coloring);
    return out;
}

ColoringOutcome hglc1(const ConflictGraph& g, const VertexMeta& meta, const HglcParams& params,
                      std::uint64_t seed, bool use_local_search) {
    if (params.a < 0.0 || params.a > 1.0 || params.b < 0.0 || params.b > 1.0) {
        throw ConfigError("hglc params a, b must lie in [0, 1]");
    }
    const int V = g.num_vertices();
    ColoringOutcome out;
    out.algorithm = ColoringAlgorithm::Hglc1;
    out.coloring.color_of.assign(V, -1);
    if (V == 0) return out;
    if (static_cast<int>(meta.k_size.size()) != V) {
        throw InvalidInputError("hglc1: meta does not match graph");
    }

    int levels = 0;
    for (int v = 0; v < V; ++v) {
        if (meta.k_size[v] < 1) throw InvalidInputError("hglc1: k_size must be >= 1");
        levels = std::max(levels, meta.k_size[v]);
    }

    std::vector<std::vector<int>> natives(levels + 1);
    for (int v = 0; v < V; ++v) natives[meta.k_size[v]].push_back(v);

    Rng rng(seed_combine(seed, 0x68676c6331ULL));
    auto& color_of = out.coloring.color_of;
    int colors = 0;

    const std::size_t words = g.undirected_matrix().row_words();
    std::vector<std::uint64_t> blocked(words);
    std::vector<int> in_set_epoch(V, -1);
    int epoch = 0;

    std::vector<int> carried;  // vertices demoted into the next hierarchy
    for (int level = levels; level >= 1; --level) {
        // Hierarchy membership: uncolored natives plus everything demoted
        // from above, ordered by (k_size, id) so the candidate windows are
        // prefixes.
        std::vector<int> members = natives[level];
        members.insert(members.end(), carried.begin(), carried.end());
        carried.clear();
        if (members.empty()) continue;
        std::sort(members.begin(), members.end(), [&](int x, int y) {
            if (meta.k_size[x] != meta.k_size[y]) return meta.k_size[x] < meta.k_size[y];
            return x < y;
        });

        // Phase 1: exact-size independent sets among vertices whose k_size
        // equals the hierarchy index.
        std::vector<int> exact;
        for (int v : members) {
            if (meta.k_size[v] == level) exact.push_back(v);
        }
        std::vector<int> group;
        for (int v : exact) {
            if (color_of[v] >= 0) continue;
            ++epoch;
            group.clear();
            group.push_back(v);
            in_set_epoch[v] = epoch;
            std::fill(blocked.begin(), blocked.end(), 0);
            or_row(blocked.data(), g.undirected_matrix().row(v), words);
            if (static_cast<int>(group.size()) < level) {
                for (int w : exact) {
                    if (w == v || color_of[w] >= 0 || in_set_epoch[w] == epoch) continue;
                    if (!test_bit(blocked.data(), w)) {
                        group.push_back(w);
                        in_set_epoch[w] = epoch;
                        or_row(blocked.data(), g.undirected_matrix().row(w), words);
                        if (static_cast<int>(group.size()) == level) break;
                    }
                }
            }
            if (static_cast<int>(group.size()) == level) {
                const int c = colors++;
                for (int w : group) color_of[w] = c;
            }
        }

        // Phase 2: randomized growth from the low-k window; sets of size
        // >= level are colored, otherwise the seed drops a hierarchy.
        std::vector<int> slot_vertex, slot_k;
        for (int v : members) {
            if (color_of[v] < 0) {
                slot_vertex.push_back(v);
                slot_k.push_back(meta.k_size[v]);
            }
        }
        const int S = static_cast<int>(slot_vertex.size());
        Fenwick alive;
        alive.init(S);
        for (int i = 0; i < S; ++i) alive.add(i, 1);

        auto window_count = [&](double frac) {
            const int kmin = slot_k[alive.select(0)];
            const int kmax = slot_k[alive.select(alive.total() - 1)];
            const int thr = kmin + static_cast<int>(std::floor(frac * (kmax - kmin) + 1e-9));
            // first slot with k > thr
            int hi = static_cast<int>(
                std::upper_bound(slot_k.begin(), slot_k.end(), thr) - slot_k.begin());
            return alive.prefix(hi);
        };

        std::vector<int> examined, grown;
        while (alive.total() > 0) {
            const int wcount = window_count(params.a);
            const int spos = alive.select(static_cast<int>(rng.below(wcount)));
            const int seed_v = slot_vertex[spos];
            alive.add(spos, -1);

            ++epoch;
            grown.clear();
            grown.push_back(spos);
            in_set_epoch[seed_v] = epoch;
            std::fill(blocked.begin(), blocked.end(), 0);
            or_row(blocked.data(), g.undirected_matrix().row(seed_v), words);

            examined.clear();
            while (alive.total() > 0) {
                const int wc = window_count(params.b);
                const int pos = alive.select(static_cast<int>(rng.below(wc)));
                alive.add(pos, -1);
                examined.push_back(pos);
                const int w = slot_vertex[pos];
                if (!test_bit(blocked.data(), w)) {
                    grown.push_back(pos);
                    in_set_epoch[w] = epoch;
                    or_row(blocked.data(), g.undirected_matrix().row(w), words);
                }
            }

            if (static_cast<int>(grown.size()) >= level) {
                const int c = colors++;
                for (int pos : grown) color_of[slot_vertex[pos]] = c;
                for (int pos : examined) {
                    if (in_set_epoch[slot_vertex[pos]] != epoch) alive.add(pos, 1);
                }
            } else {
                assert(level > 1 && "size-1 sets always qualify at hierarchy 1");
                carried.push_back(seed_v);
                for (int pos : examined) alive.add(pos, 1);
            }
        }
    }

    out.coloring.num_colors = colors;
    out.local_number = local_number(g, out.coloring);

    if (use_local_search) {
        Coloring searched = local_search(g, out.coloring);
        int nu = local_number(g, searched);
        if (nu <= out.local_number) {
            out.coloring = std::move(searched);
            out.local_number = nu;
        }
    }
    return out;
}

Coloring local_search(const ConflictGraph& g, const Coloring& input) {
    validate_coloring(g, input);
    const int V = g.num_vertices();
    Coloring c = input;
    if (V == 0 || c.num_colors <= 1) return c;

    std::vector<std::vector<int>> classes(c.num_colors);
    for (int v = 0; v < V; ++v) classes[c.color_of[v]].push_back(v);
    std::vector<char> alive(c.num_colors, 1);
    int alive_count = c.num_colors;

    const std::size_t words = g.undirected_matrix().row_words();
    std::vector<int> stamp(c.num_colors, -1);
    std::vector<int> nbrs;
    std::vector<std::pair<int, int>> moves;

    for (int col = 0; col < c.num_colors && alive_count > 1; ++col) {
        if (!alive[col]) continue;
        moves.clear();
        bool all_movable = true;
        for (std::size_t idx = 0; idx < classes[col].size() && all_movable; ++idx) {
            const int v = classes[col][idx];
            nbrs.clear();
            collect_bits(g.undirected_matrix().row(v), words, V, nbrs);
            for (int w : nbrs) stamp[c.color_of[w]] = v;
            int target = -1;
            for (int cand = 0; cand < c.num_colors; ++cand) {
                if (cand == col || !alive[cand] || stamp[cand] == v) continue;
                target = cand;
                break;
            }
            if (target < 0) {
                all_movable = false;
            } else {
                moves.emplace_back(v, target);
            }
        }
        if (all_movable) {
            for (auto [v, target] : moves) {
                c.color_of[v] = target;
                classes[target].push_back(v);
            }
            classes[col].clear();
            alive[col] = 0;
            --alive_count;
        }
    }

    // compact surviving colors, preserving order
    std::vector<int> remap(c.num_colors, -1);
    int next = 0;
    for (int col = 0; col < c.num_colors; ++col) {
        if (alive[col]) remap[col] = next++;
    }
    for (int v = 0; v < V; ++v) c.color_of[v] = remap[c.color_of[v]];
    c.num_colors = next;
    return c;
}

namespace {

struct OracleState {
    const ConflictGraph* g;
    int V;
    std::vector<std::uint16_t> und_mask;       // undirected adjacency as masks
    std::vector<std::vector<int>> inplus_of;   // vertices whose N+ contains v
    std::vector<int> color;
    std::vector<std::uint16_t> closure_colors; // colors seen in N+(v) so far
    int best_nu;
    std::vector<int> best_color;
    int best_count;

    void dfs(int v, int used) {
        if (v == V) {
            int nu = 0;
            for (int w = 0; w < V; ++w) nu = std::max(nu, std::popcount(closure_colors[w]));
            if (nu < best_nu) {
                best_nu = nu;
                best_color = color;
                best_count = used;
            }
            return;
        }
        std::uint16_t forbidden = 0;
        for (int w = 0; w < v; ++w) {
            if (und_mask[v] & (std::uint16_t{1} << w)) forbidden |= std::uint16_t{1} << color[w];
        }
        const int limit = std::min(used, V - 1);  // allow one fresh color
        for (int cand = 0; cand <= limit; ++cand) {
            if (forbidden & (std::uint16_t{1} << cand)) continue;
            color[v] = cand;
            const std::uint16_t bit = std::uint16_t{1} << cand;
            bool viable = true;
            std::vector<std::pair<int, std::uint16_t>> undo;
            for (int s : inplus_of[v]) {
                if (!(closure_colors[s] & bit)) {
                    undo.emplace_back(s, closure_colors[s]);
                    closure_colors[s] |= bit;
                    if (std::popcount(closure_colors[s]) >= best_nu) viable = false;
                }
            }
            if (viable) dfs(v + 1, std::max(used, cand + 1));
            for (auto& [s, old] : undo) closure_colors[s] = old;
        }
        color[v] = -1;
    }
};

}  // namespace

ColoringOutcome brute_force_oracle(const ConflictGraph& g) {
    const int V = g.num_vertices();
    if (V > 12) {
        throw SizeError("brute_force_oracle: graph has " + std::to_string(V) +
                        " vertices; limit is 12");
    }
    ColoringOutcome out;
    out.algorithm = ColoringAlgorithm::Oracle;
    if (V == 0) return out;

    OracleState st;
    st.g = &g;
    st.V = V;
    st.und_mask.assign(V, 0);
    st.inplus_of.assign(V, {});
    for (int v = 0; v < V; ++v) {
        for (int w = 0; w < V; ++w) {
            if (w != v && g.adjacent(v, w)) st.und_mask[v] |= std::uint16_t{1} << w;
        }
        st.inplus_of[v].push_back(v);
        for (int w : g.in_neighbors(v)) st.inplus_of[v].push_back(w);
    }
    st.color.assign(V, -1);
    st.closure_colors.assign(V, 0);
    st.best_nu = V + 1;
    st.best_count = 0;
    st.dfs(0, 0);

    out.coloring.color_of = st.best_color;
    out.coloring.num_colors = st.best_count;
    out.local_number = st.best_nu;
    validate_coloring(g, out.coloring);
    return out;
}

ColoringOutcome gclc(const ConflictGraph& g, const VertexMeta& meta, const Gclc1Options& opts) {
    ColoringOutcome first = gclc1(g, meta, opts);
    ColoringOutcome second = gclc2(g);
    return first.local_number <= second.local_number ? first : second;
}

ColoringOutcome hglc(const ConflictGraph& g, const VertexMeta& meta, const HglcParams& params,
                     std::uint64_t seed) {
    ColoringOutcome first = hglc1(g, meta, params, seed);
    ColoringOutcome second = gclc2(g);
    return first.local_number <= second.local_number ? first : second;
}

void write_coloring(std::ostream& os, const Coloring& c) {
    for (std::size_t v = 0; v < c.color_of.size(); ++v) {
        os << v << " " << c.color_of[v] << "\n";
    }
}

std::string coloring_summary_json(const ColoringOutcome& outcome, double runtime_ms) {
    nlohmann::json j;
    j["algorithm"] = to_string(outcome.algorithm);
    j["num_colors"] = outcome.coloring.num_colors;
    j["local_number"] = outcome.local_number;
    j["runtime_ms"] = runtime_ms;
    return j.dump();
}

}  // namespace cachecast
