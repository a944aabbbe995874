#include "cachecast/conflict_graph.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <map>
#include <ostream>

namespace cachecast {

long long BitMatrix::count_bits() const {
    long long total = 0;
    for (std::uint64_t w : data_) total += std::popcount(w);
    return total;
}

void collect_bits(const std::uint64_t* row, std::size_t row_words, int n, std::vector<int>& out) {
    for (std::size_t w = 0; w < row_words; ++w) {
        std::uint64_t bits = row[w];
        while (bits) {
            int b = std::countr_zero(bits);
            int idx = static_cast<int>(w * 64 + b);
            if (idx < n) out.push_back(idx);
            bits &= bits - 1;
        }
    }
}

int ConflictGraph::checked(int v) const {
    if (v < 0 || v >= num_vertices()) {
        throw InvalidInputError("vertex id " + std::to_string(v) + " out of range");
    }
    return v;
}

ConflictGraph ConflictGraph::build(const NetworkConfig& cfg, const CacheRealization& cache,
                                   const DemandRealization& demand) {
    if (cache.users() != cfg.n || cache.files() != cfg.m || cache.packets_per_file() != cfg.B) {
        throw InvalidInputError("cache realization does not match config dimensions");
    }
    if (static_cast<int>(demand.distinct_files.size()) != cfg.n) {
        throw InvalidInputError("demand realization does not match config dimensions");
    }

    ConflictGraph g;
    std::map<PacketId, int> packet_ids;
    std::vector<std::vector<int>> user_vertices(cfg.n);
    for (int u = 0; u < cfg.n; ++u) {
        for (std::size_t i = 0; i < demand.distinct_files[u].size(); ++i) {
            const int file = demand.distinct_files[u][i];
            for (int pk : demand.needed[u][i]) {
                PacketId pid{file, pk};
                auto [it, inserted] = packet_ids.emplace(pid, -1);
                (void)inserted;
                g.vertex_packet_.push_back(0);  // patched below once packets are numbered
                g.vertex_user_.push_back(u);
                user_vertices[u].push_back(static_cast<int>(g.vertex_packet_.size()) - 1);
                (void)it;
            }
        }
    }
    const int V = g.num_vertices();
    if (V > kMaxVertices) {
        throw SizeError("conflict graph has " + std::to_string(V) + " vertices; limit is " +
                        std::to_string(kMaxVertices));
    }

    // Number distinct packets in (file, index) order.
    int next = 0;
    for (auto& [pid, idx] : packet_ids) {
        idx = next++;
        g.distinct_packets_.push_back(pid);
    }
    g.packet_vertices_.assign(next, {});
    {
        int v = 0;
        for (int u = 0; u < cfg.n; ++u) {
            for (std::size_t i = 0; i < demand.distinct_files[u].size(); ++i) {
                const int file = demand.distinct_files[u][i];
                for (int pk : demand.needed[u][i]) {
                    int pidx = packet_ids[PacketId{file, pk}];
                    g.vertex_packet_[v] = pidx;
                    g.packet_vertices_[pidx].push_back(v);
                    ++v;
                }
            }
        }
    }

    g.out_ = BitMatrix(V);
    g.und_ = BitMatrix(V);
    const std::size_t words = g.out_.row_words();

    // Per-user row template over vertices: bit set when the vertex's packet
    // is absent from that user's cache.
    std::vector<std::uint64_t> templates(static_cast<std::size_t>(cfg.n) * words, 0);
    for (int v = 0; v < V; ++v) {
        PacketId pid = g.distinct_packets_[g.vertex_packet_[v]];
        for (int u = 0; u < cfg.n; ++u) {
            if (!cache.cached(u, pid)) {
                templates[static_cast<std::size_t>(u) * words + (v >> 6)] |=
                    std::uint64_t{1} << (v & 63);
            }
        }
    }

    // out row of v = template of its user minus same-packet vertices.
    for (int v = 0; v < V; ++v) {
        std::uint64_t* row = g.out_.row(v);
        std::memcpy(row, templates.data() + static_cast<std::size_t>(g.vertex_user_[v]) * words,
                    words * sizeof(std::uint64_t));
        for (int w : g.packet_vertices_[g.vertex_packet_[v]]) {
            row[w >> 6] &= ~(std::uint64_t{1} << (w & 63));
        }
    }

    // in row of v over w: v's packet not cached by w's user; users occupy
    // contiguous id ranges so fill word spans per user, then drop same-packet.
    std::vector<std::uint64_t> in_row(words);
    std::vector<std::pair<int, int>> user_range(cfg.n, {0, 0});
    {
        int start = 0;
        for (int u = 0; u < cfg.n; ++u) {
            user_range[u] = {start, start + static_cast<int>(user_vertices[u].size())};
            start = user_range[u].second;
        }
    }
    auto fill_span = [&](std::vector<std::uint64_t>& row, int lo, int hi) {
        for (int b = lo; b < hi;) {
            if ((b & 63) == 0 && b + 64 <= hi) {
                row[b >> 6] = ~std::uint64_t{0};
                b += 64;
            } else {
                row[b >> 6] |= std::uint64_t{1} << (b & 63);
                ++b;
            }
        }
    };
    for (int v = 0; v < V; ++v) {
        std::fill(in_row.begin(), in_row.end(), 0);
        PacketId pid = g.distinct_packets_[g.vertex_packet_[v]];
        for (int u = 0; u < cfg.n; ++u) {
            if (!cache.cached(u, pid)) {
                fill_span(in_row, user_range[u].first, user_range[u].second);
            }
        }
        for (int w : g.packet_vertices_[g.vertex_packet_[v]]) {
            in_row[w >> 6] &= ~(std::uint64_t{1} << (w & 63));
        }
        std::uint64_t* und = g.und_.row(v);
        const std::uint64_t* out = g.out_.row(v);
        for (std::size_t w = 0; w < words; ++w) und[w] = out[w] | in_row[w];
    }

    g.finalize();
    return g;
}

ConflictGraph ConflictGraph::from_edges(int num_vertices,
                                        const std::vector<std::pair<int, int>>& directed_edges,
                                        const std::vector<int>& packet_of,
                                        const std::vector<int>& user_of) {
    if (num_vertices < 0 || num_vertices > kMaxVertices) {
        throw SizeError("from_edges: vertex count out of range");
    }
    ConflictGraph g;
    g.vertex_packet_.resize(num_vertices);
    g.vertex_user_.resize(num_vertices);
    int num_packets = 0;
    if (!packet_of.empty()) {
        if (static_cast<int>(packet_of.size()) != num_vertices) {
            throw InvalidInputError("from_edges: packet_of size mismatch");
        }
        for (int v = 0; v < num_vertices; ++v) {
            g.vertex_packet_[v] = packet_of[v];
            num_packets = std::max(num_packets, packet_of[v] + 1);
        }
    } else {
        for (int v = 0; v < num_vertices; ++v) g.vertex_packet_[v] = v;
        num_packets = num_vertices;
    }
    for (int v = 0; v < num_vertices; ++v) {
        g.vertex_user_[v] = user_of.empty() ? v : user_of[v];
    }
    g.distinct_packets_.resize(num_packets);
    g.packet_vertices_.assign(num_packets, {});
    for (int p = 0; p < num_packets; ++p) g.distinct_packets_[p] = PacketId{p + 1, 1};
    for (int v = 0; v < num_vertices; ++v) g.packet_vertices_[g.vertex_packet_[v]].push_back(v);

    g.out_ = BitMatrix(num_vertices);
    g.und_ = BitMatrix(num_vertices);
    for (auto [a, b] : directed_edges) {
        if (a < 0 || a >= num_vertices || b < 0 || b >= num_vertices || a == b) {
            throw InvalidInputError("from_edges: bad edge");
        }
        g.out_.set(a, b);
        g.und_.set(a, b);
        g.und_.set(b, a);
    }
    g.finalize();
    return g;
}

void ConflictGraph::finalize() { num_edges_ = out_.count_bits(); }

std::vector<int> ConflictGraph::out_neighbors(int v) const {
    std::vector<int> out;
    collect_bits(out_.row(checked(v)), out_.row_words(), num_vertices(), out);
    return out;
}

std::vector<int> ConflictGraph::undirected_neighbors(int v) const {
    std::vector<int> out;
    collect_bits(und_.row(checked(v)), und_.row_words(), num_vertices(), out);
    return out;
}

std::vector<int> ConflictGraph::in_neighbors(int v) const {
    checked(v);
    std::vector<int> out;
    for (int w = 0; w < num_vertices(); ++w) {
        if (w != v && out_.get(w, v)) out.push_back(w);
    }
    return out;
}

std::vector<int> ConflictGraph::closed_out_neighborhood(int v) const {
    std::vector<int> out;
    out.push_back(checked(v));
    collect_bits(out_.row(v), out_.row_words(), num_vertices(), out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void ConflictGraph::write_edge_list(std::ostream& os) const {
    os << "p " << num_vertices() << " " << num_edges_ << "\n";
    std::vector<int> nbrs;
    for (int v = 0; v < num_vertices(); ++v) {
        nbrs.clear();
        collect_bits(out_.row(v), out_.row_words(), num_vertices(), nbrs);
        for (int w : nbrs) os << "e " << v << " " << w << "\n";
    }
}

}  // namespace cachecast
