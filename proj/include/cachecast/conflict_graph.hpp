#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "cachecast/model.hpp"

namespace cachecast {

// Dense bit matrix holding one adjacency row per vertex.
class BitMatrix {
public:
    BitMatrix() = default;
    explicit BitMatrix(int n)
        : n_(n), words_((static_cast<std::size_t>(n) + 63) / 64),
          data_(words_ * static_cast<std::size_t>(n), 0) {}

    int size() const { return n_; }
    std::size_t row_words() const { return words_; }

    std::uint64_t* row(int i) { return data_.data() + words_ * static_cast<std::size_t>(i); }
    const std::uint64_t* row(int i) const { return data_.data() + words_ * static_cast<std::size_t>(i); }

    void set(int i, int j) { row(i)[j >> 6] |= std::uint64_t{1} << (j & 63); }
    void clear(int i, int j) { row(i)[j >> 6] &= ~(std::uint64_t{1} << (j & 63)); }
    bool get(int i, int j) const { return (row(i)[j >> 6] >> (j & 63)) & 1u; }

    long long count_bits() const;

private:
    int n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> data_;
};

// Appends the indices of set bits in `row` (row_words words over `n` columns).
void collect_bits(const std::uint64_t* row, std::size_t row_words, int n, std::vector<int>& out);

// Directed conflict graph on (packet, user) vertices.  An edge a -> b means
// b's packet interferes with a: it is not cached by a's user and differs from
// a's packet.  Vertex ids are dense and assigned in (user, file, packet
// index) lexicographic order.  Adjacency is kept as dense bit rows (directed
// out-rows plus the undirected closure), which the coloring passes rely on
// for O(1) membership tests.
class ConflictGraph {
public:
    static constexpr int kMaxVertices = 1 << 16;

    static ConflictGraph build(const NetworkConfig& cfg, const CacheRealization& cache,
                               const DemandRealization& demand);

    // Synthetic graph for tests: explicit directed edges, one distinct packet
    // per vertex unless `packet_of` groups vertices onto shared packets.
    static ConflictGraph from_edges(int num_vertices,
                                    const std::vector<std::pair<int, int>>& directed_edges,
                                    const std::vector<int>& packet_of = {},
                                    const std::vector<int>& user_of = {});

    int num_vertices() const { return static_cast<int>(vertex_packet_.size()); }
    long long num_edges() const { return num_edges_; }

    PacketId packet(int v) const { return distinct_packets_[vertex_packet_[checked(v)]]; }
    int packet_index(int v) const { return vertex_packet_[checked(v)]; }
    int user(int v) const { return vertex_user_[checked(v)]; }

    int num_packets() const { return static_cast<int>(distinct_packets_.size()); }
    const std::vector<PacketId>& distinct_packets() const { return distinct_packets_; }
    const std::vector<std::vector<int>>& packet_vertices() const { return packet_vertices_; }

    const BitMatrix& out_matrix() const { return out_; }
    const BitMatrix& undirected_matrix() const { return und_; }

    bool out_edge(int a, int b) const { return out_.get(checked(a), checked(b)); }
    bool adjacent(int a, int b) const { return und_.get(checked(a), checked(b)); }

    std::vector<int> out_neighbors(int v) const;
    std::vector<int> in_neighbors(int v) const;
    std::vector<int> undirected_neighbors(int v) const;

    // {v} followed by out-neighbors, ascending.
    std::vector<int> closed_out_neighborhood(int v) const;

    // Edge-list dump: "p <|V|> <|E|>" then one "e <src> <dst>" per directed
    // edge, vertex ids as used everywhere else (0-based).
    void write_edge_list(std::ostream& os) const;

private:
    int checked(int v) const;
    void finalize();

    std::vector<int> vertex_packet_;  // index into distinct_packets_
    std::vector<int> vertex_user_;
    std::vector<PacketId> distinct_packets_;
    std::vector<std::vector<int>> packet_vertices_;
    BitMatrix out_;
    BitMatrix und_;
    long long num_edges_ = 0;
};

}  // namespace cachecast
