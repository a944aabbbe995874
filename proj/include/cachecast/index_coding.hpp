#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cachecast/coloring.hpp"
#include "cachecast/conflict_graph.hpp"
#include "cachecast/galois.hpp"

namespace cachecast {

// nu x chi generator; column c is the coding vector shared by color class c.
struct CodingMatrix {
    int nu = 0;
    int chi = 0;
    std::vector<FieldSymbol> a;  // row-major

    FieldSymbol at(int r, int c) const { return a[static_cast<std::size_t>(r) * chi + c]; }
    FieldSymbol& at(int r, int c) { return a[static_cast<std::size_t>(r) * chi + c]; }
};

// MDS generator: identity when nu == chi, systematic [I | 1] when
// nu == chi - 1, otherwise a Vandermonde matrix on the points 1..chi.
// Requires chi <= 2^q - 1.
CodingMatrix mds_generator(int chi, int nu, const GaloisField& gf = GaloisField::gf16());

// Checks that every nu-subset of columns is invertible.  Exhaustive when the
// number of subsets is at most max_subsets, otherwise that many random
// subsets are sampled (seeded).
bool verify_mds(const CodingMatrix& G, const GaloisField& gf, long long max_subsets = 100000,
                std::uint64_t seed = 1);

// nu coded rows, each payload_len symbols.
struct Codeword {
    int payload_len = 0;
    std::vector<std::vector<FieldSymbol>> rows;
};

// One payload (vector of symbols) per distinct packet, indexed like
// ConflictGraph::distinct_packets().
using PacketPayloads = std::vector<std::vector<FieldSymbol>>;

PacketPayloads random_payloads(int num_packets, int payload_len, std::uint64_t seed,
                               const GaloisField& gf = GaloisField::gf16());

// X = sum over distinct (packet, color) pairs of G[:, color] * payload.
// Vertices sharing both packet and color collapse to a single term.
Codeword encode(const ConflictGraph& g, const ColoringOutcome& outcome, const CodingMatrix& G,
                const PacketPayloads& payloads, const GaloisField& gf = GaloisField::gf16());

// Recovers every packet requested by `user`: subtracts cached contributions,
// then solves the per-vertex system supported on the closed out-neighborhood
// colors.  `payloads` supplies the cache side information; only packets
// cached by the user are read.  Throws DecodeError on rank deficiency.
// Returns (packet_index, payload) pairs, one per requested vertex.
std::vector<std::pair<int, std::vector<FieldSymbol>>> decode_user(
    int user, const ConflictGraph& g, const ColoringOutcome& outcome, const CodingMatrix& G,
    const Codeword& code, const PacketPayloads& payloads, const CacheRealization& cache,
    const GaloisField& gf = GaloisField::gf16());

// Full round trip: random payloads, encode with a fresh MDS generator, decode
// every user and compare bit-for-bit.  Throws DecodeError on any mismatch;
// returns the codeword length nu.
int verify_delivery(const NetworkConfig& cfg, const CacheRealization& cache,
                    const DemandRealization& demand, const ConflictGraph& g,
                    const ColoringOutcome& outcome, std::uint64_t payload_seed,
                    int payload_len = 2, const GaloisField& gf = GaloisField::gf16());

// Binary frame [nu: u32][payload_len: u32][row-major symbols as u16], little
// endian.
std::string serialize_codeword(const Codeword& code);
Codeword parse_codeword(const std::string& bytes);

}  // namespace cachecast
