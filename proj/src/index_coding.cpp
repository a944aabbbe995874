#include "cachecast/index_coding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cachecast/rng.hpp"

namespace cachecast {

CodingMatrix mds_generator(int chi, int nu, const GaloisField& gf) {
    if (nu < 1 || chi < 1 || nu > chi) {
        throw InvalidInputError("mds_generator: need 1 <= nu <= chi");
    }
    if (static_cast<std::uint32_t>(chi) > gf.max_value()) {
        throw ConfigError("mds_generator: chi = " + std::to_string(chi) +
                          " exceeds the GF(2^" + std::to_string(gf.bits()) +
                          ") point budget; use q = 16");
    }
    CodingMatrix G;
    G.nu = nu;
    G.chi = chi;
    G.a.assign(static_cast<std::size_t>(nu) * chi, 0);
    if (nu == chi) {
        for (int i = 0; i < nu; ++i) G.at(i, i) = 1;
    } else if (nu == chi - 1) {
        for (int i = 0; i < nu; ++i) {
            G.at(i, i) = 1;
            G.at(i, chi - 1) = 1;
        }
    } else {
        // rows are powers 0..nu-1 of the distinct nonzero points 1..chi
        for (int c = 0; c < chi; ++c) {
            FieldSymbol x = static_cast<FieldSymbol>(c + 1);
            FieldSymbol v = 1;
            for (int r = 0; r < nu; ++r) {
                G.at(r, c) = v;
                v = gf.mul(v, x);
            }
        }
    }
    return G;
}

namespace {

// Rank of the nu x k column-submatrix via Gaussian elimination.
bool columns_invertible(const CodingMatrix& G, const std::vector<int>& cols,
                        const GaloisField& gf) {
    const int nu = G.nu;
    const int k = static_cast<int>(cols.size());
    std::vector<FieldSymbol> m(static_cast<std::size_t>(nu) * k);
    for (int r = 0; r < nu; ++r) {
        for (int c = 0; c < k; ++c) m[static_cast<std::size_t>(r) * k + c] = G.at(r, cols[c]);
    }
    int rank = 0;
    for (int c = 0; c < k; ++c) {
        int pivot = -1;
        for (int r = rank; r < nu; ++r) {
            if (m[static_cast<std::size_t>(r) * k + c] != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) return false;
        for (int j = 0; j < k; ++j) {
            std::swap(m[static_cast<std::size_t>(pivot) * k + j],
                      m[static_cast<std::size_t>(rank) * k + j]);
        }
        FieldSymbol inv = gf.inv(m[static_cast<std::size_t>(rank) * k + c]);
        for (int r = rank + 1; r < nu; ++r) {
            FieldSymbol f = m[static_cast<std::size_t>(r) * k + c];
            if (f == 0) continue;
            FieldSymbol scale = gf.mul(f, inv);
            for (int j = c; j < k; ++j) {
                m[static_cast<std::size_t>(r) * k + j] =
                    gf.sub(m[static_cast<std::size_t>(r) * k + j],
                           gf.mul(scale, m[static_cast<std::size_t>(rank) * k + j]));
            }
        }
        ++rank;
    }
    return rank == k;
}

double log_choose(int n, int k) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += std::log(static_cast<double>(n - i)) - std::log(static_cast<double>(i + 1));
    return s;
}

}  // namespace

bool verify_mds(const CodingMatrix& G, const GaloisField& gf, long long max_subsets,
                std::uint64_t seed) {
    const int nu = G.nu, chi = G.chi;
    if (nu == chi) {
        std::vector<int> cols(nu);
        for (int i = 0; i < nu; ++i) cols[i] = i;
        return columns_invertible(G, cols, gf);
    }
    const bool exhaustive = log_choose(chi, nu) <= std::log(static_cast<double>(max_subsets));
    if (exhaustive) {
        std::vector<int> cols(nu);
        for (int i = 0; i < nu; ++i) cols[i] = i;
        while (true) {
            if (!columns_invertible(G, cols, gf)) return false;
            int i = nu - 1;
            while (i >= 0 && cols[i] == chi - nu + i) --i;
            if (i < 0) break;
            ++cols[i];
            for (int j = i + 1; j < nu; ++j) cols[j] = cols[j - 1] + 1;
        }
        return true;
    }
    Rng rng(seed_combine(seed, 0x6d64'735fULL));
    std::vector<int> pool(chi);
    for (long long s = 0; s < max_subsets; ++s) {
        for (int i = 0; i < chi; ++i) pool[i] = i;
        std::vector<int> cols(nu);
        for (int i = 0; i < nu; ++i) {
            int j = i + static_cast<int>(rng.below(chi - i));
            std::swap(pool[i], pool[j]);
            cols[i] = pool[i];
        }
        std::sort(cols.begin(), cols.end());
        if (!columns_invertible(G, cols, gf)) return false;
    }
    return true;
}

PacketPayloads random_payloads(int num_packets, int payload_len, std::uint64_t seed,
                               const GaloisField& gf) {
    Rng rng(seed_combine(seed, 0x7061'796cULL));
    PacketPayloads out(num_packets);
    for (auto& payload : out) {
        payload.resize(payload_len);
        for (auto& s : payload) s = static_cast<FieldSymbol>(rng.below(gf.size()));
    }
    return out;
}

namespace {

// Distinct (packet_index, color) pairs of a colored graph.
std::vector<std::pair<int, int>> packet_color_terms(const ConflictGraph& g, const Coloring& c) {
    std::vector<std::pair<int, int>> terms;
    terms.reserve(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) {
        terms.emplace_back(g.packet_index(v), c.color_of[v]);
    }
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

}  // namespace

Codeword encode(const ConflictGraph& g, const ColoringOutcome& outcome, const CodingMatrix& G,
                const PacketPayloads& payloads, const GaloisField& gf) {
    if (G.chi != outcome.coloring.num_colors || G.nu != outcome.local_number) {
        throw InvalidInputError("encode: generator is " + std::to_string(G.nu) + "x" +
                                std::to_string(G.chi) + " but coloring has " +
                                std::to_string(outcome.coloring.num_colors) + " colors, nu " +
                                std::to_string(outcome.local_number));
    }
    if (static_cast<int>(payloads.size()) != g.num_packets()) {
        throw InvalidInputError("encode: one payload per distinct packet required");
    }
    const int len = payloads.empty() ? 0 : static_cast<int>(payloads.front().size());
    for (const auto& p : payloads) {
        if (static_cast<int>(p.size()) != len) {
            throw InvalidInputError("encode: payloads must share one length");
        }
    }
    Codeword code;
    code.payload_len = len;
    code.rows.assign(G.nu, std::vector<FieldSymbol>(len, 0));
    for (auto [pidx, color] : packet_color_terms(g, outcome.coloring)) {
        const auto& payload = payloads[pidx];
        for (int r = 0; r < G.nu; ++r) {
            FieldSymbol coef = G.at(r, color);
            if (coef == 0) continue;
            auto& row = code.rows[r];
            for (int s = 0; s < len; ++s) row[s] = gf.add(row[s], gf.mul(coef, payload[s]));
        }
    }
    return code;
}

std::vector<std::pair<int, std::vector<FieldSymbol>>> decode_user(
    int user, const ConflictGraph& g, const ColoringOutcome& outcome, const CodingMatrix& G,
    const Codeword& code, const PacketPayloads& payloads, const CacheRealization& cache,
    const GaloisField& gf) {
    const int V = g.num_vertices();
    const int nu = G.nu;
    const int len = code.payload_len;
    const Coloring& col = outcome.coloring;

    // Residual: codeword minus everything the user holds in cache.
    std::vector<std::vector<FieldSymbol>> residual = code.rows;
    for (auto [pidx, color] : packet_color_terms(g, col)) {
        PacketId pid = g.distinct_packets()[pidx];
        if (!cache.cached(user, pid)) continue;
        const auto& payload = payloads[pidx];
        for (int r = 0; r < nu; ++r) {
            FieldSymbol coef = G.at(r, color);
            if (coef == 0) continue;
            for (int s = 0; s < len; ++s) {
                residual[r][s] = gf.sub(residual[r][s], gf.mul(coef, payload[s]));
            }
        }
    }

    std::vector<std::pair<int, std::vector<FieldSymbol>>> recovered;
    std::vector<int> scope;
    for (int v = 0; v < V; ++v) {
        if (g.user(v) != user) continue;
        const int own_color = col.color_of[v];

        // Colors the decoder must account for: the closed out-neighborhood,
        // plus any extra colors carried by other copies of the same packet.
        scope = g.closed_out_neighborhood(v);
        std::vector<int> colors;
        colors.reserve(scope.size());
        for (int w : scope) colors.push_back(col.color_of[w]);
        std::sort(colors.begin(), colors.end());
        colors.erase(std::unique(colors.begin(), colors.end()), colors.end());

        std::vector<int> extra;
        for (int w : g.packet_vertices()[g.packet_index(v)]) {
            int cw = col.color_of[w];
            if (!std::binary_search(colors.begin(), colors.end(), cw)) extra.push_back(cw);
        }
        std::sort(extra.begin(), extra.end());
        extra.erase(std::unique(extra.begin(), extra.end()), extra.end());

        // Unknown 0 carries the wanted payload; its column merges the vertex
        // color with the same-packet colors that fall outside the
        // neighborhood scope.
        const int k = static_cast<int>(colors.size());
        std::vector<FieldSymbol> mat(static_cast<std::size_t>(nu) * k, 0);
        std::vector<int> unknown_cols;
        unknown_cols.push_back(own_color);
        for (int c : colors) {
            if (c != own_color) unknown_cols.push_back(c);
        }
        for (int r = 0; r < nu; ++r) {
            FieldSymbol merged = G.at(r, own_color);
            for (int c : extra) merged = gf.add(merged, G.at(r, c));
            mat[static_cast<std::size_t>(r) * k + 0] = merged;
            for (int j = 1; j < k; ++j) {
                mat[static_cast<std::size_t>(r) * k + j] = G.at(r, unknown_cols[j]);
            }
        }

        // Solve mat * z = residual for z[0] (Gaussian elimination with the
        // payload columns carried along).
        std::vector<std::vector<FieldSymbol>> rhs = residual;
        std::vector<int> pivot_row(k, -1);
        int rank = 0;
        for (int c = 0; c < k && rank < nu; ++c) {
            int pr = -1;
            for (int r = rank; r < nu; ++r) {
                if (mat[static_cast<std::size_t>(r) * k + c] != 0) {
                    pr = r;
                    break;
                }
            }
            if (pr < 0) continue;
            for (int j = 0; j < k; ++j) {
                std::swap(mat[static_cast<std::size_t>(pr) * k + j],
                          mat[static_cast<std::size_t>(rank) * k + j]);
            }
            std::swap(rhs[pr], rhs[rank]);
            FieldSymbol inv = gf.inv(mat[static_cast<std::size_t>(rank) * k + c]);
            for (int r = 0; r < nu; ++r) {
                if (r == rank) continue;
                FieldSymbol f = mat[static_cast<std::size_t>(r) * k + c];
                if (f == 0) continue;
                FieldSymbol scale = gf.mul(f, inv);
                for (int j = c; j < k; ++j) {
                    mat[static_cast<std::size_t>(r) * k + j] =
                        gf.sub(mat[static_cast<std::size_t>(r) * k + j],
                               gf.mul(scale, mat[static_cast<std::size_t>(rank) * k + j]));
                }
                for (int s = 0; s < len; ++s) {
                    rhs[r][s] = gf.sub(rhs[r][s], gf.mul(scale, rhs[rank][s]));
                }
            }
            pivot_row[c] = rank;
            ++rank;
        }
        if (pivot_row[0] < 0 || rank < k) {
            throw DecodeError("decode: rank-deficient system for user " + std::to_string(user) +
                              ", vertex " + std::to_string(v));
        }
        const int pr = pivot_row[0];
        FieldSymbol lead = mat[static_cast<std::size_t>(pr) * k + 0];
        FieldSymbol lead_inv = gf.inv(lead);
        std::vector<FieldSymbol> value(len);
        for (int s = 0; s < len; ++s) value[s] = gf.mul(rhs[pr][s], lead_inv);
        recovered.emplace_back(g.packet_index(v), std::move(value));
    }
    return recovered;
}

int verify_delivery(const NetworkConfig& cfg, const CacheRealization& cache,
                    const DemandRealization& demand, const ConflictGraph& g,
                    const ColoringOutcome& outcome, std::uint64_t payload_seed, int payload_len,
                    const GaloisField& gf) {
    (void)demand;
    if (g.num_vertices() == 0) return 0;
    PacketPayloads payloads = random_payloads(g.num_packets(), payload_len, payload_seed, gf);
    CodingMatrix G = mds_generator(outcome.coloring.num_colors, outcome.local_number, gf);
    Codeword code = encode(g, outcome, G, payloads, gf);
    for (int u = 0; u < cfg.n; ++u) {
        for (auto& [pidx, value] : decode_user(u, g, outcome, G, code, payloads, cache, gf)) {
            if (value != payloads[pidx]) {
                throw DecodeError("verify_delivery: user " + std::to_string(u) +
                                  " recovered a wrong payload");
            }
        }
    }
    return outcome.local_number;
}

std::string serialize_codeword(const Codeword& code) {
    const std::uint32_t nu = static_cast<std::uint32_t>(code.rows.size());
    const std::uint32_t len = static_cast<std::uint32_t>(code.payload_len);
    std::string out;
    out.reserve(8 + static_cast<std::size_t>(nu) * len * 2);
    auto put_u32 = [&](std::uint32_t x) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xFF));
    };
    put_u32(nu);
    put_u32(len);
    for (const auto& row : code.rows) {
        for (FieldSymbol s : row) {
            out.push_back(static_cast<char>(s & 0xFF));
            out.push_back(static_cast<char>((s >> 8) & 0xFF));
        }
    }
    return out;
}

Codeword parse_codeword(const std::string& bytes) {
    if (bytes.size() < 8) throw InvalidInputError("parse_codeword: truncated header");
    auto get_u32 = [&](std::size_t off) {
        std::uint32_t x = 0;
        for (int i = 0; i < 4; ++i) {
            x |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + i])) << (8 * i);
        }
        return x;
    };
    const std::uint32_t nu = get_u32(0);
    const std::uint32_t len = get_u32(4);
    if (bytes.size() != 8 + static_cast<std::size_t>(nu) * len * 2) {
        throw InvalidInputError("parse_codeword: size mismatch");
    }
    Codeword code;
    code.payload_len = static_cast<int>(len);
    code.rows.assign(nu, std::vector<FieldSymbol>(len, 0));
    std::size_t off = 8;
    for (auto& row : code.rows) {
        for (auto& s : row) {
            s = static_cast<FieldSymbol>(static_cast<unsigned char>(bytes[off]) |
                                         (static_cast<unsigned char>(bytes[off + 1]) << 8));
            off += 2;
        }
    }
    return code;
}

}  // namespace cachecast
