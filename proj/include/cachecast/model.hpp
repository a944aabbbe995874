#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "cachecast/errors.hpp"

namespace cachecast {

// One packet of one file.  Files are numbered 1..m and packet indices 1..B;
// the ordering is lexicographic so that iteration order (and therefore every
// greedy pass downstream) is reproducible.
struct PacketId {
    int file = 0;
    int index = 0;
    auto operator<=>(const PacketId&) const = default;
};

// Shared-link network instance: m files split into B packets each, n users
// with per-user cache sizes M[u] (file units), request counts L[u], demand
// rows Q[u] and caching rows P[u].
class NetworkConfig {
public:
    int m = 0;
    int n = 0;
    int B = 1;
    std::vector<double> M;  // size n, file units
    std::vector<int> L;     // size n, requests per user
    std::vector<double> Q;  // n x m, row per user
    std::vector<double> P;  // n x m, row per user
    std::uint64_t seed = 0;

    double q(int user, int file0) const { return Q[static_cast<std::size_t>(user) * m + file0]; }
    double p(int user, int file0) const { return P[static_cast<std::size_t>(user) * m + file0]; }

    // Throws ConfigError naming the offending field.
    void validate() const;

    // True when all users share M, L and identical Q/P rows.
    bool homogeneous() const;

    void set_uniform_P();
    void set_zipf_Q(double gamma);

    static NetworkConfig from_json_string(const std::string& text);
    std::string to_json_string() const;
};

// Per-user cached packet sets, bit-packed over (user, file, packet).
class CacheRealization {
public:
    CacheRealization() = default;
    CacheRealization(int n, int m, int B);

    int users() const { return n_; }
    int files() const { return m_; }
    int packets_per_file() const { return B_; }

    bool cached(int user, int file0, int packet0) const {
        std::uint64_t bit = bit_index(user, file0, packet0);
        return (bits_[bit >> 6] >> (bit & 63)) & 1u;
    }
    bool cached(int user, PacketId p) const { return cached(user, p.file - 1, p.index - 1); }

    int count(int user, int file0) const { return counts_[static_cast<std::size_t>(user) * m_ + file0]; }
    long long total(int user) const;

    // Sorted 1-based packet indices of C_{u,f}.
    std::vector<int> packets(int user, int file0) const;

    void insert(int user, int file0, int packet0);

    // Explicit construction from per-(user,file) packet index lists (1-based).
    static CacheRealization from_sets(const NetworkConfig& cfg,
                                      const std::vector<std::vector<std::vector<int>>>& sets);

private:
    std::uint64_t bit_index(int user, int file0, int packet0) const {
        return (static_cast<std::uint64_t>(user) * m_ + file0) * B_ + packet0;
    }

    int n_ = 0, m_ = 0, B_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<int> counts_;
};

// Sampled requests plus the packet sets still needed once the cache is
// accounted for.  `requests` keeps the raw draws; `distinct_files` is the
// deduplicated sorted request set actually served, and `needed[u][i]` lists
// the missing packets (1-based) of distinct_files[u][i].
struct DemandRealization {
    std::vector<std::vector<int>> requests;        // raw draws, 1-based files
    std::vector<std::vector<int>> distinct_files;  // sorted, unique
    std::vector<std::vector<std::vector<int>>> needed;

    static DemandRealization from_requests(const NetworkConfig& cfg,
                                           const std::vector<std::vector<int>>& requests,
                                           const CacheRealization& cache);
};

// Zipf popularity row: q_f proportional to f^(-gamma), f = 1..m.
std::vector<double> zipf_distribution(int m, double gamma);

// Largest-remainder integer apportionment of `targets` summing to `budget`.
// Ties on the fractional part go to the lower index.
std::vector<int> apportion_largest_remainder(const std::vector<double>& targets, long long budget);

// Random popularity-based placement: per (user,file) the apportioned number
// of packets, chosen uniformly without replacement.
CacheRealization rap_place(const NetworkConfig& cfg, std::uint64_t seed);

// Caches each user's floor(M_u) most popular files in full (ties to the
// lower file index).
CacheRealization lfu_place(const NetworkConfig& cfg);

// Draws L_u i.i.d. files per user from Q and computes needed sets against
// `cache`.  Pure function of (cfg, seed, cache).
DemandRealization sample_demands(const NetworkConfig& cfg, std::uint64_t seed,
                                 const CacheRealization& cache);

}  // namespace cachecast
