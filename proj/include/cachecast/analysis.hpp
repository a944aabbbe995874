#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cachecast/model.hpp"

namespace cachecast {

// Multi-request bookkeeping: L sorted decreasing, n_j = number of users still
// requesting in round j, U_nj the corresponding user sets.
struct RequestProfile {
    std::vector<int> L_sorted;
    std::vector<int> n_j;                 // index j-1, j = 1..L_sorted.front()
    std::vector<std::vector<int>> U_nj;

    static RequestProfile from(const std::vector<int>& L);
};

struct PsiEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct PsiOptions {
    long long samples = 20000;
    std::uint64_t seed = 1;
    // Winner metric uses (1 - p M)^(n_j - l + 1) by default; this switches the
    // exponent to the global n - l + 1 variant.
    bool exponent_uses_global_n = false;
    int exact_subset_limit = 15;   // enumerate user subsets when n_j fits
    bool force_monte_carlo = false;
    int workers = 1;
};

// Expected number of distinct requested files.
double m_bar(const NetworkConfig& cfg);

// Cacheable share of m_bar: sum_f min_u p_{f,u} (1 - prod_u (1-q_{f,u})^{L_u}).
double M_bar(const NetworkConfig& cfg);

// Coded-delivery rate term, general profile.  Exact (std_error 0) when every
// round's user-subset family is enumerable, Monte Carlo otherwise.
PsiEstimate psi_heterogeneous(const NetworkConfig& cfg, const PsiOptions& opts = {});

// Homogeneous specialization; evaluated exactly through the winner-order
// statistics unless force_monte_carlo is set.
PsiEstimate psi_homogeneous(std::span<const double> p, std::span<const double> q, double M, int L,
                            int n, const PsiOptions& opts = {});

// Exact winner distribution over files for a set of `ell` i.i.d. demands:
// rho[f] = P(f attains the maximal (p_f M)^(ell-1) (1-p_f M)^(n-ell+1) among
// the drawn files, ties to the lowest index).
std::vector<double> rho_homogeneous(std::span<const double> p, std::span<const double> q, double M,
                                    int n, int ell);

// Baseline rate with every user caching its most popular files in full.  Each
// user's demand row is sorted by popularity before the formula is applied.
double lfu_rate(const NetworkConfig& cfg);

struct RateBound {
    double m_bar = 0.0;
    double M_bar = 0.0;
    double psi = 0.0;
    double psi_stderr = 0.0;
    double r_gclc = 0.0;  // min(psi, m_bar - M_bar)
};

RateBound gclc_bound(const NetworkConfig& cfg, const PsiOptions& opts = {});

struct CachingOptimum {
    std::vector<double> p;  // length m
    int m_tilde = 0;
    double bound = 0.0;
};

// Sweeps truncated-uniform caching distributions (mass 1/m_tilde on the
// m_tilde most popular files) and returns the bound minimizer.
CachingOptimum optimize_caching_distribution(std::span<const double> q, double M, int L, int n);

}  // namespace cachecast
