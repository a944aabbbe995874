#include "cachecast/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "cachecast/rng.hpp"

namespace cachecast {

RequestProfile RequestProfile::from(const std::vector<int>& L) {
    RequestProfile prof;
    prof.L_sorted = L;
    std::sort(prof.L_sorted.begin(), prof.L_sorted.end(), std::greater<int>());
    const int lmax = prof.L_sorted.empty() ? 0 : prof.L_sorted.front();
    prof.n_j.resize(lmax);
    prof.U_nj.resize(lmax);
    for (int j = 1; j <= lmax; ++j) {
        for (int u = 0; u < static_cast<int>(L.size()); ++u) {
            if (L[u] >= j) prof.U_nj[j - 1].push_back(u);
        }
        prof.n_j[j - 1] = static_cast<int>(prof.U_nj[j - 1].size());
    }
    return prof;
}

double m_bar(const NetworkConfig& cfg) {
    double total = 0.0;
    for (int f = 0; f < cfg.m; ++f) {
        double prod = 1.0;
        for (int u = 0; u < cfg.n; ++u) {
            prod *= std::pow(1.0 - cfg.q(u, f), cfg.L[u]);
        }
        total += 1.0 - prod;
    }
    return total;
}

double M_bar(const NetworkConfig& cfg) {
    double total = 0.0;
    for (int f = 0; f < cfg.m; ++f) {
        double prod = 1.0;
        double pmin = cfg.p(0, f);
        for (int u = 0; u < cfg.n; ++u) {
            prod *= std::pow(1.0 - cfg.q(u, f), cfg.L[u]);
            pmin = std::min(pmin, cfg.p(u, f));
        }
        total += pmin * (1.0 - prod);
    }
    return total;
}

namespace {

double choose(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
    return c;
}

// Winner metric for one member: (p M)^(l-1) (1 - p M)^(e) with e supplied by
// the caller; p M is clamped into [0, 1] against rounding.
inline double winner_metric(double pM, int ell, int expo) {
    const double x = std::clamp(pM, 0.0, 1.0);
    return std::pow(x, ell - 1) * std::pow(1.0 - x, expo);
}

struct Pair {
    double g;
    int file;
    int member;  // position within the subset
};

// Exact E[max metric over members' independent draws] for one user subset.
// Pairs are ranked (g desc, file asc, member asc); the winner probability of
// a pair multiplies its own draw probability with every other member's
// probability of drawing strictly below it.
double exact_group_term(const NetworkConfig& cfg, const std::vector<int>& subset, int ell,
                        int expo) {
    const int m = cfg.m;
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(ell) * m);
    for (int i = 0; i < ell; ++i) {
        const int u = subset[i];
        for (int f = 0; f < m; ++f) {
            pairs.push_back({winner_metric(cfg.p(u, f) * cfg.M[u], ell, expo), f, i});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.g != b.g) return a.g > b.g;
        if (a.file != b.file) return a.file < b.file;
        return a.member < b.member;
    });
    std::vector<double> below(ell, 0.0);  // per member: P(draw ranked strictly below r)
    double term = 0.0;
    for (int r = static_cast<int>(pairs.size()) - 1; r >= 0; --r) {
        const Pair& pr = pairs[r];
        const double q = cfg.q(subset[pr.member], pr.file);
        if (q > 0.0) {
            double win = q;
            for (int i = 0; i < ell && win > 0.0; ++i) {
                if (i != pr.member) win *= below[i];
            }
            term += win * pr.g;
        }
        below[pr.member] += q;
    }
    return term;
}

}  // namespace

PsiEstimate psi_heterogeneous(const NetworkConfig& cfg, const PsiOptions& opts) {
    cfg.validate();
    RequestProfile prof = RequestProfile::from(cfg.L);
    const int lmax = static_cast<int>(prof.n_j.size());

    bool exact = !opts.force_monte_carlo;
    for (int nj : prof.n_j) {
        if (nj > opts.exact_subset_limit) exact = false;
    }

    if (exact) {
        double total = 0.0;
        for (int j = 1; j <= lmax; ++j) {
            const auto& users = prof.U_nj[j - 1];
            const int nj = prof.n_j[j - 1];
            for (int ell = 1; ell <= nj; ++ell) {
                const int expo = (opts.exponent_uses_global_n ? cfg.n : nj) - ell + 1;
                // iterate all size-ell subsets of users
                std::vector<int> idx(ell);
                std::iota(idx.begin(), idx.end(), 0);
                std::vector<int> subset(ell);
                while (true) {
                    for (int i = 0; i < ell; ++i) subset[i] = users[idx[i]];
                    total += exact_group_term(cfg, subset, ell, expo);
                    int i = ell - 1;
                    while (i >= 0 && idx[i] == nj - ell + i) --i;
                    if (i < 0) break;
                    ++idx[i];
                    for (int k = i + 1; k < ell; ++k) idx[k] = idx[k - 1] + 1;
                }
            }
        }
        return {total, 0.0};
    }

    // Monte Carlo: per sample draw one request per active user and round,
    // and estimate each subset sum from one uniformly drawn subset per size.
    if (opts.samples <= 0) throw ConfigError("psi: sample budget must be positive");
    const int workers = std::max(1, opts.workers);
    std::vector<double> sums(workers, 0.0), sqsums(workers, 0.0);
    std::vector<long long> counts(workers, 0);
    auto run_chunk = [&](int w) {
        Rng rng(seed_combine(opts.seed, 0xc001'0000ULL + static_cast<std::uint64_t>(w)));
        const long long chunk = opts.samples / workers + (w < opts.samples % workers ? 1 : 0);
        std::vector<int> draw(cfg.n, 0);
        std::vector<double> cdf(cfg.m);
        std::vector<int> pool;
        for (long long s = 0; s < chunk; ++s) {
            double x_s = 0.0;
            for (int j = 1; j <= lmax; ++j) {
                const auto& users = prof.U_nj[j - 1];
                const int nj = prof.n_j[j - 1];
                for (int u : users) {
                    double acc = 0.0;
                    for (int f = 0; f < cfg.m; ++f) {
                        acc += cfg.q(u, f);
                        cdf[f] = acc;
                    }
                    cdf[cfg.m - 1] = 1.0;
                    double x = rng.unit();
                    int f = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), x) -
                                             cdf.begin());
                    draw[u] = std::min(f, cfg.m - 1);
                }
                for (int ell = 1; ell <= nj; ++ell) {
                    const int expo = (opts.exponent_uses_global_n ? cfg.n : nj) - ell + 1;
                    pool = users;
                    for (int i = 0; i < ell; ++i) {
                        int k = i + static_cast<int>(rng.below(nj - i));
                        std::swap(pool[i], pool[k]);
                    }
                    // winner among the sampled subset, ties to (file, user)
                    double best_g = -1.0;
                    int best_f = -1, best_u = -1;
                    for (int i = 0; i < ell; ++i) {
                        const int u = pool[i];
                        const int f = draw[u];
                        const double g = winner_metric(cfg.p(u, f) * cfg.M[u], ell, expo);
                        if (g > best_g || (g == best_g && (f < best_f || (f == best_f && u < best_u)))) {
                            best_g = g;
                            best_f = f;
                            best_u = u;
                        }
                    }
                    x_s += choose(nj, ell) * best_g;
                }
            }
            sums[w] += x_s;
            sqsums[w] += x_s * x_s;
            counts[w] += 1;
        }
    };
    if (workers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
        for (auto& t : pool) t.join();
    }
    double sum = 0.0, sq = 0.0;
    long long count = 0;
    for (int w = 0; w < workers; ++w) {
        sum += sums[w];
        sq += sqsums[w];
        count += counts[w];
    }
    const double mean = sum / count;
    const double var = std::max(0.0, sq / count - mean * mean);
    return {mean, std::sqrt(var / count)};
}

std::vector<double> rho_homogeneous(std::span<const double> p, std::span<const double> q, double M,
                                    int n, int ell) {
    const int m = static_cast<int>(q.size());
    if (static_cast<int>(p.size()) != m) throw InvalidInputError("rho: p and q sizes differ");
    const int expo = n - ell + 1;
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> g(m);
    for (int f = 0; f < m; ++f) g[f] = winner_metric(p[f] * M, ell, expo);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (g[a] != g[b]) return g[a] > g[b];
        return a < b;
    });
    // P(winner = rank r) = T_r^ell - T_{r+1}^ell with T the suffix demand mass
    std::vector<double> rho(m, 0.0);
    double suffix = 0.0;
    for (int r = m - 1; r >= 0; --r) {
        double next = suffix;
        suffix += q[order[r]];
        double t_hi = std::min(1.0, suffix);
        rho[order[r]] = std::pow(t_hi, ell) - std::pow(next, ell);
    }
    return rho;
}

PsiEstimate psi_homogeneous(std::span<const double> p, std::span<const double> q, double M, int L,
                            int n, const PsiOptions& opts) {
    const int m = static_cast<int>(q.size());
    if (static_cast<int>(p.size()) != m) throw InvalidInputError("psi: p and q sizes differ");
    if (!opts.force_monte_carlo) {
        double total = 0.0;
        for (int ell = 1; ell <= n; ++ell) {
            const int expo = n - ell + 1;
            std::vector<double> rho = rho_homogeneous(p, q, M, n, ell);
            double inner = 0.0;
            for (int f = 0; f < m; ++f) {
                if (rho[f] > 0.0) inner += rho[f] * winner_metric(p[f] * M, ell, expo);
            }
            total += choose(n, ell) * inner;
        }
        return {L * total, 0.0};
    }
    if (opts.samples <= 0) throw ConfigError("psi: sample budget must be positive");
    Rng rng(seed_combine(opts.seed, 0xc002ULL));
    std::vector<double> cdf(m);
    double acc = 0.0;
    for (int f = 0; f < m; ++f) {
        acc += q[f];
        cdf[f] = acc;
    }
    cdf[m - 1] = 1.0;
    double sum = 0.0, sq = 0.0;
    for (long long s = 0; s < opts.samples; ++s) {
        double x_s = 0.0;
        for (int ell = 1; ell <= n; ++ell) {
            const int expo = n - ell + 1;
            double best_g = -1.0;
            int best_f = m;
            for (int i = 0; i < ell; ++i) {
                double x = rng.unit();
                int f = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
                f = std::min(f, m - 1);
                double gv = winner_metric(p[f] * M, ell, expo);
                if (gv > best_g || (gv == best_g && f < best_f)) {
                    best_g = gv;
                    best_f = f;
                }
            }
            x_s += choose(n, ell) * best_g;
        }
        x_s *= L;
        sum += x_s;
        sq += x_s * x_s;
    }
    const double mean = sum / opts.samples;
    const double var = std::max(0.0, sq / opts.samples - mean * mean);
    return {mean, std::sqrt(var / opts.samples)};
}

double lfu_rate(const NetworkConfig& cfg) {
    cfg.validate();
    const int m = cfg.m, n = cfg.n;
    // popularity-sorted demand per user
    std::vector<std::vector<double>> sorted(n, std::vector<double>(m));
    std::vector<int> cacheable(n);
    int min_cache = m;
    for (int u = 0; u < n; ++u) {
        for (int f = 0; f < m; ++f) sorted[u][f] = cfg.q(u, f);
        std::stable_sort(sorted[u].begin(), sorted[u].end(), std::greater<double>());
        cacheable[u] = std::clamp(static_cast<int>(std::floor(cfg.M[u] + 1e-9)), 0, m);
        min_cache = std::min(min_cache, cacheable[u]);
    }
    double total = 0.0;
    for (int rank = min_cache; rank < m; ++rank) {
        double prod = 1.0;
        for (int u = 0; u < n; ++u) {
            if (cacheable[u] <= rank) prod *= std::pow(1.0 - sorted[u][rank], cfg.L[u]);
        }
        total += 1.0 - prod;
    }
    return total;
}

RateBound gclc_bound(const NetworkConfig& cfg, const PsiOptions& opts) {
    RateBound b;
    b.m_bar = m_bar(cfg);
    b.M_bar = M_bar(cfg);
    PsiEstimate psi;
    if (cfg.homogeneous()) {
        std::vector<double> p(cfg.m), q(cfg.m);
        for (int f = 0; f < cfg.m; ++f) {
            p[f] = cfg.p(0, f);
            q[f] = cfg.q(0, f);
        }
        psi = psi_homogeneous(p, q, cfg.M[0], cfg.L[0], cfg.n, opts);
    } else {
        psi = psi_heterogeneous(cfg, opts);
    }
    b.psi = psi.value;
    b.psi_stderr = psi.std_error;
    b.r_gclc = std::min(b.psi, b.m_bar - b.M_bar);
    return b;
}

CachingOptimum optimize_caching_distribution(std::span<const double> q, double M, int L, int n) {
    const int m = static_cast<int>(q.size());
    if (m < 1) throw ConfigError("optimize_caching_distribution: empty demand row");
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (q[a] != q[b]) return q[a] > q[b];
        return a < b;
    });
    const int lo = std::max(1, static_cast<int>(std::ceil(M - 1e-9)));

    CachingOptimum best;
    best.bound = std::numeric_limits<double>::infinity();
    std::vector<double> qv(q.begin(), q.end());
    for (int mt = lo; mt <= m; ++mt) {
        std::vector<double> p(m, 0.0);
        for (int r = 0; r < mt; ++r) p[order[r]] = 1.0 / mt;
        PsiEstimate psi = psi_homogeneous(p, qv, M, L, n, {});
        double mb = 0.0, cmb = 0.0;
        for (int f = 0; f < m; ++f) {
            double hit = 1.0 - std::pow(1.0 - q[f], static_cast<double>(n) * L);
            mb += hit;
            cmb += p[f] * hit;
        }
        double r = std::min(psi.value, mb - cmb);
        if (r <= best.bound) {
            best.bound = r;
            best.m_tilde = mt;
            best.p = std::move(p);
        }
    }
    return best;
}

}  // namespace cachecast
