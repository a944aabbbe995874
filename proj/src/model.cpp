#include "cachecast/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cachecast/rng.hpp"

namespace cachecast {

namespace {

constexpr double kSimplexTol = 1e-9;

void check(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

void NetworkConfig::validate() const {
    check(m >= 1, "m must be >= 1");
    check(n >= 1, "n must be >= 1");
    check(B >= 1, "B must be >= 1");
    check(static_cast<int>(M.size()) == n, "M must have n entries");
    check(static_cast<int>(L.size()) == n, "L must have n entries");
    check(Q.size() == static_cast<std::size_t>(n) * m, "Q must be n x m");
    check(P.size() == static_cast<std::size_t>(n) * m, "P must be n x m");
    for (int u = 0; u < n; ++u) {
        check(M[u] >= 0.0 && M[u] <= static_cast<double>(m),
              "M[" + std::to_string(u) + "] out of [0, m]");
        check(L[u] >= 1 && L[u] <= m, "L[" + std::to_string(u) + "] out of [1, m]");
        double qsum = 0.0, psum = 0.0;
        for (int f = 0; f < m; ++f) {
            double qv = q(u, f), pv = p(u, f);
            check(qv >= 0.0 && qv <= 1.0, "Q[" + std::to_string(u) + "][" + std::to_string(f) + "] out of [0,1]");
            check(pv >= 0.0, "P[" + std::to_string(u) + "][" + std::to_string(f) + "] negative");
            if (M[u] > 0.0) {
                check(pv <= 1.0 / M[u] + kSimplexTol,
                      "P[" + std::to_string(u) + "][" + std::to_string(f) + "] exceeds 1/M_u");
            }
            qsum += qv;
            psum += pv;
        }
        check(std::abs(qsum - 1.0) <= kSimplexTol, "Q row " + std::to_string(u) + " does not sum to 1");
        check(std::abs(psum - 1.0) <= kSimplexTol, "P row " + std::to_string(u) + " does not sum to 1");
    }
}

bool NetworkConfig::homogeneous() const {
    for (int u = 1; u < n; ++u) {
        if (M[u] != M[0] || L[u] != L[0]) return false;
        for (int f = 0; f < m; ++f) {
            if (q(u, f) != q(0, f) || p(u, f) != p(0, f)) return false;
        }
    }
    return true;
}

void NetworkConfig::set_uniform_P() {
    P.assign(static_cast<std::size_t>(n) * m, 1.0 / m);
}

void NetworkConfig::set_zipf_Q(double gamma) {
    std::vector<double> row = zipf_distribution(m, gamma);
    Q.resize(static_cast<std::size_t>(n) * m);
    for (int u = 0; u < n; ++u) {
        std::copy(row.begin(), row.end(), Q.begin() + static_cast<std::size_t>(u) * m);
    }
}

namespace {

std::vector<double> parse_per_user(const nlohmann::json& j, int n, const char* field) {
    std::vector<double> out;
    if (j.is_number()) {
        out.assign(n, j.get<double>());
    } else if (j.is_array()) {
        out = j.get<std::vector<double>>();
        if (static_cast<int>(out.size()) != n) {
            throw ConfigError(std::string(field) + " array must have n entries");
        }
    } else {
        throw ConfigError(std::string(field) + " must be a number or array");
    }
    return out;
}

std::vector<double> parse_matrix(const nlohmann::json& j, int n, int m, const char* field) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
        throw ConfigError(std::string(field) + " matrix must have n rows");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) * m);
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != m) {
            throw ConfigError(std::string(field) + " rows must have m entries");
        }
        for (const auto& v : row) out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

NetworkConfig NetworkConfig::from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    NetworkConfig cfg;
    try {
        cfg.m = j.at("m").get<int>();
        cfg.n = j.at("n").get<int>();
        cfg.B = j.at("B").get<int>();
        cfg.M = parse_per_user(j.at("M"), cfg.n, "M");
        {
            std::vector<double> l = parse_per_user(j.at("L"), cfg.n, "L");
            cfg.L.resize(cfg.n);
            for (int u = 0; u < cfg.n; ++u) cfg.L[u] = static_cast<int>(l[u]);
        }
        const auto& qj = j.at("Q");
        if (qj.is_object() && qj.contains("zipf")) {
            cfg.set_zipf_Q(qj.at("zipf").at("gamma").get<double>());
        } else if (qj.is_object() && qj.contains("matrix")) {
            cfg.Q = parse_matrix(qj.at("matrix"), cfg.n, cfg.m, "Q");
        } else {
            throw ConfigError("Q must be {\"zipf\":{\"gamma\":g}} or {\"matrix\":[...]}");
        }
        const auto& pj = j.at("P");
        if (pj.is_string() && pj.get<std::string>() == "uniform") {
            cfg.set_uniform_P();
        } else if (pj.is_object() && pj.contains("uniform")) {
            cfg.set_uniform_P();
        } else if (pj.is_object() && pj.contains("matrix")) {
            cfg.P = parse_matrix(pj.at("matrix"), cfg.n, cfg.m, "P");
        } else {
            throw ConfigError("P must be \"uniform\" or {\"matrix\":[...]}");
        }
        cfg.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string NetworkConfig::to_json_string() const {
    nlohmann::json j;
    j["m"] = m;
    j["n"] = n;
    j["B"] = B;
    j["M"] = M;
    j["L"] = L;
    auto matrix = [&](const std::vector<double>& a) {
        nlohmann::json rows = nlohmann::json::array();
        for (int u = 0; u < n; ++u) {
            rows.push_back(std::vector<double>(a.begin() + static_cast<std::size_t>(u) * m,
                                               a.begin() + static_cast<std::size_t>(u + 1) * m));
        }
        return rows;
    };
    j["Q"] = nlohmann::json{{"matrix", matrix(Q)}};
    j["P"] = nlohmann::json{{"matrix", matrix(P)}};
    j["seed"] = seed;
    return j.dump();
}

CacheRealization::CacheRealization(int n, int m, int B)
    : n_(n), m_(m), B_(B),
      bits_((static_cast<std::uint64_t>(n) * m * B + 63) / 64, 0),
      counts_(static_cast<std::size_t>(n) * m, 0) {}

long long CacheRealization::total(int user) const {
    long long s = 0;
    for (int f = 0; f < m_; ++f) s += count(user, f);
    return s;
}

std::vector<int> CacheRealization::packets(int user, int file0) const {
    std::vector<int> out;
    out.reserve(count(user, file0));
    for (int k = 0; k < B_; ++k) {
        if (cached(user, file0, k)) out.push_back(k + 1);
    }
    return out;
}

void CacheRealization::insert(int user, int file0, int packet0) {
    std::uint64_t bit = bit_index(user, file0, packet0);
    std::uint64_t& word = bits_[bit >> 6];
    std::uint64_t mask = std::uint64_t{1} << (bit & 63);
    if (!(word & mask)) {
        word |= mask;
        counts_[static_cast<std::size_t>(user) * m_ + file0]++;
    }
}

CacheRealization CacheRealization::from_sets(
    const NetworkConfig& cfg, const std::vector<std::vector<std::vector<int>>>& sets) {
    if (static_cast<int>(sets.size()) != cfg.n) {
        throw InvalidInputError("cache sets: wrong user count");
    }
    CacheRealization c(cfg.n, cfg.m, cfg.B);
    for (int u = 0; u < cfg.n; ++u) {
        if (static_cast<int>(sets[u].size()) != cfg.m) {
            throw InvalidInputError("cache sets: wrong file count for user " + std::to_string(u));
        }
        for (int f = 0; f < cfg.m; ++f) {
            for (int pk : sets[u][f]) {
                if (pk < 1 || pk > cfg.B) throw InvalidInputError("cache sets: packet index out of range");
                c.insert(u, f, pk - 1);
            }
        }
    }
    return c;
}

std::vector<double> zipf_distribution(int m, double gamma) {
    if (m < 1) throw ConfigError("zipf_distribution: m must be >= 1");
    if (gamma < 0.0) throw ConfigError("zipf_distribution: gamma must be >= 0");
    std::vector<double> q(m);
    long double norm = 0.0L;
    for (int f = 1; f <= m; ++f) {
        long double w = std::exp(-gamma * std::log(static_cast<long double>(f)));
        q[f - 1] = static_cast<double>(w);
        norm += w;
    }
    for (int f = 0; f < m; ++f) q[f] = static_cast<double>(q[f] / norm);
    return q;
}

std::vector<int> apportion_largest_remainder(const std::vector<double>& targets, long long budget) {
    const int k = static_cast<int>(targets.size());
    std::vector<int> counts(k, 0);
    std::vector<std::pair<double, int>> rema;
    rema.reserve(k);
    long long assigned = 0;
    for (int i = 0; i < k; ++i) {
        double t = targets[i];
        long long fl = static_cast<long long>(std::floor(t + 1e-9));
        counts[i] = static_cast<int>(fl);
        assigned += fl;
        rema.emplace_back(t - static_cast<double>(fl), i);
    }
    long long remaining = budget - assigned;
    if (remaining > 0) {
        std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (int r = 0; r < static_cast<int>(remaining) && r < k; ++r) {
            counts[rema[r].second]++;
        }
    }
    return counts;
}

CacheRealization rap_place(const NetworkConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    CacheRealization c(cfg.n, cfg.m, cfg.B);
    Rng rng(seed_combine(seed, 0x9a9c'0c4d'5b1e'7f02ULL));
    std::vector<int> pool(cfg.B);
    for (int u = 0; u < cfg.n; ++u) {
        const long long budget = static_cast<long long>(std::floor(cfg.M[u] * cfg.B + 1e-9));
        if (budget == 0) continue;
        std::vector<double> targets(cfg.m);
        for (int f = 0; f < cfg.m; ++f) {
            double t = cfg.p(u, f) * cfg.M[u] * cfg.B;
            if (t > cfg.B + 1e-6) {
                throw ConfigError("p[" + std::to_string(f) + "] * M_u * B exceeds B for user " +
                                  std::to_string(u));
            }
            targets[f] = std::min(t, static_cast<double>(cfg.B));
        }
        std::vector<int> counts = apportion_largest_remainder(targets, budget);
        for (int f = 0; f < cfg.m; ++f) {
            int want = counts[f];
            if (want == 0) continue;
            // partial Fisher-Yates draw of `want` distinct packets
            std::iota(pool.begin(), pool.end(), 0);
            for (int i = 0; i < want; ++i) {
                int j = i + static_cast<int>(rng.below(cfg.B - i));
                std::swap(pool[i], pool[j]);
                c.insert(u, f, pool[i]);
            }
        }
    }
    return c;
}

CacheRealization lfu_place(const NetworkConfig& cfg) {
    cfg.validate();
    CacheRealization c(cfg.n, cfg.m, cfg.B);
    for (int u = 0; u < cfg.n; ++u) {
        int keep = static_cast<int>(std::floor(cfg.M[u] + 1e-9));
        if (keep <= 0) continue;
        keep = std::min(keep, cfg.m);
        std::vector<int> order(cfg.m);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (cfg.q(u, a) != cfg.q(u, b)) return cfg.q(u, a) > cfg.q(u, b);
            return a < b;
        });
        for (int r = 0; r < keep; ++r) {
            for (int k = 0; k < cfg.B; ++k) c.insert(u, order[r], k);
        }
    }
    return c;
}

DemandRealization DemandRealization::from_requests(const NetworkConfig& cfg,
                                                   const std::vector<std::vector<int>>& requests,
                                                   const CacheRealization& cache) {
    if (static_cast<int>(requests.size()) != cfg.n) {
        throw InvalidInputError("requests: wrong user count");
    }
    DemandRealization w;
    w.requests = requests;
    w.distinct_files.resize(cfg.n);
    w.needed.resize(cfg.n);
    for (int u = 0; u < cfg.n; ++u) {
        std::vector<int> d = requests[u];
        for (int f : d) {
            if (f < 1 || f > cfg.m) throw InvalidInputError("requests: file index out of range");
        }
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        w.distinct_files[u] = d;
        w.needed[u].resize(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            int f0 = d[i] - 1;
            auto& miss = w.needed[u][i];
            miss.reserve(cfg.B - cache.count(u, f0));
            for (int k = 0; k < cfg.B; ++k) {
                if (!cache.cached(u, f0, k)) miss.push_back(k + 1);
            }
        }
    }
    return w;
}

DemandRealization sample_demands(const NetworkConfig& cfg, std::uint64_t seed,
                                 const CacheRealization& cache) {
    cfg.validate();
    Rng rng(seed_combine(seed, 0x51d6'83a8'2f63'11c7ULL));
    std::vector<std::vector<int>> requests(cfg.n);
    std::vector<double> cdf(cfg.m);
    for (int u = 0; u < cfg.n; ++u) {
        double acc = 0.0;
        for (int f = 0; f < cfg.m; ++f) {
            acc += cfg.q(u, f);
            cdf[f] = acc;
        }
        cdf[cfg.m - 1] = 1.0;
        requests[u].resize(cfg.L[u]);
        for (int i = 0; i < cfg.L[u]; ++i) {
            double x = rng.unit();
            int f = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
            if (f >= cfg.m) f = cfg.m - 1;
            requests[u][i] = f + 1;
        }
    }
    return DemandRealization::from_requests(cfg, requests, cache);
}

}  // namespace cachecast
