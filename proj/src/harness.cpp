#include "cachecast/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cachecast/conflict_graph.hpp"
#include "cachecast/index_coding.hpp"
#include "cachecast/rng.hpp"

namespace cachecast {

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::Gclc: return "GCLC";
        case Scheme::Hglc: return "HGLC";
        case Scheme::LfuSim: return "LFU-sim";
        case Scheme::Gclc2Only: return "GCLC2-only";
        case Scheme::BoundGclc: return "bound-GCLC";
        case Scheme::BoundLfu: return "bound-LFU";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "GCLC") return Scheme::Gclc;
    if (name == "HGLC") return Scheme::Hglc;
    if (name == "LFU-sim") return Scheme::LfuSim;
    if (name == "GCLC2-only") return Scheme::Gclc2Only;
    if (name == "bound-GCLC") return Scheme::BoundGclc;
    if (name == "bound-LFU") return Scheme::BoundLfu;
    throw ConfigError("unknown scheme tag: " + name);
}

void ExperimentSpec::validate() const {
    network.validate();
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (sweep_values.empty()) throw ConfigError("sweep.values must be nonempty");
    if (schemes.empty()) throw ConfigError("schemes must be nonempty");
    if (sweep_param != "M" && sweep_param != "B") {
        throw ConfigError("sweep.param must be \"M\" or \"B\"");
    }
    if (hglc.a < 0.0 || hglc.a > 1.0 || hglc.b < 0.0 || hglc.b > 1.0) {
        throw ConfigError("hglc_params a, b must lie in [0, 1]");
    }
}

ExperimentSpec ExperimentSpec::from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("experiment parse error: ") + e.what());
    }
    ExperimentSpec spec;
    try {
        spec.network = NetworkConfig::from_json_string(j.at("network").dump());
        const auto& sweep = j.at("sweep");
        spec.sweep_param = sweep.at("param").get<std::string>();
        spec.sweep_values = sweep.at("values").get<std::vector<double>>();
        for (const auto& s : j.at("schemes")) {
            spec.schemes.push_back(scheme_from_string(s.get<std::string>()));
        }
        spec.trials = j.value("trials", 1);
        spec.seed = j.value("seed", std::uint64_t{1});
        if (j.contains("hglc_params")) {
            spec.hglc.a = j["hglc_params"].value("a", 0.25);
            spec.hglc.b = j["hglc_params"].value("b", 0.25);
        }
        if (j.contains("verify_coding")) {
            const auto& v = j["verify_coding"];
            if (v.is_boolean()) {
                spec.verify = v.get<bool>() ? VerifyCoding::On : VerifyCoding::Off;
            } else {
                std::string s = v.get<std::string>();
                if (s == "auto") spec.verify = VerifyCoding::Auto;
                else if (s == "on") spec.verify = VerifyCoding::On;
                else if (s == "off") spec.verify = VerifyCoding::Off;
                else throw ConfigError("verify_coding must be auto/on/off");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("experiment field error: ") + e.what());
    }
    spec.validate();
    return spec;
}

ExperimentSpec ExperimentSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_string(buf.str());
}

std::uint64_t instance_seed(std::uint64_t base, int point_index, int trial) {
    return seed_combine(seed_combine(base, 0x706f'696eULL + static_cast<std::uint64_t>(point_index)),
                        0x7472'6961ULL + static_cast<std::uint64_t>(trial));
}

std::uint64_t algorithm_seed(std::uint64_t base, int point_index, int trial, Scheme s) {
    return seed_combine(instance_seed(base, point_index, trial),
                        0x616c'67ULL + static_cast<std::uint64_t>(s));
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("COLOR_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

NetworkConfig apply_sweep(const NetworkConfig& base, const std::string& param, double value) {
    NetworkConfig cfg = base;
    if (param == "M") {
        std::fill(cfg.M.begin(), cfg.M.end(), value);
    } else {
        cfg.B = static_cast<int>(value);
    }
    cfg.validate();
    return cfg;
}

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

bool is_simulated(Scheme s) {
    return s == Scheme::Gclc || s == Scheme::Hglc || s == Scheme::LfuSim ||
           s == Scheme::Gclc2Only;
}

// All coloring-scheme records for one (point, trial) pair share one cache and
// demand realization, so per-trial ordering comparisons are paired.
std::vector<TrialRecord> run_trial(const ExperimentSpec& spec, const NetworkConfig& cfg,
                                   int point_index, double sweep_value, int trial) {
    std::vector<TrialRecord> records;
    const std::uint64_t iseed = instance_seed(spec.seed, point_index, trial);

    bool need_graph = false, need_lfu = false;
    for (Scheme s : spec.schemes) {
        if (s == Scheme::Gclc || s == Scheme::Hglc || s == Scheme::Gclc2Only) need_graph = true;
        if (s == Scheme::LfuSim) need_lfu = true;
    }

    CacheRealization rap_cache;
    DemandRealization rap_demand;
    ConflictGraph graph;
    VertexMeta meta;
    if (need_graph) {
        rap_cache = rap_place(cfg, iseed);
        rap_demand = sample_demands(cfg, iseed, rap_cache);
        graph = ConflictGraph::build(cfg, rap_cache, rap_demand);
        meta = compute_vertex_meta(cfg, rap_cache, rap_demand, graph);
    }

    bool verify = spec.verify == VerifyCoding::On ||
                  (spec.verify == VerifyCoding::Auto && graph.num_vertices() <= 5000);

    struct Timed {
        ColoringOutcome outcome;
        double ms = 0.0;
    };
    std::optional<Timed> gclc2_memo;
    auto eval_gclc2 = [&]() -> const Timed& {
        if (!gclc2_memo) {
            double t0 = now_ms();
            Timed t;
            t.outcome = gclc2(graph);
            t.ms = now_ms() - t0;
            gclc2_memo = std::move(t);
        }
        return *gclc2_memo;
    };

    for (Scheme s : spec.schemes) {
        if (!is_simulated(s)) continue;
        TrialRecord rec;
        rec.sweep_value = sweep_value;
        rec.scheme = s;
        rec.trial = trial;
        if (s == Scheme::LfuSim) {
            double t0 = now_ms();
            CacheRealization lfu = lfu_place(cfg);
            DemandRealization demand = sample_demands(cfg, iseed, lfu);
            int missing = 0;
            std::vector<char> seen(cfg.m, 0);
            for (int u = 0; u < cfg.n; ++u) {
                for (int f : demand.distinct_files[u]) {
                    if (lfu.count(u, f - 1) == cfg.B) continue;
                    if (!seen[f - 1]) {
                        seen[f - 1] = 1;
                        ++missing;
                    }
                }
            }
            rec.rate = static_cast<double>(missing);
            rec.runtime_ms = now_ms() - t0;
            records.push_back(rec);
            continue;
        }

        rec.num_vertices = graph.num_vertices();
        rec.num_edges = graph.num_edges();
        ColoringOutcome outcome;
        double ms = 0.0;
        if (graph.num_vertices() == 0) {
            rec.rate = 0.0;
            records.push_back(rec);
            continue;
        }
        if (s == Scheme::Gclc) {
            double t0 = now_ms();
            ColoringOutcome first = gclc1(graph, meta);
            ms = now_ms() - t0;
            const Timed& second = eval_gclc2();
            ms += second.ms;
            outcome = first.local_number <= second.outcome.local_number ? first : second.outcome;
        } else if (s == Scheme::Hglc) {
            double t0 = now_ms();
            ColoringOutcome first = hglc1(graph, meta, spec.hglc,
                                          algorithm_seed(spec.seed, point_index, trial, s));
            ms = now_ms() - t0;
            const Timed& second = eval_gclc2();
            ms += second.ms;
            outcome = first.local_number <= second.outcome.local_number ? first : second.outcome;
        } else {  // Gclc2Only
            const Timed& second = eval_gclc2();
            ms = second.ms;
            outcome = second.outcome;
        }
        rec.nu = outcome.local_number;
        rec.num_colors = outcome.coloring.num_colors;
        rec.rate = static_cast<double>(outcome.local_number) / cfg.B;
        rec.runtime_ms = ms;
        if (verify) {
            // Throws DecodeError on failure, aborting the experiment.
            verify_delivery(cfg, rap_cache, rap_demand, graph, outcome,
                            seed_combine(iseed, 0x7061'79ULL), 2);
            rec.decode_ok = true;
        }
        records.push_back(rec);
    }
    (void)need_lfu;
    return records;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, int workers) {
    spec.validate();
    const int W = resolve_workers(workers);
    const int points = static_cast<int>(spec.sweep_values.size());

    std::vector<NetworkConfig> point_cfgs;
    point_cfgs.reserve(points);
    for (double v : spec.sweep_values) {
        point_cfgs.push_back(apply_sweep(spec.network, spec.sweep_param, v));
    }

    // Simulated tasks: one per (point, trial).
    const int tasks = points * spec.trials;
    std::vector<std::vector<TrialRecord>> slots(tasks);
    std::atomic<int> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker_fn = [&]() {
        while (true) {
            int t = cursor.fetch_add(1);
            if (t >= tasks) return;
            const int pi = t / spec.trials;
            const int trial = t % spec.trials;
            try {
                slots[t] = run_trial(spec, point_cfgs[pi], pi, spec.sweep_values[pi], trial);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                cursor.store(tasks);
                return;
            }
        }
    };
    if (W <= 1 || tasks == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < std::min(W, tasks); ++w) pool.emplace_back(worker_fn);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ExperimentResult result;
    for (int t = 0; t < tasks; ++t) {
        for (const auto& rec : slots[t]) result.records.push_back(rec);
    }

    // Analytic schemes: one record per sweep point.
    for (int pi = 0; pi < points; ++pi) {
        for (Scheme s : spec.schemes) {
            if (is_simulated(s)) continue;
            TrialRecord rec;
            rec.sweep_value = spec.sweep_values[pi];
            rec.scheme = s;
            double t0 = now_ms();
            if (s == Scheme::BoundGclc) {
                PsiOptions opts;
                opts.seed = seed_combine(spec.seed, 0x626e'64ULL);
                rec.rate = gclc_bound(point_cfgs[pi], opts).r_gclc;
            } else {
                rec.rate = lfu_rate(point_cfgs[pi]);
            }
            rec.runtime_ms = now_ms() - t0;
            result.records.push_back(rec);
        }
    }

    // Aggregate in (point, scheme) order.
    for (int pi = 0; pi < points; ++pi) {
        for (Scheme s : spec.schemes) {
            std::vector<double> rates;
            for (const auto& rec : result.records) {
                if (rec.scheme == s && rec.sweep_value == spec.sweep_values[pi]) {
                    rates.push_back(rec.rate);
                }
            }
            if (rates.empty()) continue;
            AggregateRow row;
            row.sweep_param = spec.sweep_param;
            row.value = spec.sweep_values[pi];
            row.scheme = s;
            row.trials = static_cast<int>(rates.size());
            double mean = 0.0;
            for (double r : rates) mean += r;
            mean /= rates.size();
            double var = 0.0;
            for (double r : rates) var += (r - mean) * (r - mean);
            double half = 0.0;
            if (rates.size() > 1) {
                var /= (rates.size() - 1);
                half = 1.96 * std::sqrt(var / rates.size());
            }
            row.mean_rate = mean;
            row.ci95_lo = mean - half;
            row.ci95_hi = mean + half;
            result.aggregates.push_back(row);
        }
    }
    return result;
}

void write_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "sweep_param,value,scheme,mean_rate,ci95_lo,ci95_hi,trials\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%g,%s,%.6f,%.6f,%.6f,%d\n", row.sweep_param.c_str(),
                      row.value, to_string(row.scheme), row.mean_rate, row.ci95_lo, row.ci95_hi,
                      row.trials);
        os << buf;
    }
}

void write_svg(std::ostream& os, const ExperimentSpec& spec,
               const std::vector<AggregateRow>& rows) {
    const int width = 720, height = 480;
    const int ml = 70, mr = 180, mt = 30, mb = 60;
    const double plot_w = width - ml - mr, plot_h = height - mt - mb;

    double xmin = 1e300, xmax = -1e300, ymax = 0.0;
    for (const auto& r : rows) {
        xmin = std::min(xmin, r.value);
        xmax = std::max(xmax, r.value);
        ymax = std::max(ymax, r.ci95_hi);
    }
    if (rows.empty()) throw InvalidInputError("write_svg: no aggregate rows");
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.05;

    auto tx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * plot_w; };
    auto ty = [&](double y) { return mt + plot_h - y / ymax * plot_h; };

    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#9467bd", "#ff7f0e", "#8c564b"};

    char buf[256];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", ml,
                  mt + plot_h, ml + plot_w, mt + plot_h);
    os << buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%.1f\" stroke=\"black\"/>\n", ml, mt,
                  ml, mt + plot_h);
    os << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" font-size=\"14\">%s "
                  "(files)</text>\n",
                  ml + plot_w / 2, height - 15, spec.sweep_param.c_str());
    os << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"18\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"14\" "
                  "transform=\"rotate(-90 18 %.1f)\">average rate (file units)</text>\n",
                  mt + plot_h / 2, mt + plot_h / 2);
    os << buf;

    // axis ticks
    for (int i = 0; i <= 5; ++i) {
        double yv = ymax * i / 5.0;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" font-size=\"11\">%.1f</text>\n",
                      ml - 6, ty(yv) + 4, yv);
        os << buf;
    }
    for (const auto& r : rows) {
        if (r.value == xmin || r.value == xmax) {
            std::snprintf(buf, sizeof(buf),
                          "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
                          "font-size=\"11\">%g</text>\n",
                          tx(r.value), mt + plot_h + 16, r.value);
            os << buf;
        }
    }

    int series = 0;
    for (Scheme s : spec.schemes) {
        std::vector<const AggregateRow*> pts;
        for (const auto& r : rows) {
            if (r.scheme == s) pts.push_back(&r);
        }
        if (pts.empty()) continue;
        std::sort(pts.begin(), pts.end(),
                  [](const AggregateRow* a, const AggregateRow* b) { return a->value < b->value; });
        const char* color = kPalette[series % 6];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto* p : pts) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", tx(p->value), ty(p->mean_rate));
            os << buf;
        }
        os << "\"/>\n";
        for (const auto* p : pts) {
            std::snprintf(buf, sizeof(buf),
                          "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", tx(p->value),
                          ty(p->mean_rate), color);
            os << buf;
        }
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%d\" font-size=\"13\" fill=\"%s\">%s</text>\n",
                      ml + plot_w + 14, mt + 18 + 20 * series, color, to_string(s));
        os << buf;
        ++series;
    }
    os << "</svg>\n";
}

}  // namespace cachecast
