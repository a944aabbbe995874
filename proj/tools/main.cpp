#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cachecast/analysis.hpp"
#include "cachecast/coloring.hpp"
#include "cachecast/conflict_graph.hpp"
#include "cachecast/harness.hpp"
#include "cachecast/index_coding.hpp"
#include "cachecast/model.hpp"

namespace {

using namespace cachecast;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// The config file may be a bare network object or a full experiment spec
// with a "network" field.
NetworkConfig load_network(const std::string& path) {
    std::string text = slurp(path);
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (!j.is_discarded() && j.contains("network")) {
        return NetworkConfig::from_json_string(j["network"].dump());
    }
    return NetworkConfig::from_json_string(text);
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, int trials_override,
                 long long seed_override, double a_override, double b_override,
                 const std::string& verify_override, int workers) {
    ExperimentSpec spec = ExperimentSpec::load(config_path);
    if (trials_override > 0) spec.trials = trials_override;
    if (seed_override >= 0) spec.seed = static_cast<std::uint64_t>(seed_override);
    if (a_override >= 0.0) spec.hglc.a = a_override;
    if (b_override >= 0.0) spec.hglc.b = b_override;
    if (verify_override == "on") spec.verify = VerifyCoding::On;
    else if (verify_override == "off") spec.verify = VerifyCoding::Off;
    else if (verify_override == "auto") spec.verify = VerifyCoding::Auto;
    spec.validate();

    std::filesystem::create_directories(out_dir);
    ExperimentResult result = run_experiment(spec, workers);

    {
        std::ofstream csv(out_dir + "/results.csv", std::ios::binary);
        write_csv(csv, result.aggregates);
    }
    {
        std::ofstream svg(out_dir + "/rates.svg", std::ios::binary);
        write_svg(svg, spec, result.aggregates);
    }
    write_csv(std::cout, result.aggregates);
    std::cerr << "wrote " << out_dir << "/results.csv and " << out_dir << "/rates.svg\n";
    return kExitOk;
}

int cmd_analyze(const std::string& config_path, long long samples, long long seed) {
    NetworkConfig cfg = load_network(config_path);
    PsiOptions opts;
    if (samples > 0) opts.samples = samples;
    if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
    RateBound bound = gclc_bound(cfg, opts);
    nlohmann::json j;
    j["m_bar"] = bound.m_bar;
    j["M_bar"] = bound.M_bar;
    j["psi"] = bound.psi;
    j["psi_stderr"] = bound.psi_stderr;
    j["r_gclc"] = bound.r_gclc;
    j["r_lfu"] = lfu_rate(cfg);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_oracle(const std::string& config_path, int max_vertices, const std::string& dump_coloring,
               const std::string& dump_graph) {
    NetworkConfig cfg = load_network(config_path);
    CacheRealization cache = rap_place(cfg, cfg.seed);
    DemandRealization demand = sample_demands(cfg, cfg.seed, cache);
    ConflictGraph graph = ConflictGraph::build(cfg, cache, demand);
    if (graph.num_vertices() > max_vertices) {
        throw ConfigError("instance has " + std::to_string(graph.num_vertices()) +
                          " vertices; oracle limit is " + std::to_string(max_vertices));
    }
    auto t0 = std::chrono::steady_clock::now();
    ColoringOutcome outcome = brute_force_oracle(graph);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    if (!dump_graph.empty()) {
        std::ofstream os(dump_graph);
        graph.write_edge_list(os);
    }
    if (!dump_coloring.empty()) {
        std::ofstream os(dump_coloring);
        write_coloring(os, outcome.coloring);
    }
    nlohmann::json j;
    j["num_vertices"] = graph.num_vertices();
    j["num_edges"] = graph.num_edges();
    j["num_colors"] = outcome.coloring.num_colors;
    j["local_number"] = outcome.local_number;
    j["rate"] = static_cast<double>(outcome.local_number) / cfg.B;
    j["runtime_ms"] = ms;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coded multicast caching simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    int trials = -1;
    long long seed = -1;
    double a = -1.0, b = -1.0;
    std::string verify = "";
    int workers = 0;

    auto* simulate = app.add_subcommand("simulate", "run a seeded Monte Carlo experiment");
    simulate->add_option("--config", config_path, "experiment JSON")->required();
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_option("--trials", trials, "override trial count");
    simulate->add_option("--seed", seed, "override base seed");
    simulate->add_option("--a", a, "HgLC pool fraction a");
    simulate->add_option("--b", b, "HgLC pool fraction b");
    simulate->add_option("--verify-coding", verify, "on|off|auto")
        ->check(CLI::IsMember({"on", "off", "auto"}));
    simulate->add_option("--workers", workers, "worker threads (0 = auto)");

    long long samples = -1;
    auto* analyze = app.add_subcommand("analyze", "closed-form rate bounds for a network config");
    analyze->add_option("--config", config_path, "network or experiment JSON")->required();
    analyze->add_option("--samples", samples, "Monte Carlo budget for psi");
    analyze->add_option("--seed", seed, "estimator seed");

    int max_vertices = 12;
    std::string dump_coloring, dump_graph;
    auto* oracle = app.add_subcommand("oracle", "exact local chromatic number of a small instance");
    oracle->add_option("--config", config_path, "network or experiment JSON")->required();
    oracle->add_option("--vertices", max_vertices, "vertex guard (<= 12)")
        ->check(CLI::Range(1, 12));
    oracle->add_option("--dump-coloring", dump_coloring, "write \"<vertex> <color>\" lines here");
    oracle->add_option("--dump-graph", dump_graph, "write the edge list here");

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) {
            return cmd_simulate(config_path, out_dir, trials, seed, a, b, verify, workers);
        }
        if (analyze->parsed()) return cmd_analyze(config_path, samples, seed);
        if (oracle->parsed()) return cmd_oracle(config_path, max_vertices, dump_coloring, dump_graph);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const cachecast::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cachecast::DecodeError& e) {
        std::cerr << "invariant breach: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
