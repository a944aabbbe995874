#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cachecast/analysis.hpp"
#include "cachecast/coloring.hpp"
#include "cachecast/conflict_graph.hpp"
#include "cachecast/harness.hpp"
#include "cachecast/index_coding.hpp"
#include "cachecast/model.hpp"

namespace py = pybind11;
using namespace cachecast;

namespace {

NetworkConfig make_config(int m, int n, int B, std::vector<double> M, std::vector<int> L,
                          std::vector<std::vector<double>> Q, std::vector<std::vector<double>> P,
                          std::uint64_t seed) {
    NetworkConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.B = B;
    cfg.M = std::move(M);
    cfg.L = std::move(L);
    for (const auto& row : Q) cfg.Q.insert(cfg.Q.end(), row.begin(), row.end());
    for (const auto& row : P) cfg.P.insert(cfg.P.end(), row.begin(), row.end());
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

py::dict bound_to_dict(const RateBound& b) {
    py::dict d;
    d["m_bar"] = b.m_bar;
    d["M_bar"] = b.M_bar;
    d["psi"] = b.psi;
    d["psi_stderr"] = b.psi_stderr;
    d["r_gclc"] = b.r_gclc;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coded multicast caching simulator: placement, conflict-graph coloring, "
              "MDS index coding and rate bounds.";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DecodeError>(m, "DecodeError");

    py::class_<NetworkConfig>(m, "NetworkConfig")
        .def(py::init(&make_config), py::arg("m"), py::arg("n"), py::arg("B"), py::arg("M"),
             py::arg("L"), py::arg("Q"), py::arg("P"), py::arg("seed") = 0)
        .def_static("from_json", &NetworkConfig::from_json_string)
        .def("to_json", &NetworkConfig::to_json_string)
        .def_readonly("m", &NetworkConfig::m)
        .def_readonly("n", &NetworkConfig::n)
        .def_readonly("B", &NetworkConfig::B)
        .def_readonly("M", &NetworkConfig::M)
        .def_readonly("L", &NetworkConfig::L)
        .def("q", &NetworkConfig::q)
        .def("p", &NetworkConfig::p)
        .def("homogeneous", &NetworkConfig::homogeneous);

    py::class_<CacheRealization>(m, "CacheRealization")
        .def("count", &CacheRealization::count)
        .def("total", &CacheRealization::total)
        .def("packets", &CacheRealization::packets)
        .def("cached", [](const CacheRealization& c, int user, int file, int packet) {
            return c.cached(user, PacketId{file, packet});
        });

    py::class_<DemandRealization>(m, "DemandRealization")
        .def_readonly("requests", &DemandRealization::requests)
        .def_readonly("distinct_files", &DemandRealization::distinct_files)
        .def_readonly("needed", &DemandRealization::needed);

    py::class_<ConflictGraph>(m, "ConflictGraph")
        .def_property_readonly("num_vertices", &ConflictGraph::num_vertices)
        .def_property_readonly("num_edges", &ConflictGraph::num_edges)
        .def("user", &ConflictGraph::user)
        .def("packet",
             [](const ConflictGraph& g, int v) {
                 PacketId p = g.packet(v);
                 return py::make_tuple(p.file, p.index);
             })
        .def("out_neighbors", &ConflictGraph::out_neighbors)
        .def("in_neighbors", &ConflictGraph::in_neighbors)
        .def("undirected_neighbors", &ConflictGraph::undirected_neighbors)
        .def("closed_out_neighborhood", &ConflictGraph::closed_out_neighborhood)
        .def("edge_list", [](const ConflictGraph& g) {
            std::ostringstream os;
            g.write_edge_list(os);
            return os.str();
        });

    py::class_<Coloring>(m, "Coloring")
        .def_readonly("color_of", &Coloring::color_of)
        .def_readonly("num_colors", &Coloring::num_colors);

    py::class_<ColoringOutcome>(m, "ColoringOutcome")
        .def_readonly("coloring", &ColoringOutcome::coloring)
        .def_readonly("local_number", &ColoringOutcome::local_number)
        .def_property_readonly("algorithm", [](const ColoringOutcome& o) {
            return std::string(to_string(o.algorithm));
        });

    py::class_<VertexMeta>(m, "VertexMeta")
        .def_readonly("t_size", &VertexMeta::t_size)
        .def_readonly("k_size", &VertexMeta::k_size);

    m.def("zipf_distribution", &zipf_distribution, py::arg("m"), py::arg("gamma"));
    m.def("rap_place", &rap_place, py::arg("config"), py::arg("seed"));
    m.def("lfu_place", &lfu_place, py::arg("config"));
    m.def("sample_demands", &sample_demands, py::arg("config"), py::arg("seed"), py::arg("cache"));
    m.def("build_conflict_graph", &ConflictGraph::build, py::arg("config"), py::arg("cache"),
          py::arg("demand"));
    m.def("compute_vertex_meta", &compute_vertex_meta);
    m.def("local_number", &local_number);
    m.def(
        "gclc1",
        [](const ConflictGraph& g, const VertexMeta& meta, bool strict) {
            return gclc1(g, meta, Gclc1Options{strict});
        },
        py::arg("graph"), py::arg("meta"), py::arg("strict_set_equality") = false);
    m.def("gclc2", &gclc2);
    m.def(
        "hglc1",
        [](const ConflictGraph& g, const VertexMeta& meta, double a, double b, std::uint64_t seed,
           bool use_local_search) {
            return hglc1(g, meta, HglcParams{a, b}, seed, use_local_search);
        },
        py::arg("graph"), py::arg("meta"), py::arg("a") = 0.25, py::arg("b") = 0.25,
        py::arg("seed") = 1, py::arg("use_local_search") = true);
    m.def(
        "gclc",
        [](const ConflictGraph& g, const VertexMeta& meta) { return gclc(g, meta); },
        py::arg("graph"), py::arg("meta"));
    m.def(
        "hglc",
        [](const ConflictGraph& g, const VertexMeta& meta, double a, double b,
           std::uint64_t seed) { return hglc(g, meta, HglcParams{a, b}, seed); },
        py::arg("graph"), py::arg("meta"), py::arg("a") = 0.25, py::arg("b") = 0.25,
        py::arg("seed") = 1);
    m.def("local_search", &local_search);
    m.def("brute_force_oracle", &brute_force_oracle);

    m.def(
        "mds_generator",
        [](int chi, int nu, int q) {
            CodingMatrix G = mds_generator(chi, nu, GaloisField::by_bits(q));
            std::vector<std::vector<int>> rows(G.nu, std::vector<int>(G.chi));
            for (int r = 0; r < G.nu; ++r) {
                for (int c = 0; c < G.chi; ++c) rows[r][c] = G.at(r, c);
            }
            return rows;
        },
        py::arg("chi"), py::arg("nu"), py::arg("q") = 16);
    m.def(
        "verify_delivery",
        [](const NetworkConfig& cfg, const CacheRealization& cache, const DemandRealization& w,
           const ConflictGraph& g, const ColoringOutcome& o, std::uint64_t seed, int payload_len) {
            return verify_delivery(cfg, cache, w, g, o, seed, payload_len);
        },
        py::arg("config"), py::arg("cache"), py::arg("demand"), py::arg("graph"),
        py::arg("outcome"), py::arg("seed") = 1, py::arg("payload_len") = 2);

    m.def("m_bar", &m_bar);
    m.def("M_bar", &M_bar);
    m.def("lfu_rate", &lfu_rate);
    m.def(
        "gclc_bound",
        [](const NetworkConfig& cfg, long long samples, std::uint64_t seed) {
            PsiOptions opts;
            opts.samples = samples;
            opts.seed = seed;
            return bound_to_dict(gclc_bound(cfg, opts));
        },
        py::arg("config"), py::arg("samples") = 20000, py::arg("seed") = 1);
    m.def(
        "psi_homogeneous",
        [](std::vector<double> p, std::vector<double> q, double M, int L, int n) {
            PsiEstimate e = psi_homogeneous(p, q, M, L, n);
            return py::make_tuple(e.value, e.std_error);
        },
        py::arg("p"), py::arg("q"), py::arg("M"), py::arg("L"), py::arg("n"));
    m.def(
        "optimize_caching_distribution",
        [](std::vector<double> q, double M, int L, int n) {
            CachingOptimum opt = optimize_caching_distribution(q, M, L, n);
            py::dict d;
            d["p"] = opt.p;
            d["m_tilde"] = opt.m_tilde;
            d["bound"] = opt.bound;
            return d;
        },
        py::arg("q"), py::arg("M"), py::arg("L"), py::arg("n"));

    m.def(
        "run_experiment",
        [](const std::string& spec_json, int workers) {
            ExperimentSpec spec = ExperimentSpec::from_json_string(spec_json);
            ExperimentResult res = run_experiment(spec, workers);
            py::list records;
            for (const auto& r : res.records) {
                py::dict d;
                d["sweep_value"] = r.sweep_value;
                d["scheme"] = std::string(to_string(r.scheme));
                d["trial"] = r.trial;
                d["rate"] = r.rate;
                d["nu"] = r.nu;
                d["num_colors"] = r.num_colors;
                d["num_vertices"] = r.num_vertices;
                d["num_edges"] = r.num_edges;
                d["runtime_ms"] = r.runtime_ms;
                d["decode_ok"] = r.decode_ok;
                records.append(d);
            }
            py::list aggregates;
            for (const auto& a : res.aggregates) {
                py::dict d;
                d["sweep_param"] = a.sweep_param;
                d["value"] = a.value;
                d["scheme"] = std::string(to_string(a.scheme));
                d["mean_rate"] = a.mean_rate;
                d["ci95_lo"] = a.ci95_lo;
                d["ci95_hi"] = a.ci95_hi;
                d["trials"] = a.trials;
                aggregates.append(d);
            }
            std::ostringstream csv;
            write_csv(csv, res.aggregates);
            py::dict out;
            out["records"] = records;
            out["aggregates"] = aggregates;
            out["csv"] = csv.str();
            return out;
        },
        py::arg("spec_json"), py::arg("workers") = 0);
}
