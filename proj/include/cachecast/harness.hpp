#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cachecast/analysis.hpp"
#include "cachecast/coloring.hpp"
#include "cachecast/model.hpp"

namespace cachecast {

enum class Scheme { Gclc, Hglc, LfuSim, Gclc2Only, BoundGclc, BoundLfu };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

enum class VerifyCoding { Auto, On, Off };

// Experiment description: a network template, one swept parameter, the
// schemes to run and the Monte Carlo budget.
struct ExperimentSpec {
    NetworkConfig network;
    std::string sweep_param = "M";  // "M" or "B"
    std::vector<double> sweep_values;
    std::vector<Scheme> schemes;
    int trials = 1;
    std::uint64_t seed = 1;
    HglcParams hglc;
    VerifyCoding verify = VerifyCoding::Auto;

    void validate() const;
    static ExperimentSpec from_json_string(const std::string& text);
    static ExperimentSpec load(const std::string& path);
};

struct TrialRecord {
    double sweep_value = 0.0;
    Scheme scheme = Scheme::Gclc;
    int trial = 0;
    double rate = 0.0;  // file units
    int nu = 0;
    int num_colors = 0;
    int num_vertices = 0;
    long long num_edges = 0;
    double runtime_ms = 0.0;
    bool decode_ok = true;
};

struct AggregateRow {
    std::string sweep_param;
    double value = 0.0;
    Scheme scheme = Scheme::Gclc;
    double mean_rate = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
    int trials = 0;
};

struct ExperimentResult {
    std::vector<TrialRecord> records;      // (point, trial, scheme) order
    std::vector<AggregateRow> aggregates;  // (point, scheme) order
};

// Seed for the cache/demand realization of one trial; shared by all schemes
// so per-trial comparisons are paired.
std::uint64_t instance_seed(std::uint64_t base, int point_index, int trial);
// Seed for algorithm-internal randomness, scheme-specific.
std::uint64_t algorithm_seed(std::uint64_t base, int point_index, int trial, Scheme s);

// Runs every (sweep point x trial) on a worker pool and aggregates mean and
// normal-approximation 95% confidence intervals.  workers <= 0 resolves to
// the COLOR_THREADS environment variable, then the hardware count.
ExperimentResult run_experiment(const ExperimentSpec& spec, int workers = 0);

// CSV columns: sweep_param,value,scheme,mean_rate,ci95_lo,ci95_hi,trials.
void write_csv(std::ostream& os, const std::vector<AggregateRow>& rows);

// Line chart, one polyline per scheme.
void write_svg(std::ostream& os, const ExperimentSpec& spec,
               const std::vector<AggregateRow>& rows);

int resolve_workers(int requested);

}  // namespace cachecast
