#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dscem/mpc.hpp"

namespace dscem {

enum class Method {
    Icem,
    DscemVarV1,
    DscemVarV2,
    DscemVarV3,
    DscemCovV3,
    IcemBaseline,
};

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct ExperimentPlan {
    std::string task_id = "mountain-car";
    std::vector<Method> methods{Method::Icem, Method::DscemVarV2};
    std::vector<int> sample_sizes{20, 50, 100, 300};
    int runs_per_cell = 20;
    std::uint64_t base_seed = 1;
    int n_iter = 3;
    int n_elite = 10;
    int n_elite_cov = 40;
    int baseline_samples = 2000;     // 10000 under the full protocol
    int convergence_samples = 50;    // N used for the convergence panel traces
    bool strict_cache = false;
    std::string cache_dir;
    std::string out_dir = ".";
    int threads = 0;  // 0 = hardware concurrency
};

// Key=value plan file; unspecified keys keep their defaults.
ExperimentPlan load_plan(const std::string& path);

struct RunRow {
    Method method;
    int samples = 0;
    int run = 0;
    std::uint64_t controller_seed = 0;
    std::uint64_t env_seed = 0;
    double cumulative_cost = 0.0;
    double smoothness = 0.0;
    bool success = false;
    double wall_time_s = 0.0;
    long rollouts = 0;
};

struct TraceRow {
    Method method;
    int samples = 0;
    int run = 0;
    int step = 0;
    double stage_cost = 0.0;
    double control = 0.0;
};

struct AggregateRow {
    std::string method;
    int samples = 0;
    std::string metric;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    int count = 0;
    int failures = 0;  // non-finite values excluded from the quartiles
};

// Seeds are a pure function of (base seed, method, N, run) so any cell can be
// reproduced in isolation; environment seeds are shared across methods.
std::uint64_t controller_seed(const ExperimentPlan& plan, Method m, int samples, int run);
std::uint64_t environment_seed(const ExperimentPlan& plan, int run);

// CEM configuration for one (method, N) cell, with deterministic sample sets
// resolved through the plan's cache directory.
CemConfig make_method_config(const ExperimentPlan& plan, const TaskSpec& task, Method m,
                             int samples);

struct ExperimentOutput {
    std::vector<RunRow> runs;
    std::vector<TraceRow> traces;
    std::vector<AggregateRow> aggregates;
};

// Full seeded sweep; writes runs.csv, traces.csv and aggregates.csv into
// plan.out_dir and returns the rows.
ExperimentOutput run_experiment(const ExperimentPlan& plan, const TaskSpec& task);

// Quartiles by linear interpolation over finite values per (method, N, metric).
std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows);

void write_runs_csv(const std::vector<RunRow>& rows, const std::string& path);
void write_traces_csv(const std::vector<TraceRow>& rows, const std::string& path);
void write_aggregates_csv(const std::vector<AggregateRow>& rows, const std::string& path);
std::vector<RunRow> read_runs_csv(const std::string& path);
std::vector<TraceRow> read_traces_csv(const std::string& path);
std::vector<AggregateRow> read_aggregates_csv(const std::string& path);

// Static SVG panels (cost vs N, smoothness vs N, convergence, applied
// controls) plus the underlying plot data as CSV. Returns the files written.
std::vector<std::string> plot_summary(const std::vector<AggregateRow>& aggregates,
                                      const std::vector<TraceRow>& traces,
                                      int convergence_samples, const std::string& out_dir);

}  // namespace dscem
