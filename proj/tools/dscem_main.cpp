// Command-line front end: offline sample generation/inspection and the
// seeded benchmark harness (run / aggregate / plot).

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dscem/bench.hpp"
#include "dscem/lcd.hpp"
#include "dscem/proposal.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCache = 3;

dscem::TaskSpec task_for(const std::string& id) {
    if (id == "mountain-car") return dscem::mountain_car_task();
    if (id == "cart-pole") return dscem::cart_pole_task();
    throw std::invalid_argument("unknown task '" + id + "' (mountain-car|cart-pole)");
}

int cmd_samples_generate(int dim, int count, const std::string& out) {
    dscem::SampleOptimizerConfig config;
    const auto result = dscem::optimize_samples(dim, count, config);
    if (!result.converged) std::cerr << "warning: " << result.warning << "\n";
    dscem::save_cache(result.set, out);
    std::cout << "wrote d=" << dim << " N=" << count << " cvm=" << *result.set.cvm_score
              << " to " << out << "\n";
    return kExitOk;
}

int cmd_samples_inspect(const std::string& path) {
    const dscem::SampleSet set = dscem::load_cache(path);
    std::cout << "dim: " << set.dim << "\n";
    std::cout << "count: " << set.count << "\n";
    std::cout << "scheme: "
              << (set.scheme == dscem::SampleScheme::LcdOptimized ? "lcd-optimized"
                                                                  : "random-gaussian")
              << "\n";
    if (set.cvm_score) std::cout << "cvm_score: " << *set.cvm_score << "\n";
    const Eigen::VectorXd mean = set.points.colwise().mean();
    const Eigen::MatrixXd centered = set.points.rowwise() - mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / set.count;
    std::cout << "max |column mean|: " << mean.cwiseAbs().maxCoeff() << "\n";
    std::cout << "diag(cov) range: [" << cov.diagonal().minCoeff() << ", "
              << cov.diagonal().maxCoeff() << "]\n";
    double max_off = 0.0;
    for (int i = 0; i < set.dim; ++i)
        for (int j = 0; j < i; ++j) max_off = std::max(max_off, std::abs(cov(i, j)));
    std::cout << "max |off-diagonal cov|: " << max_off << "\n";
    return kExitOk;
}

int cmd_bench_run(const std::string& task_id, const std::string& plan_path,
                  const std::string& out_dir, bool desk, bool full, bool strict_cache) {
    dscem::ExperimentPlan plan;
    if (!plan_path.empty()) plan = dscem::load_plan(plan_path);
    if (!task_id.empty()) plan.task_id = task_id;
    if (desk) {
        plan.runs_per_cell = 20;
        plan.sample_sizes = {20, 50, 100, 300};
        plan.baseline_samples = 2000;
    } else if (full) {
        plan.runs_per_cell = 100;
        plan.sample_sizes = {20, 50, 100, 150, 200, 300};
        plan.baseline_samples = 10000;
    }
    plan.strict_cache = strict_cache;
    plan.out_dir = out_dir;

    const dscem::TaskSpec task = task_for(plan.task_id);
    const auto output = dscem::run_experiment(plan, task);
    std::cout << "wrote " << output.runs.size() << " run rows and "
              << output.aggregates.size() << " aggregate rows to " << out_dir << "\n";
    return kExitOk;
}

int cmd_bench_aggregate(const std::string& dir) {
    const std::filesystem::path p(dir);
    const auto rows = dscem::read_runs_csv((p / "runs.csv").string());
    const auto aggs = dscem::aggregate(rows);
    dscem::write_aggregates_csv(aggs, (p / "aggregates.csv").string());
    std::cout << "wrote " << aggs.size() << " aggregate rows\n";
    return kExitOk;
}

int cmd_bench_plot(const std::string& dir, int convergence_samples) {
    const std::filesystem::path p(dir);
    const auto aggs = dscem::read_aggregates_csv((p / "aggregates.csv").string());
    std::vector<dscem::TraceRow> traces;
    if (std::filesystem::exists(p / "traces.csv"))
        traces = dscem::read_traces_csv((p / "traces.csv").string());
    const auto files = dscem::plot_summary(aggs, traces, convergence_samples, dir);
    for (const auto& f : files) std::cout << f << "\n";
    return kExitOk;
}

int cmd_bench_corr(double beta, int horizon, const std::string& out) {
    const Eigen::MatrixXd corr = dscem::colored_correlation({beta, horizon, 1});
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out);
    os.precision(17);
    for (int i = 0; i < corr.rows(); ++i) {
        for (int j = 0; j < corr.cols(); ++j) os << (j ? "," : "") << corr(i, j);
        os << "\n";
    }
    std::cout << "wrote " << horizon << "x" << horizon << " correlation to " << out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic-sampling CEM-MPC toolkit"};
    app.require_subcommand(1);

    auto* samples = app.add_subcommand("samples", "deterministic sample sets");
    samples->require_subcommand(1);

    int gen_dim = 0, gen_count = 0;
    std::string gen_out;
    auto* gen = samples->add_subcommand("generate", "optimize and store a sample set");
    gen->add_option("--dim", gen_dim, "sample dimension")->required();
    gen->add_option("--count", gen_count, "number of samples")->required();
    gen->add_option("--out", gen_out, "output cache file")->required();

    std::string inspect_path;
    auto* inspect = samples->add_subcommand("inspect", "print sample set diagnostics");
    inspect->add_option("path", inspect_path, "cache file")->required();

    auto* bench = app.add_subcommand("bench", "benchmark harness");
    bench->require_subcommand(1);

    std::string run_task, run_plan, run_out = "bench-out";
    bool desk = false, full = false, strict_cache = false;
    auto* run = bench->add_subcommand("run", "run a seeded experiment sweep");
    run->add_option("--task", run_task, "mountain-car|cart-pole");
    run->add_option("--plan", run_plan, "plan config file (key = value)");
    run->add_option("--out", run_out, "output directory");
    run->add_flag("--desk", desk, "desk-scale protocol (20 runs, baseline 2000)");
    run->add_flag("--full", full, "full protocol (100 runs, baseline 10000)");
    run->add_flag("--strict-cache", strict_cache, "fail instead of generating missing caches");

    std::string agg_dir;
    auto* agg = bench->add_subcommand("aggregate", "recompute aggregates from runs.csv");
    agg->add_option("dir", agg_dir, "experiment output directory")->required();

    std::string plot_dir;
    int plot_conv_n = 50;
    auto* plot = bench->add_subcommand("plot", "render summary SVG panels");
    plot->add_option("dir", plot_dir, "experiment output directory")->required();
    plot->add_option("--convergence-samples", plot_conv_n, "N for the convergence panel");

    double corr_beta = 1.0;
    int corr_h = 30;
    std::string corr_out = "correlation.csv";
    auto* corr = bench->add_subcommand("corr", "dump a colored-noise correlation matrix");
    corr->add_option("--beta", corr_beta, "noise color exponent");
    corr->add_option("--horizon", corr_h, "horizon length");
    corr->add_option("--out", corr_out, "output CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_samples_generate(gen_dim, gen_count, gen_out);
        if (inspect->parsed()) return cmd_samples_inspect(inspect_path);
        if (run->parsed()) {
            if (desk && full) throw std::invalid_argument("--desk and --full are exclusive");
            return cmd_bench_run(run_task, run_plan, run_out, desk, full, strict_cache);
        }
        if (agg->parsed()) return cmd_bench_aggregate(agg_dir);
        if (plot->parsed()) return cmd_bench_plot(plot_dir, plot_conv_n);
        if (corr->parsed()) return cmd_bench_corr(corr_beta, corr_h, corr_out);
    } catch (const dscem::CacheMissError& e) {
        std::cerr << "cache error: " << e.what() << "\n";
        return kExitCache;
    } catch (const dscem::CacheKeyError& e) {
        std::cerr << "cache error: " << e.what() << "\n";
        return kExitCache;
    } catch (const dscem::CacheChecksumError& e) {
        std::cerr << "cache error: " << e.what() << "\n";
        return kExitCache;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
