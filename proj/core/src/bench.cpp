#include "dscem/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "dscem/lcd.hpp"
#include "dscem/linalg.hpp"
#include "svg_plot.hpp"

namespace dscem {
namespace {

constexpr const char* kCsvSchema = "# dscem csv v1";

std::string fmt17(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

std::string resolve_cache_dir(const ExperimentPlan& plan) {
    if (!plan.cache_dir.empty()) return plan.cache_dir;
    if (const char* env = std::getenv("DSCEM_CACHE_DIR"); env && *env) return env;
    return "dscem-cache";
}

// Quartile by linear interpolation (the convention is noted in CSV headers).
double quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    if (v.size() == 1) return v[0];
    const double h = (v.size() - 1) * p;
    const std::size_t i = static_cast<std::size_t>(h);
    if (i + 1 >= v.size()) return v.back();
    return v[i] + (h - i) * (v[i + 1] - v[i]);
}

std::string method_color(const std::string& name) {
    static const std::map<std::string, std::string> colors{
        {"icem", "#d62728"},          {"dscem-var-v1", "#1f77b4"},
        {"dscem-var-v2", "#2ca02c"},  {"dscem-var-v3", "#9467bd"},
        {"dscem-cov-v3", "#ff7f0e"},  {"icem-baseline", "#7f7f7f"},
    };
    const auto it = colors.find(name);
    return it == colors.end() ? "#000000" : it->second;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::Icem: return "icem";
        case Method::DscemVarV1: return "dscem-var-v1";
        case Method::DscemVarV2: return "dscem-var-v2";
        case Method::DscemVarV3: return "dscem-var-v3";
        case Method::DscemCovV3: return "dscem-cov-v3";
        case Method::IcemBaseline: return "icem-baseline";
    }
    return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
    for (Method m : {Method::Icem, Method::DscemVarV1, Method::DscemVarV2,
                     Method::DscemVarV3, Method::DscemCovV3, Method::IcemBaseline})
        if (method_name(m) == name) return m;
    return std::nullopt;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_plan: cannot open " + path);
    ExperimentPlan plan;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "task") {
            plan.task_id = value;
        } else if (key == "methods") {
            plan.methods.clear();
            for (const auto& name : split(value, ',')) {
                const auto m = method_from_name(trim(name));
                if (!m) throw std::invalid_argument("load_plan: unknown method '" + name + "'");
                plan.methods.push_back(*m);
            }
        } else if (key == "sizes") {
            plan.sample_sizes.clear();
            for (const auto& s : split(value, ',')) plan.sample_sizes.push_back(std::stoi(s));
        } else if (key == "runs") {
            plan.runs_per_cell = std::stoi(value);
        } else if (key == "base_seed") {
            plan.base_seed = std::stoull(value);
        } else if (key == "n_iter") {
            plan.n_iter = std::stoi(value);
        } else if (key == "n_elite") {
            plan.n_elite = std::stoi(value);
        } else if (key == "n_elite_cov") {
            plan.n_elite_cov = std::stoi(value);
        } else if (key == "baseline_samples") {
            plan.baseline_samples = std::stoi(value);
        } else if (key == "convergence_samples") {
            plan.convergence_samples = std::stoi(value);
        } else if (key == "cache_dir") {
            plan.cache_dir = value;
        } else if (key == "threads") {
            plan.threads = std::stoi(value);
        } else {
            throw std::invalid_argument("load_plan: unknown key '" + key + "'");
        }
    }
    return plan;
}

std::uint64_t controller_seed(const ExperimentPlan& plan, Method m, int samples, int run) {
    return fnv1a_hash(std::to_string(plan.base_seed) + "|" + method_name(m) + "|" +
                      std::to_string(samples) + "|" + std::to_string(run));
}

std::uint64_t environment_seed(const ExperimentPlan& plan, int run) {
    return fnv1a_hash(std::to_string(plan.base_seed) + "|env|" + plan.task_id + "|" +
                      std::to_string(run));
}

CemConfig make_method_config(const ExperimentPlan& plan, const TaskSpec& task, Method m,
                             int samples) {
    const int d = task.control_dim * task.horizon;
    CemConfig config;
    config.n_samples = (m == Method::IcemBaseline) ? plan.baseline_samples : samples;
    config.n_elite = (m == Method::DscemCovV3) ? plan.n_elite_cov : plan.n_elite;
    config.n_iter = plan.n_iter;
    config.momentum = 0.1;
    config.elite_carry_fraction = 0.3;
    config.decay = 1.0;  // disabled for equal rollout budgets
    config.adapt = (m == Method::DscemCovV3) ? AdaptKind::M2 : AdaptKind::M1;

    switch (m) {
        case Method::Icem:
        case Method::IcemBaseline:
            config.sampler = SamplerKind::IcemRandom;
            break;
        case Method::DscemVarV1:
            config.sampler = SamplerKind::Deterministic;
            config.scheme.kind = VarietyKind::V1RandomRotation;
            break;
        case Method::DscemVarV2:
            config.sampler = SamplerKind::Deterministic;
            config.scheme.kind = VarietyKind::V2JointDeterministic;
            break;
        case Method::DscemVarV3:
        case Method::DscemCovV3:
            config.sampler = SamplerKind::Deterministic;
            config.scheme.kind = VarietyKind::V3Combined;
            break;
    }

    if (config.sampler == SamplerKind::Deterministic) {
        const std::string cache_dir = resolve_cache_dir(plan);
        config.scheme.n_iter = plan.n_iter;
        auto fetch = [&](int dim, int count) {
            if (plan.strict_cache) {
                const SampleCacheKey key{dim, count};
                const std::string path =
                    (std::filesystem::path(cache_dir) / cache_file_name(key)).string();
                return std::make_shared<const SampleSet>(load_cache(key, path));
            }
            return std::make_shared<const SampleSet>(
                load_or_optimize(dim, count, cache_dir));
        };
        if (config.scheme.kind == VarietyKind::V1RandomRotation)
            config.scheme.base = fetch(d, config.n_samples);
        else
            config.scheme.joint = fetch(d * plan.n_iter, config.n_samples);
    }
    return config;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows) {
    std::map<std::pair<std::string, int>, std::vector<const RunRow*>> cells;
    for (const auto& r : rows) cells[{method_name(r.method), r.samples}].push_back(&r);

    std::vector<AggregateRow> out;
    for (const auto& [key, cell] : cells) {
        for (const std::string& metric : {std::string("cumulative_cost"),
                                          std::string("smoothness")}) {
            std::vector<double> values;
            int failures = 0;
            for (const RunRow* r : cell) {
                const double v = metric == "smoothness" ? r->smoothness : r->cumulative_cost;
                if (std::isfinite(v))
                    values.push_back(v);
                else
                    ++failures;
            }
            if (values.empty()) {
                std::cerr << "warning: no finite values for " << key.first << " N=" << key.second
                          << " " << metric << "; cell omitted\n";
                continue;
            }
            AggregateRow row;
            row.method = key.first;
            row.samples = key.second;
            row.metric = metric;
            row.median = quantile(values, 0.5);
            row.q25 = quantile(values, 0.25);
            row.q75 = quantile(values, 0.75);
            row.count = static_cast<int>(values.size());
            row.failures = failures;
            out.push_back(row);
        }
    }
    return out;
}

ExperimentOutput run_experiment(const ExperimentPlan& plan, const TaskSpec& task) {
    if (plan.methods.empty()) throw std::invalid_argument("run_experiment: no methods");
    if (plan.sample_sizes.empty()) throw std::invalid_argument("run_experiment: no sizes");
    if (plan.runs_per_cell < 1) throw std::invalid_argument("run_experiment: no runs");

    const int max_size = *std::max_element(plan.sample_sizes.begin(), plan.sample_sizes.end());
    const int threads =
        plan.threads > 0 ? plan.threads
                         : std::max(1u, std::thread::hardware_concurrency());

    ExperimentOutput output;
    for (Method m : plan.methods) {
        std::vector<int> sizes = plan.sample_sizes;
        if (m == Method::IcemBaseline) sizes = {plan.baseline_samples};
        for (int n : sizes) {
            if (m == Method::DscemCovV3 && n < plan.n_elite_cov) {
                std::cerr << "warning: skipping dscem-cov-v3 at N=" << n
                          << " (needs N >= " << plan.n_elite_cov << ")\n";
                continue;
            }
            const CemConfig config = make_method_config(plan, task, m, n);
            const bool keep_trace =
                (m != Method::IcemBaseline) && (n == plan.convergence_samples || n == max_size);

            std::vector<RunRow> cell(plan.runs_per_cell);
            std::vector<std::vector<TraceRow>> cell_traces(plan.runs_per_cell);
            std::vector<std::thread> pool;
            const int workers = std::min(threads, plan.runs_per_cell);
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    for (int run = w; run < plan.runs_per_cell; run += workers) {
                        RunRow row;
                        row.method = m;
                        row.samples = n;
                        row.run = run;
                        row.controller_seed = controller_seed(plan, m, n, run);
                        row.env_seed = environment_seed(plan, run);
                        const auto t0 = std::chrono::steady_clock::now();
                        const RunRecord rec =
                            run_closed_loop(task, config, row.controller_seed, row.env_seed);
                        row.wall_time_s = std::chrono::duration<double>(
                                              std::chrono::steady_clock::now() - t0)
                                              .count();
                        row.cumulative_cost = rec.cumulative_cost;
                        row.smoothness = rec.smoothness;
                        row.success = rec.success;
                        row.rollouts = rec.rollouts;
                        cell[run] = row;
                        if (keep_trace) {
                            auto& tr = cell_traces[run];
                            tr.reserve(rec.stage_costs.size());
                            for (std::size_t k = 0; k < rec.stage_costs.size(); ++k)
                                tr.push_back({m, n, run, static_cast<int>(k),
                                              rec.stage_costs[k], rec.controls[k]});
                        }
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (auto& row : cell) output.runs.push_back(row);
            for (auto& tr : cell_traces)
                output.traces.insert(output.traces.end(), tr.begin(), tr.end());
        }
    }

    output.aggregates = aggregate(output.runs);

    std::filesystem::create_directories(plan.out_dir);
    const std::filesystem::path dir(plan.out_dir);
    write_runs_csv(output.runs, (dir / "runs.csv").string());
    write_traces_csv(output.traces, (dir / "traces.csv").string());
    write_aggregates_csv(output.aggregates, (dir / "aggregates.csv").string());
    return output;
}

void write_runs_csv(const std::vector<RunRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << kCsvSchema << "\n";
    out << "method,samples,run,controller_seed,env_seed,cumulative_cost,smoothness,"
           "success,wall_time_s,rollouts\n";
    for (const auto& r : rows)
        out << method_name(r.method) << "," << r.samples << "," << r.run << ","
            << r.controller_seed << "," << r.env_seed << "," << fmt17(r.cumulative_cost)
            << "," << fmt17(r.smoothness) << "," << (r.success ? 1 : 0) << ","
            << fmt17(r.wall_time_s) << "," << r.rollouts << "\n";
}

void write_traces_csv(const std::vector<TraceRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << kCsvSchema << "\n";
    out << "method,samples,run,step,stage_cost,control\n";
    for (const auto& r : rows)
        out << method_name(r.method) << "," << r.samples << "," << r.run << "," << r.step
            << "," << fmt17(r.stage_cost) << "," << fmt17(r.control) << "\n";
}

void write_aggregates_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << kCsvSchema << " | quartiles: linear interpolation over finite values\n";
    out << "method,samples,metric,median,q25,q75,count,failures\n";
    for (const auto& r : rows)
        out << r.method << "," << r.samples << "," << r.metric << "," << fmt17(r.median)
            << "," << fmt17(r.q25) << "," << fmt17(r.q75) << "," << r.count << ","
            << r.failures << "\n";
}

namespace {

std::vector<std::vector<std::string>> read_csv_body(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // schema comment
    if (line.rfind(kCsvSchema, 0) != 0)
        throw std::runtime_error("unexpected csv schema in " + path);
    std::getline(in, line);  // column header
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(split(line, ','));
    }
    return rows;
}

}  // namespace

std::vector<RunRow> read_runs_csv(const std::string& path) {
    std::vector<RunRow> rows;
    for (const auto& f : read_csv_body(path)) {
        RunRow r;
        r.method = method_from_name(f[0]).value();
        r.samples = std::stoi(f[1]);
        r.run = std::stoi(f[2]);
        r.controller_seed = std::stoull(f[3]);
        r.env_seed = std::stoull(f[4]);
        r.cumulative_cost = std::stod(f[5]);
        r.smoothness = std::stod(f[6]);
        r.success = f[7] == "1";
        r.wall_time_s = std::stod(f[8]);
        r.rollouts = std::stol(f[9]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<TraceRow> read_traces_csv(const std::string& path) {
    std::vector<TraceRow> rows;
    for (const auto& f : read_csv_body(path)) {
        TraceRow r;
        r.method = method_from_name(f[0]).value();
        r.samples = std::stoi(f[1]);
        r.run = std::stoi(f[2]);
        r.step = std::stoi(f[3]);
        r.stage_cost = std::stod(f[4]);
        r.control = std::stod(f[5]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<AggregateRow> read_aggregates_csv(const std::string& path) {
    std::vector<AggregateRow> rows;
    for (const auto& f : read_csv_body(path)) {
        AggregateRow r;
        r.method = f[0];
        r.samples = std::stoi(f[1]);
        r.metric = f[2];
        r.median = std::stod(f[3]);
        r.q25 = std::stod(f[4]);
        r.q75 = std::stod(f[5]);
        r.count = std::stoi(f[6]);
        r.failures = std::stoi(f[7]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<std::string> plot_summary(const std::vector<AggregateRow>& aggregates,
                                      const std::vector<TraceRow>& traces,
                                      int convergence_samples, const std::string& out_dir) {
    if (aggregates.empty()) throw std::invalid_argument("plot_summary: no aggregates");
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    std::vector<std::string> written;

    auto sweep_panel = [&](const std::string& metric, const std::string& title,
                           const std::string& stem) {
        detail::SvgPlotSpec spec;
        spec.title = title;
        spec.x_label = "sample size N";
        spec.y_label = "median (IQR band)";
        std::map<std::string, std::vector<const AggregateRow*>> per_method;
        for (const auto& a : aggregates)
            if (a.metric == metric) per_method[a.method].push_back(&a);
        if (per_method.empty()) return;  // nothing recorded for this metric
        std::ofstream data((dir / (stem + ".csv")).string());
        data << kCsvSchema << "\nmethod,samples,median,q25,q75\n";
        data.precision(17);
        for (auto& [name, rows] : per_method) {
            std::sort(rows.begin(), rows.end(),
                      [](auto* a, auto* b) { return a->samples < b->samples; });
            detail::Series s;
            s.label = name;
            s.color = method_color(name);
            for (const auto* a : rows) {
                s.x.push_back(a->samples);
                s.y.push_back(a->median);
                s.band_lo.push_back(a->q25);
                s.band_hi.push_back(a->q75);
                data << name << "," << a->samples << "," << a->median << "," << a->q25 << ","
                     << a->q75 << "\n";
            }
            spec.series.push_back(std::move(s));
        }
        const std::string svg = (dir / (stem + ".svg")).string();
        detail::write_svg_plot(spec, svg);
        written.push_back(svg);
        written.push_back((dir / (stem + ".csv")).string());
    };
    sweep_panel("cumulative_cost", "Cumulative cost vs sample size", "cost_vs_samples");
    sweep_panel("smoothness", "Control smoothness vs sample size", "smoothness_vs_samples");

    if (!traces.empty()) {
        // Convergence: median stage cost per time step at the fixed N.
        std::map<std::string, std::map<int, std::vector<double>>> conv;
        int controls_n = 0;
        for (const auto& t : traces) controls_n = std::max(controls_n, t.samples);
        for (const auto& t : traces)
            if (t.samples == convergence_samples)
                conv[method_name(t.method)][t.step].push_back(t.stage_cost);

        if (!conv.empty()) {
            detail::SvgPlotSpec spec;
            spec.title = "Convergence (" + std::to_string(convergence_samples) + " samples)";
            spec.x_label = "time step";
            spec.y_label = "stage cost";
            std::ofstream data((dir / "convergence.csv").string());
            data << kCsvSchema << "\nmethod,step,median,q25,q75\n";
            data.precision(17);
            for (auto& [name, steps] : conv) {
                detail::Series s;
                s.label = name;
                s.color = method_color(name);
                for (auto& [step, vals] : steps) {
                    s.x.push_back(step);
                    s.y.push_back(quantile(vals, 0.5));
                    s.band_lo.push_back(quantile(vals, 0.25));
                    s.band_hi.push_back(quantile(vals, 0.75));
                    data << name << "," << step << "," << quantile(vals, 0.5) << ","
                         << quantile(vals, 0.25) << "," << quantile(vals, 0.75) << "\n";
                }
                spec.series.push_back(std::move(s));
            }
            const std::string svg = (dir / "convergence.svg").string();
            detail::write_svg_plot(spec, svg);
            written.push_back(svg);
            written.push_back((dir / "convergence.csv").string());
        }

        // Applied control inputs for every run at the largest traced N.
        std::map<std::string, std::map<int, std::vector<std::pair<int, double>>>> ctl;
        for (const auto& t : traces)
            if (t.samples == controls_n)
                ctl[method_name(t.method)][t.run].push_back({t.step, t.control});
        detail::SvgPlotSpec spec;
        spec.title = "Applied controls (" + std::to_string(controls_n) + " samples)";
        spec.x_label = "time step";
        spec.y_label = "control input";
        std::ofstream data((dir / "controls.csv").string());
        data << kCsvSchema << "\nmethod,run,step,control\n";
        data.precision(17);
        for (auto& [name, runs] : ctl) {
            bool first = true;
            for (auto& [run, pts] : runs) {
                std::sort(pts.begin(), pts.end());
                detail::Series s;
                s.label = name;
                s.color = method_color(name);
                s.opacity = 0.25;
                s.in_legend = first;
                first = false;
                for (auto& [step, u] : pts) {
                    s.x.push_back(step);
                    s.y.push_back(u);
                    data << name << "," << run << "," << step << "," << u << "\n";
                }
                spec.series.push_back(std::move(s));
            }
        }
        if (!spec.series.empty()) {
            const std::string svg = (dir / "controls.svg").string();
            detail::write_svg_plot(spec, svg);
            written.push_back(svg);
            written.push_back((dir / "controls.csv").string());
        }
    }
    return written;
}

}  // namespace dscem
