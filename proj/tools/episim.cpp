#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "episim/config.hpp"
#include "episim/ensemble.hpp"
#include "episim/errors.hpp"
#include "episim/exact.hpp"
#include "episim/graph.hpp"
#include "episim/io.hpp"
#include "episim/kernels.hpp"
#include "episim/nimfa.hpp"
#include "episim/regime.hpp"
#include "episim/sde.hpp"
#include "golden_configs.hpp"

namespace fs = std::filesystem;
using namespace episim;

namespace {

// Exit codes: 0 ok, 2 parse, 3 validation, 4 numerical, 5 I/O.
constexpr int exit_parse = 2;
constexpr int exit_validation = 3;
constexpr int exit_numerical = 4;
constexpr int exit_io = 5;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    bool quiet = false;
};

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Aligned key-value block for run summaries.
class Summary {
public:
    void add(std::string key, std::string value)
    {
        rows_.emplace_back(std::move(key), std::move(value));
    }
    void add(std::string key, double value) { add(std::move(key), fmt(value)); }
    void add(std::string key, std::size_t value)
    {
        add(std::move(key), std::to_string(value));
    }

    std::string str() const
    {
        std::size_t width = 0;
        for (const auto& [k, v] : rows_)
            width = std::max(width, k.size());
        std::string out;
        for (const auto& [k, v] : rows_) {
            out += k;
            out.append(width - k.size(), ' ');
            out += " = ";
            out += v;
            out += '\n';
        }
        return out;
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

const char* graph_kind_name(GraphConfig::Kind kind)
{
    switch (kind) {
    case GraphConfig::Kind::ring: return "ring";
    case GraphConfig::Kind::complete: return "complete";
    case GraphConfig::Kind::random: return "random";
    case GraphConfig::Kind::file: return "file";
    }
    return "?";
}

void describe_model(Summary& s, const RunConfig& cfg, const ContactGraph& g,
                    const ModelParams& p, const RegimeReport& report)
{
    const auto& spec = g.spectral();
    s.add("graph", std::string(graph_kind_name(cfg.graph.kind)) +
                       " (n=" + std::to_string(g.size()) +
                       ", edges=" + std::to_string(g.edge_count()) + ")");
    s.add("connected", g.is_connected() ? "yes" : "no (thresholds use global lambda1)");
    s.add("lambda1", spec.lambda1);
    s.add("beta", p.beta);
    s.add("delta", p.delta);
    s.add("noise_model", to_string(p.noise.model));
    s.add("noise_cap", p.noise.cap);
    s.add("tau", report.tau);
    s.add("tau_c1", report.tau_c1);
    s.add("tau_cs", report.tau_cs);
    s.add("tau_ps", report.tau_ps);
    s.add("drift_C", report.drift_c);
    s.add("label", to_string(report.label));
    s.add("margin", report.margin);
    s.add("kernels", std::string(kernels::active().name));
}

class Timer {
public:
    double elapsed_ms() const
    {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

RunConfig load_with_overrides(const CommonOpts& opts)
{
    RunConfig cfg = load_config(opts.config_path);
    if (opts.seed)
        cfg.run.seed = *opts.seed;
    if (opts.paths)
        cfg.run.paths = *opts.paths;
    return cfg;
}

fs::path resolve_output(const CommonOpts& opts, const std::string& configured,
                        const char* fallback)
{
    fs::path name = configured.empty() ? fs::path(fallback) : fs::path(configured);
    if (name.is_absolute())
        return name;
    return fs::path(opts.out_dir) / name;
}

void ensure_out_dir(const CommonOpts& opts)
{
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec)
        throw io_error("cannot create output directory '" + opts.out_dir +
                       "': " + ec.message());
}

void emit_summary(const CommonOpts& opts, const RunConfig& cfg, const Summary& s,
                  const char* fallback = "summary.txt")
{
    write_text_file(resolve_output(opts, cfg.outputs.summary, fallback), s.str());
    if (!opts.quiet)
        std::cout << s.str();
}

std::vector<double> marginal_grid(const RunConfig& cfg)
{
    const double step =
        cfg.run.dt.value_or(0.01) * static_cast<double>(cfg.run.save_every.value_or(10));
    std::vector<double> times{0.0};
    const auto count = static_cast<std::size_t>(std::llround(cfg.run.t_end / step));
    for (std::size_t k = 1; k <= count; ++k)
        times.push_back(static_cast<double>(k) * step);
    return times;
}

BinaryState binary_init(const RunConfig& cfg, std::size_t n)
{
    const StateVector x0 = make_init(cfg.init, n);
    BinaryState b;
    b.infected.reserve(n);
    for (double v : x0) {
        if (v != 0.0 && v != 1.0)
            throw validation_error(
                "the exact chain needs a binary initial state; set init to 0/1 values");
        b.infected.push_back(v == 1.0 ? 1 : 0);
    }
    return b;
}

int run_classify(const CommonOpts& opts)
{
    Timer timer;
    const RunConfig cfg = load_with_overrides(opts);
    ensure_out_dir(opts);
    const ContactGraph g = build_graph(cfg.graph);
    const ModelParams p = make_params(cfg);
    const RegimeReport report = classify(p, g.spectral());

    Summary s;
    s.add("run", "classify");
    describe_model(s, cfg, g, p, report);
    s.add("elapsed_ms", timer.elapsed_ms());
    emit_summary(opts, cfg, s);
    return 0;
}

int run_simulate_nimfa(const CommonOpts& opts)
{
    Timer timer;
    const RunConfig cfg = load_with_overrides(opts);
    ensure_out_dir(opts);
    const ContactGraph g = build_graph(cfg.graph);
    const ModelParams p = make_params(cfg);
    const StateVector x0 = make_init(cfg.init, g.size());
    const double dt = cfg.run.dt.value_or(1e-3);
    const std::size_t save_every = cfg.run.save_every.value_or(10);

    const Trajectory traj = integrate_nimfa(g, p, x0, cfg.run.t_end, dt, save_every);
    const fs::path csv = resolve_output(opts, cfg.outputs.csv, "trajectory.csv");
    write_trajectory_csv(csv, traj);

    const auto eq = endemic_equilibrium(g, p, 1e-12);
    double final_max = 0.0, eq_dev = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        final_max = std::max(final_max, traj.states.back()[i]);
        eq_dev = std::max(eq_dev, std::abs(traj.states.back()[i] - eq.x[i]));
    }

    Summary s;
    s.add("run", "simulate-nimfa");
    describe_model(s, cfg, g, p, classify(p, g.spectral()));
    s.add("scheme", traj.scheme);
    s.add("dt", dt);
    s.add("t_end", cfg.run.t_end);
    s.add("saved_points", traj.times.size());
    s.add("final_max", final_max);
    s.add("equilibrium_below_threshold", eq.below_threshold ? "yes" : "no");
    s.add("final_vs_equilibrium_maxdev", eq_dev);
    s.add("csv", csv.string());
    s.add("elapsed_ms", timer.elapsed_ms());
    emit_summary(opts, cfg, s);

    if (cfg.outputs.plot) {
        PlotSpec plot;
        plot.svg = csv.stem().string() + ".svg";
        plot.title = "mean-field trajectory";
        const std::size_t node = std::min<std::size_t>(4, g.size() - 1);
        plot.series.push_back(
            {csv.filename().string(), static_cast<int>(node + 2),
             "node " + std::to_string(node)});
        write_gnuplot_script(resolve_output(opts, "", "plot.gnuplot"), plot);
    }
    return 0;
}

int run_simulate_sde(const CommonOpts& opts)
{
    Timer timer;
    const RunConfig cfg = load_with_overrides(opts);
    ensure_out_dir(opts);
    const ContactGraph g = build_graph(cfg.graph);
    const ModelParams p = make_params(cfg);
    const StateVector x0 = make_init(cfg.init, g.size());
    const double dt = cfg.run.dt.value_or(1e-4);
    const std::size_t save_every = cfg.run.save_every.value_or(10);

    const SdePath path =
        simulate_sde(g, p, x0, cfg.run.t_end, cfg.run.seed, dt, save_every);
    const fs::path csv = resolve_output(opts, cfg.outputs.csv, "trajectory.csv");
    write_trajectory_csv(csv, path.trajectory);

    Summary s;
    s.add("run", "simulate-sde");
    describe_model(s, cfg, g, p, classify(p, g.spectral()));
    s.add("scheme", path.trajectory.scheme);
    s.add("dt", dt);
    s.add("t_end", cfg.run.t_end);
    s.add("seed", std::to_string(cfg.run.seed));
    s.add("steps", static_cast<std::size_t>(path.steps));
    s.add("saved_points", path.trajectory.times.size());
    s.add("clamp_events", static_cast<std::size_t>(path.clamp_events));
    s.add("clamp_frequency",
          static_cast<double>(path.clamp_events) /
              (static_cast<double>(path.steps) * static_cast<double>(g.size())));
    s.add("csv", csv.string());
    s.add("elapsed_ms", timer.elapsed_ms());
    emit_summary(opts, cfg, s);

    if (cfg.outputs.plot) {
        PlotSpec plot;
        plot.svg = csv.stem().string() + ".svg";
        plot.title = "stochastic trajectory (seed " + std::to_string(cfg.run.seed) + ")";
        const std::size_t node = std::min<std::size_t>(4, g.size() - 1);
        plot.series.push_back({csv.filename().string(), static_cast<int>(node + 2),
                               "node " + std::to_string(node)});
        write_gnuplot_script(resolve_output(opts, "", "plot.gnuplot"), plot);
    }
    return 0;
}

int run_ensemble_cmd(const CommonOpts& opts)
{
    Timer timer;
    const RunConfig cfg = load_with_overrides(opts);
    ensure_out_dir(opts);
    const ContactGraph g = build_graph(cfg.graph);
    const ModelParams p = make_params(cfg);
    const StateVector x0 = make_init(cfg.init, g.size());
    const double dt = cfg.run.dt.value_or(1e-4);
    const std::size_t save_every = cfg.run.save_every.value_or(100);
    const std::size_t paths = cfg.run.paths.value_or(100);

    const auto members = simulate_paths(g, p, x0, cfg.run.t_end, dt, save_every,
                                        paths, cfg.run.seed);
    const EnsembleStats stats = aggregate(members, cfg.run.seed);
    const fs::path csv = resolve_output(opts, cfg.outputs.csv, "ensemble.csv");
    write_ensemble_csv(csv, stats);

    // Extinction and persistence summaries over the member paths.
    const double horizon = stats.times.back() - stats.times.front();
    const double hold = std::min(2.0, horizon / 2.0);
    std::size_t extinct = 0;
    for (const auto& path : members)
        if (extinction_time(path, 1e-3, hold))
            ++extinct;

    Summary s;
    s.add("run", "ensemble");
    describe_model(s, cfg, g, p, classify(p, g.spectral()));
    s.add("dt", dt);
    s.add("t_end", cfg.run.t_end);
    s.add("paths", paths);
    s.add("master_seed", std::to_string(cfg.run.seed));
    s.add("saved_points", stats.times.size());
    s.add("clamp_events", static_cast<std::size_t>(stats.clamp_events));
    s.add("clamp_frequency",
          static_cast<double>(stats.clamp_events) /
              (static_cast<double>(stats.steps_per_path) *
               static_cast<double>(g.size()) * static_cast<double>(paths)));
    s.add("extinct_paths",
          std::to_string(extinct) + "/" + std::to_string(paths) +
              " (tol 0.001, hold " + fmt(hold) + ")");

    const auto eq = endemic_equilibrium(g, p, 1e-12);
    if (!eq.below_threshold) {
        double norm = 0.0;
        for (double v : eq.x)
            norm += v * v;
        const double chi = 0.5 * std::sqrt(norm);
        const auto perm = permanence_estimate(
            members, chi, stats.times.front() + horizon / 2.0, stats.times.back());
        s.add("permanence_chi", chi);
        s.add("permanence_frac", perm.frac);
    }
    s.add("csv", csv.string());
    s.add("elapsed_ms", timer.elapsed_ms());
    emit_summary(opts, cfg, s);

    if (cfg.outputs.plot) {
        PlotSpec plot;
        plot.svg = csv.stem().string() + ".svg";
        plot.title = "ensemble over " + std::to_string(paths) + " paths";
        plot.ylabel = "|X(t)| statistics";
        const int n = static_cast<int>(g.size());
        plot.series.push_back({csv.filename().string(), n + 2, "q05 |X|"});
        plot.series.push_back({csv.filename().string(), n + 3, "median |X|"});
        plot.series.push_back({csv.filename().string(), n + 4, "q95 |X|"});
        plot.series.push_back({csv.filename().string(), n + 5, "mean |X|"});
        write_gnuplot_script(resolve_output(opts, "", "plot.gnuplot"), plot);
    }
    return 0;
}

int run_exact(const CommonOpts& opts)
{
    Timer timer;
    const RunConfig cfg = load_with_overrides(opts);
    ensure_out_dir(opts);
    const ContactGraph g = build_graph(cfg.graph);
    const ModelParams p = make_params(cfg);
    const BinaryState x0 = binary_init(cfg, g.size());
    const auto times = marginal_grid(cfg);

    const bool monte_carlo = cfg.run.paths.has_value();
    const MarginalCurve curve =
        monte_carlo
            ? exact_marginals_mc(g, p, x0, times, *cfg.run.paths, cfg.run.seed)
            : exact_marginals_ode(g, p, x0, times);

    const fs::path csv = resolve_output(opts, cfg.outputs.csv, "marginals.csv");
    fs::path ci = csv;
    ci.replace_filename(csv.stem().string() + "_ci" + csv.extension().string());
    write_marginals_csv(csv, ci, curve);

    Summary s;
    s.add("run", "exact");
    describe_model(s, cfg, g, p, classify(p, g.spectral()));
    s.add("method", monte_carlo
                        ? "gillespie (" + std::to_string(*cfg.run.paths) + " paths)"
                        : "forward equations (" +
                              std::to_string(std::size_t{1} << g.size()) + " states)");
    s.add("grid_points", times.size());
    s.add("csv", csv.string());
    s.add("ci_csv", ci.string());
    s.add("elapsed_ms", timer.elapsed_ms());
    emit_summary(opts, cfg, s);

    if (cfg.outputs.plot) {
        PlotSpec plot;
        plot.svg = csv.stem().string() + ".svg";
        plot.title = "exact per-node infection marginals";
        const std::size_t node = std::min<std::size_t>(4, g.size() - 1);
        plot.series.push_back({csv.filename().string(), static_cast<int>(node + 2),
                               "node " + std::to_string(node)});
        write_gnuplot_script(resolve_output(opts, "", "plot.gnuplot"), plot);
    }
    return 0;
}

int run_compare_bound(const CommonOpts& opts)
{
    Timer timer;
    const RunConfig cfg = load_with_overrides(opts);
    ensure_out_dir(opts);
    const ContactGraph g = build_graph(cfg.graph);
    const ModelParams p = make_params(cfg);
    const BinaryState x0 = binary_init(cfg, g.size());
    const auto times = marginal_grid(cfg);

    const BoundReport report = nimfa_bound_report(g, p, x0, times);

    Summary s;
    s.add("run", "compare-bound");
    describe_model(s, cfg, g, p, classify(p, g.spectral()));
    s.add("grid_points", times.size());
    s.add("min_gap", report.min_gap);
    s.add("min_gap_node", report.node);
    s.add("min_gap_time", report.time);
    s.add("bound_holds", report.min_gap >= -1e-6 ? "yes" : "no");
    s.add("elapsed_ms", timer.elapsed_ms());
    emit_summary(opts, cfg, s);
    return 0;
}

int run_reproduce_figure(const CommonOpts& opts, const std::string& id)
{
    Timer timer;
    std::string text;
    for (const auto& [name, json] : golden::configs)
        if (name == id)
            text = json;
    if (text.empty()) {
        std::string known;
        for (const auto& [name, json] : golden::configs)
            known += std::string(known.empty() ? "" : ", ") + std::string(name);
        throw validation_error("unknown figure id '" + id + "' (known: " + known + ")");
    }

    RunConfig cfg = parse_config(text);
    if (opts.seed)
        cfg.run.seed = *opts.seed;
    ensure_out_dir(opts);

    const ContactGraph g = build_graph(cfg.graph);
    const ModelParams p = make_params(cfg);
    const StateVector x0 = make_init(cfg.init, g.size());

    const SdePath path = simulate_sde(g, p, x0, cfg.run.t_end, cfg.run.seed,
                                      cfg.run.dt.value_or(1e-4),
                                      cfg.run.save_every.value_or(100));
    const Trajectory reference = integrate_nimfa(g, p, x0, cfg.run.t_end, 1e-3, 10);

    const fs::path sde_csv = resolve_output(opts, "", (id + "_sde.csv").c_str());
    const fs::path ref_csv = resolve_output(opts, "", (id + "_nimfa.csv").c_str());
    write_trajectory_csv(sde_csv, path.trajectory);
    write_trajectory_csv(ref_csv, reference);

    Summary s;
    s.add("run", "reproduce-figure " + id);
    describe_model(s, cfg, g, p, classify(p, g.spectral()));
    s.add("seed", std::to_string(cfg.run.seed));
    s.add("dt", cfg.run.dt.value_or(1e-4));
    s.add("t_end", cfg.run.t_end);
    s.add("clamp_events", static_cast<std::size_t>(path.clamp_events));
    s.add("sde_csv", sde_csv.string());
    s.add("nimfa_csv", ref_csv.string());
    s.add("elapsed_ms", timer.elapsed_ms());
    emit_summary(opts, cfg, s, (id + "_summary.txt").c_str());

    if (cfg.outputs.plot) {
        const std::size_t node = std::min<std::size_t>(4, g.size() - 1);
        PlotSpec plot;
        plot.svg = id + ".svg";
        plot.title = "node " + std::to_string(node) + " infection probability (" + id + ")";
        plot.series.push_back({sde_csv.filename().string(),
                               static_cast<int>(node + 2), "stochastic path"});
        plot.series.push_back({ref_csv.filename().string(),
                               static_cast<int>(node + 2), "mean-field"});
        write_gnuplot_script(resolve_output(opts, "", (id + ".gnuplot").c_str()), plot);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SIS epidemics on contact networks with stochastic infection rates"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string figure_id;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("--config", opts.config_path, "run configuration (JSON)")
                ->required();
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--seed", opts.seed, "override run.seed");
        cmd->add_option("--paths", opts.paths, "override run.paths");
        cmd->add_flag("--quiet", opts.quiet, "suppress stdout summary");
    };

    auto* classify_cmd =
        app.add_subcommand("classify", "thresholds and regime label");
    add_common(classify_cmd, true);
    auto* nimfa_cmd =
        app.add_subcommand("simulate-nimfa", "integrate the mean-field system");
    add_common(nimfa_cmd, true);
    auto* sde_cmd =
        app.add_subcommand("simulate-sde", "one stochastic sample path");
    add_common(sde_cmd, true);
    auto* ensemble_cmd =
        app.add_subcommand("ensemble", "aggregate statistics over many paths");
    add_common(ensemble_cmd, true);
    auto* exact_cmd = app.add_subcommand(
        "exact", "exact-chain marginals (forward equations or Gillespie)");
    add_common(exact_cmd, true);
    auto* bound_cmd = app.add_subcommand(
        "compare-bound", "mean-field upper bound vs exact marginals");
    add_common(bound_cmd, true);
    auto* figure_cmd =
        app.add_subcommand("reproduce-figure", "run a built-in golden configuration");
    figure_cmd->add_option("id", figure_id, "figure id (fig2a..fig4b)")->required();
    add_common(figure_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_parse;
    }

    try {
        if (classify_cmd->parsed())
            return run_classify(opts);
        if (nimfa_cmd->parsed())
            return run_simulate_nimfa(opts);
        if (sde_cmd->parsed())
            return run_simulate_sde(opts);
        if (ensemble_cmd->parsed())
            return run_ensemble_cmd(opts);
        if (exact_cmd->parsed())
            return run_exact(opts);
        if (bound_cmd->parsed())
            return run_compare_bound(opts);
        if (figure_cmd->parsed())
            return run_reproduce_figure(opts, figure_id);
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_parse;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const io_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
