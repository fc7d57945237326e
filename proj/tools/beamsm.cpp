// beamsm: Monte-Carlo runner for the set-membership reduced-rank beamformer
// and its baselines.
//
//   beamsm run --config exp.json [--runs K] [--seed S] [--out DIR]
//   beamsm validate --config exp.json
//   beamsm sweep --config exp.json --param bound.alpha --values 10,26,40 [--out DIR]
//   beamsm plot --trace DIR/sinr_trace.csv [--out DIR]
//
// Exit codes: 0 ok, 2 configuration/usage error, 3 too many aborted runs,
// 1 anything else (I/O).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beamsm/beamsm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRunFailures = 3;

struct RunOptions {
    std::string config;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> threads;
    bool full = false;
    bool quiet = false;
};

void apply_overrides(nlohmann::json& j, const RunOptions& o) {
    if (o.full) j["runs"] = 1000;
    if (o.runs) j["runs"] = *o.runs;
    if (o.seed) j["base_seed"] = *o.seed;
    if (o.out) j["output"] = *o.out;
    if (o.threads) j["threads"] = *o.threads;
}

void print_summary(const beamsm::ExperimentResult& r, std::ostream& os) {
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %12s %14s %8s\n", "algorithm", "update_rate", "final_sinr_db", "failed");
    os << line;
    for (const auto& a : r.algorithms) {
        std::snprintf(line, sizeof line, "%-24s %12.4f %14.3f %8zu\n", a.config.label.c_str(), a.mean_update_rate,
                      a.final_sinr_db(), a.failures.size());
        os << line;
    }
}

beamsm::ExperimentResult execute(const beamsm::ExperimentConfig& cfg, bool quiet) {
    const auto start = std::chrono::steady_clock::now();
    beamsm::ProgressCallback progress;
    if (!quiet)
        progress = [](std::size_t done, std::size_t total) {
            std::cerr << "\r  runs " << done << "/" << total << std::flush;
            if (done == total) std::cerr << "\n";
        };
    auto result = beamsm::run_experiment(cfg, progress);
    if (!quiet) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cerr << "  finished in " << secs << " s\n";
    }
    for (const auto& a : result.algorithms)
        for (const auto& f : a.failures)
            std::cerr << "warning: " << a.config.label << " run " << f.run << " aborted: " << f.message << "\n";
    return result;
}

int cmd_run(const RunOptions& o) {
    auto j = beamsm::load_json(o.config);
    apply_overrides(j, o);
    const auto cfg = beamsm::parse_config(j);
    const auto result = execute(cfg, o.quiet);
    const auto paths = beamsm::write_csv(result, cfg.output);
    print_summary(result, std::cout);
    std::cout << "wrote " << paths.trace.string() << " and " << paths.summary.string() << "\n";
    return result.failures_over_threshold() ? kExitRunFailures : kExitOk;
}

int cmd_validate(const std::string& path) {
    const auto cfg = beamsm::load_config(path);
    std::cout << "ok: " << cfg.algorithms.size() << " algorithm(s), " << cfg.runs << " run(s), m = "
              << cfg.scenario.num_elements << ", q = " << cfg.scenario.num_users << ", N = "
              << cfg.scenario.num_snapshots << "\n";
    return kExitOk;
}

std::vector<nlohmann::json> parse_values(const std::string& list) {
    std::vector<nlohmann::json> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(nlohmann::json::parse(item));
        } catch (const nlohmann::json::exception&) {
            out.emplace_back(item); // bare word, e.g. fixed
        }
    }
    if (out.empty()) throw beamsm::ConfigError("--values is empty");
    return out;
}

int cmd_sweep(const RunOptions& o, const std::string& param, const std::string& values) {
    auto base = beamsm::load_json(o.config);
    apply_overrides(base, o);
    const std::filesystem::path root = base.value("output", std::string("results"));
    const auto vals = parse_values(values);

    // Validate every point before running any of them.
    std::vector<beamsm::ExperimentConfig> points;
    for (const auto& v : vals) {
        auto j = base;
        beamsm::apply_param(j, param, v);
        const std::string tag = param + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
        j["output"] = (root / tag).string();
        points.push_back(beamsm::parse_config(j));
    }

    std::filesystem::create_directories(root);
    const auto summary_path = root / "sweep_summary.csv";
    std::ofstream summary(summary_path, std::ios::binary | std::ios::trunc);
    if (!summary) throw beamsm::IoError("cannot write '" + summary_path.string() + "'");
    summary << "param,value,algorithm,mean_update_rate,final_sinr_db\n";

    bool over = false;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const std::string value = vals[p].is_string() ? vals[p].get<std::string>() : vals[p].dump();
        if (!o.quiet) std::cerr << param << " = " << value << "\n";
        const auto result = execute(points[p], o.quiet);
        beamsm::write_csv(result, points[p].output);
        for (const auto& a : result.algorithms)
            summary << param << ',' << value << ',' << a.config.label << ',' << beamsm::format_number(a.mean_update_rate)
                    << ',' << beamsm::format_number(a.final_sinr_db()) << '\n';
        if (!o.quiet) print_summary(result, std::cout);
        over = over || result.failures_over_threshold();
    }
    std::cout << "wrote " << summary_path.string() << "\n";
    return over ? kExitRunFailures : kExitOk;
}

// Averages a trace file per algorithm and emits a gnuplot script for it.
int cmd_plot(const std::string& trace, const std::string& out_dir) {
    const auto means = beamsm::mean_traces(beamsm::read_trace_csv(trace));
    const std::filesystem::path dir = out_dir;
    std::filesystem::create_directories(dir);
    const auto dat = dir / "mean_sinr.dat";
    std::ofstream d(dat, std::ios::binary | std::ios::trunc);
    if (!d) throw beamsm::IoError("cannot write '" + dat.string() + "'");
    std::size_t n = 0;
    for (const auto& [_, v] : means) n = std::max(n, v.size());
    d << "# snapshot";
    for (const auto& [name, _] : means) d << ' ' << name;
    d << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        d << (i + 1);
        for (const auto& [_, v] : means) d << ' ' << (i < v.size() ? beamsm::format_number(v[i]) : "nan");
        d << '\n';
    }

    const auto gp = dir / "plot_sinr.gp";
    std::ofstream g(gp, std::ios::binary | std::ios::trunc);
    if (!g) throw beamsm::IoError("cannot write '" + gp.string() + "'");
    g << "set terminal pngcairo size 900,600\n"
      << "set output 'sinr.png'\n"
      << "set xlabel 'snapshots'\nset ylabel 'output SINR (dB)'\nset key bottom right\nset grid\n"
      << "plot ";
    std::size_t col = 2;
    for (const auto& [name, _] : means) {
        if (col > 2) g << ", \\\n     ";
        g << "'mean_sinr.dat' using 1:" << col++ << " with lines title '" << name << "'";
    }
    g << '\n';
    std::cout << "wrote " << dat.string() << " and " << gp.string() << " (run: cd " << dir.string()
              << " && gnuplot plot_sinr.gp)\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Set-membership reduced-rank LCMV beamforming experiments"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "run a Monte-Carlo experiment and write CSV results");
    run->add_option("--config", run_opts.config, "experiment JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--runs", run_opts.runs, "number of Monte-Carlo runs K");
    run->add_option("--seed", run_opts.seed, "base seed (run j uses seed + j)");
    run->add_option("--out", run_opts.out, "output directory");
    run->add_option("--threads", run_opts.threads, "worker threads (0 = all cores)");
    run->add_flag("--full", run_opts.full, "K = 1000 runs");
    run->add_flag("-q,--quiet", run_opts.quiet, "no progress output");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check an experiment config");
    validate->add_option("--config", validate_path, "experiment JSON")->required();

    RunOptions sweep_opts;
    std::string sweep_param, sweep_values;
    auto* sweep = app.add_subcommand("sweep", "repeat an experiment over values of one parameter");
    sweep->add_option("--config", sweep_opts.config, "experiment JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("--param", sweep_param, "dotted parameter, e.g. bound.alpha, rank, scenario.snr_db")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep->add_option("--runs", sweep_opts.runs, "number of Monte-Carlo runs K");
    sweep->add_option("--seed", sweep_opts.seed, "base seed");
    sweep->add_option("--out", sweep_opts.out, "output directory");
    sweep->add_option("--threads", sweep_opts.threads, "worker threads (0 = all cores)");
    sweep->add_flag("-q,--quiet", sweep_opts.quiet, "no progress output");

    std::string trace_path, plot_out = ".";
    auto* plot = app.add_subcommand("plot", "average a trace CSV and emit a gnuplot script");
    plot->add_option("--trace", trace_path, "sinr_trace.csv from a run")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", plot_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_opts);
        if (*validate) return cmd_validate(validate_path);
        if (*sweep) return cmd_sweep(sweep_opts, sweep_param, sweep_values);
        if (*plot) return cmd_plot(trace_path, plot_out);
    } catch (const beamsm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const beamsm::ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
