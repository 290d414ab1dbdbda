#include "adafrugal/cli.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"

#include "adafrugal/config.hpp"
#include "adafrugal/errors.hpp"
#include "adafrugal/memory_model.hpp"
#include "adafrugal/report.hpp"
#include "adafrugal/tasks.hpp"

namespace adafrugal {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        throw ConfigError("output_dir", "cannot write '" + path.string() + "'");
    }
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        write_file(out_path, content);
    }
}

struct RunArgs {
    std::string config_path;
    std::string out_dir;
    bool dump_projectors = false;
};

int do_run(const RunArgs& args) {
    ExperimentConfig cfg = load_config_file(args.config_path);
    if (!args.out_dir.empty()) {
        cfg.output_dir = args.out_dir;
    }
    cfg.validate();
    if (cfg.modes.size() != 1) {
        throw ConfigError("modes", "run expects exactly one mode; use compare for sweeps");
    }
    const EngineMode mode = cfg.modes.front();
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    std::vector<RunSummary> cells;
    for (std::uint64_t seed : cfg.seeds) {
        const std::unique_ptr<TrainingTask> task = generate_task(cfg.task, seed);
        const RunResult result = run_engine(*task, cfg.engine_config(mode, seed));
        const std::string suffix =
            cfg.seeds.size() == 1 ? "" : "_seed" + std::to_string(seed);
        write_file(dir / ("metrics" + suffix + ".csv"), metrics_csv(result.trace));
        if (args.dump_projectors) {
            write_file(dir / ("projectors" + suffix + ".json"), projectors_json(result));
        }
        cells.push_back(summarize_run(mode, seed, result));
    }
    write_file(dir / "summary.json", summary_json(cfg.task, summarize(cells)));
    std::cout << "run: " << mode_token(mode) << " on " << cfg.task << ", "
              << cfg.total_steps << " steps x " << cfg.seeds.size() << " seed(s) -> "
              << dir.string() << "\n";
    return 0;
}

struct CompareArgs {
    std::string config_path;
    std::string out_dir;
};

int do_compare(const CompareArgs& args) {
    ExperimentConfig cfg = load_config_file(args.config_path);
    if (!args.out_dir.empty()) {
        cfg.output_dir = args.out_dir;
    }
    cfg.validate();
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    // One task instance per seed, shared read-only by every mode's cell.
    std::vector<std::unique_ptr<TrainingTask>> tasks;
    tasks.reserve(cfg.seeds.size());
    for (std::uint64_t seed : cfg.seeds) {
        tasks.push_back(generate_task(cfg.task, seed));
    }

    // Cells are independent; futures are collected in grid order, so the
    // output is identical to a sequential sweep.
    std::vector<std::future<RunSummary>> futures;
    futures.reserve(cfg.modes.size() * cfg.seeds.size());
    for (EngineMode mode : cfg.modes) {
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
            futures.push_back(std::async(std::launch::async, [&cfg, &tasks, mode, i] {
                const std::uint64_t seed = cfg.seeds[i];
                return summarize_run(mode, seed,
                                     run_engine(*tasks[i], cfg.engine_config(mode, seed)));
            }));
        }
    }
    std::vector<RunSummary> cells;
    cells.reserve(futures.size());
    for (std::future<RunSummary>& f : futures) {
        cells.push_back(f.get());
    }

    write_file(dir / "compare.csv", compare_csv(cells));
    write_file(dir / "summary.json", summary_json(cfg.task, summarize(cells)));
    std::cout << "compare: " << cfg.modes.size() << " mode(s) x " << cfg.seeds.size()
              << " seed(s) on " << cfg.task << " -> " << dir.string() << "\n";
    return 0;
}

struct MemplanArgs {
    std::string shape = "llama130m";
    long layers = 0;
    long hidden = 0;
    long intermediate = 0;
    long vocab = 0;
    double rho = 0.25;
    std::string out_path;

    std::string timeline_path;
    long timeline_steps = 200000;
    long timeline_sample_every = 10000;
    double rho_end = 0.05;

    bool extrapolate = false;
    double base_saving_gb = 0.15;
    long base_layers = 24;
    long base_hidden = 768;
    long target_layers = 32;
    long target_hidden = 4096;
};

int do_memplan(const MemplanArgs& args) {
    ModelShape shape;
    const bool custom =
        args.layers > 0 || args.hidden > 0 || args.intermediate > 0 || args.vocab > 0;
    if (custom) {
        if (args.layers <= 0 || args.hidden <= 0 || args.intermediate <= 0 ||
            args.vocab <= 0) {
            throw ConfigError("shape", "custom shapes need --layers, --hidden, "
                                       "--intermediate and --vocab together");
        }
        shape = ModelShape::transformer(
            "custom", static_cast<std::size_t>(args.layers),
            static_cast<std::size_t>(args.hidden), static_cast<std::size_t>(args.intermediate),
            static_cast<std::size_t>(args.vocab));
    } else if (args.shape == "llama130m") {
        shape = ModelShape::llama130m();
    } else {
        throw ConfigError("shape", "unknown preset '" + args.shape + "'");
    }

    const MemoryReport report = count_states(shape, args.rho);
    json out = {{"shape", shape.name},
                {"param_count", report.param_count},
                {"rho", report.rho},
                {"adamw_state_scalars", report.adamw_state_scalars},
                {"frugal_state_scalars", report.frugal_state_scalars},
                {"adamw_bytes", report.adamw_bytes()},
                {"frugal_bytes", report.frugal_bytes()},
                {"adamw_gib", report.adamw_gib()},
                {"frugal_gib", report.frugal_gib()},
                {"ratio_to_adamw", report.ratio_to_adamw}};

    if (args.extrapolate) {
        const double factor =
            scaling_factor(static_cast<std::size_t>(args.base_layers),
                           static_cast<std::size_t>(args.base_hidden),
                           static_cast<std::size_t>(args.target_layers),
                           static_cast<std::size_t>(args.target_hidden));
        const double projected = scaling_extrapolation(
            args.base_saving_gb, static_cast<std::size_t>(args.base_layers),
            static_cast<std::size_t>(args.base_hidden),
            static_cast<std::size_t>(args.target_layers),
            static_cast<std::size_t>(args.target_hidden));
        out["extrapolation"] = {{"base_saving_gb", args.base_saving_gb},
                                {"base_layers", args.base_layers},
                                {"base_hidden", args.base_hidden},
                                {"target_layers", args.target_layers},
                                {"target_hidden", args.target_hidden},
                                {"factor", factor},
                                {"projected_saving_gb", projected}};
    }
    emit(args.out_path, out.dump(2) + "\n");

    if (!args.timeline_path.empty()) {
        const RhoSchedule schedule(args.rho, args.rho_end, args.timeline_steps);
        const std::vector<TimelinePoint> series = dynamic_memory_timeline(
            shape, schedule, args.timeline_steps, args.timeline_sample_every);
        std::string csv = "step,bytes\n";
        for (const TimelinePoint& point : series) {
            csv += std::to_string(point.step);
            csv += ',';
            csv += std::to_string(point.bytes);
            csv += '\n';
        }
        write_file(args.timeline_path, csv);
    }
    return 0;
}

struct ScheduleDumpArgs {
    double rho_start = 0.25;
    double rho_end = 0.05;
    long total_steps = 200000;
    double t_start = 100.0;
    double t_max = 800.0;
    double gamma_increase = 1.5;
    double tau_low = 0.008;
    long n_eval = 10000;
    long sample_every = 10000;
    std::string out_path;
};

// The t column is the interval controller fed a constant validation loss, so
// every comparable evaluation reads as a plateau: the fastest-growth envelope.
int do_schedule_dump(const ScheduleDumpArgs& args) {
    if (args.sample_every <= 0) {
        throw ConfigError("sample_every", "must be > 0");
    }
    const RhoSchedule schedule(args.rho_start, args.rho_end, args.total_steps);
    TController controller(TController::Params{args.t_start, args.t_max, args.gamma_increase,
                                               args.tau_low, args.n_eval});
    std::string csv = "k,rho,t\n";
    for (long k = 0; k <= args.total_steps; ++k) {
        if (k > 0 && k % args.n_eval == 0) {
            controller.observe_val_loss(k, 1.0);
        }
        if (k % args.sample_every == 0 ||
            (k == args.total_steps && args.total_steps % args.sample_every != 0)) {
            csv += std::to_string(k);
            csv += ',';
            csv += format_double(schedule.rho_at(k));
            csv += ',';
            csv += format_double(controller.t_current());
            csv += '\n';
        }
    }
    emit(args.out_path, csv);
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"AdaFRUGAL workbench: subspace training runs, mode comparisons, "
                 "optimizer-state accounting and schedule inspection"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run_cmd =
        app.add_subcommand("run", "Train one mode from a config file; writes metrics.csv "
                                  "and summary.json");
    run_cmd->add_option("--config", run_args.config_path, "experiment config file")
        ->required();
    run_cmd->add_option("--out-dir", run_args.out_dir, "override the config's output_dir");
    run_cmd->add_flag("--dump-projectors", run_args.dump_projectors,
                      "also write every redefinition's selected columns");

    CompareArgs compare_args;
    CLI::App* compare_cmd = app.add_subcommand(
        "compare", "Run a mode list over shared seeds; writes compare.csv and summary.json");
    compare_cmd->add_option("--config", compare_args.config_path, "experiment config file")
        ->required();
    compare_cmd->add_option("--out-dir", compare_args.out_dir,
                            "override the config's output_dir");

    MemplanArgs mem_args;
    CLI::App* mem_cmd = app.add_subcommand(
        "memplan", "Optimizer-state accounting for a transformer shape (JSON report)");
    mem_cmd->add_option("--shape", mem_args.shape, "shape preset (llama130m)");
    mem_cmd->add_option("--layers", mem_args.layers, "custom shape: transformer layers");
    mem_cmd->add_option("--hidden", mem_args.hidden, "custom shape: hidden size");
    mem_cmd->add_option("--intermediate", mem_args.intermediate,
                        "custom shape: MLP intermediate size");
    mem_cmd->add_option("--vocab", mem_args.vocab, "custom shape: vocabulary size");
    mem_cmd->add_option("--rho", mem_args.rho, "state-full column ratio");
    mem_cmd->add_option("--out", mem_args.out_path, "write JSON here instead of stdout");
    mem_cmd->add_option("--timeline", mem_args.timeline_path,
                        "also write a (step,bytes) CSV under a decaying rho schedule");
    mem_cmd->add_option("--timeline-steps", mem_args.timeline_steps,
                        "timeline decay horizon");
    mem_cmd->add_option("--timeline-sample-every", mem_args.timeline_sample_every,
                        "timeline sampling stride");
    mem_cmd->add_option("--rho-end", mem_args.rho_end, "timeline final ratio");
    mem_cmd->add_flag("--extrapolate", mem_args.extrapolate,
                      "project a measured saving onto a larger model");
    mem_cmd->add_option("--base-saving-gb", mem_args.base_saving_gb,
                        "measured saving at the base scale, GB");
    mem_cmd->add_option("--base-layers", mem_args.base_layers, "base scale layers");
    mem_cmd->add_option("--base-hidden", mem_args.base_hidden, "base scale hidden size");
    mem_cmd->add_option("--target-layers", mem_args.target_layers, "target scale layers");
    mem_cmd->add_option("--target-hidden", mem_args.target_hidden, "target scale hidden size");

    ScheduleDumpArgs sched_args;
    CLI::App* sched_cmd = app.add_subcommand(
        "schedule-dump", "Serialize (k, rho, t) as CSV; t assumes a constant validation "
                         "loss (all-plateau growth envelope)");
    sched_cmd->add_option("--rho-start", sched_args.rho_start, "initial state-full ratio");
    sched_cmd->add_option("--rho-end", sched_args.rho_end, "final state-full ratio");
    sched_cmd->add_option("--total-steps", sched_args.total_steps, "decay horizon");
    sched_cmd->add_option("--t-start", sched_args.t_start, "initial redefinition interval");
    sched_cmd->add_option("--t-max", sched_args.t_max, "interval cap");
    sched_cmd->add_option("--gamma", sched_args.gamma_increase, "interval growth factor");
    sched_cmd->add_option("--tau", sched_args.tau_low, "plateau threshold");
    sched_cmd->add_option("--n-eval", sched_args.n_eval, "evaluation cadence");
    sched_cmd->add_option("--sample-every", sched_args.sample_every, "output stride");
    sched_cmd->add_option("--out", sched_args.out_path, "write CSV here instead of stdout");

    try {
        std::vector<const char*> argv;
        argv.reserve(args.size() + 1);
        argv.push_back("adafrugal");
        for (const std::string& a : args) {
            argv.push_back(a.c_str());
        }
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed()) {
            return do_run(run_args);
        }
        if (compare_cmd->parsed()) {
            return do_compare(compare_args);
        }
        if (mem_cmd->parsed()) {
            return do_memplan(mem_args);
        }
        return do_schedule_dump(sched_args);
    } catch (const NonFiniteLoss& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace adafrugal
