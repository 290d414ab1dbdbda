#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "adafrugal/engine.hpp"

namespace adafrugal {

// Token spellings shared by config files, CLI output and reports.
const char* mode_token(EngineMode mode) noexcept;
const char* strategy_token(StateStrategy strategy) noexcept;
const char* rule_token(SelectionRule rule) noexcept;
EngineMode mode_from_token(std::string_view token);          // ConfigError("mode", ...)
StateStrategy strategy_from_token(std::string_view token);   // ConfigError("strategy", ...)
SelectionRule rule_from_token(std::string_view token);       // ConfigError("selection", ...)

/// One experiment as described by a config file: a task, one or more engine
/// modes, shared hyperparameters and a seed list. `run` expects exactly one
/// mode; `compare` sweeps the full mode x seed grid.
///
/// Defaults are the desk-scale shape of the reference hyperparameters: the
/// horizon and evaluation cadence are scaled down 100x together, preserving
/// the t_start/n_eval ratio and the (gamma, tau) pair.
struct ExperimentConfig {
    std::string task = "mlp_regression";
    std::vector<EngineMode> modes = {EngineMode::Combined};
    StateStrategy strategy = StateStrategy::Reset;
    SelectionRule rule = SelectionRule::GradNormTopK;
    OptimHyper hyper = {.lr_full = 0.005, .lr_free = 0.0005};

    double rho_start = 0.25;
    double rho_end = 0.05;
    double t_start = 20.0;
    double t_max = 160.0;
    double gamma_increase = 1.5;
    double tau_low = 0.008;
    long n_eval = 100;
    long total_steps = 2000;
    std::vector<std::uint64_t> seeds = {0};
    std::string output_dir = "out";

    /// Range checks independent of mode; throws ConfigError naming the field.
    void validate() const;

    /// Engine view of this config for one (mode, seed) cell.
    EngineConfig engine_config(EngineMode mode, std::uint64_t seed) const;
};

/// Parses the flat key = value format (one pair per line, '#' comments).
/// Unknown or duplicate keys and malformed values throw ConfigError naming
/// the key. Keys not present keep their defaults.
ExperimentConfig parse_config_text(std::string_view text);

/// Reads and parses a config file; throws ConfigError("config", ...) when
/// the file cannot be read.
ExperimentConfig load_config_file(const std::string& path);

/// A ready-to-run example config for the given mode, commented line by line.
/// The shipped files under configs/ are generated from this.
std::string example_config(EngineMode mode);

}  // namespace adafrugal
