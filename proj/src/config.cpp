#include "adafrugal/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "adafrugal/errors.hpp"

namespace adafrugal {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view value, const std::string& key) {
    std::vector<std::string_view> items;
    while (true) {
        const auto comma = value.find(',');
        const std::string_view item = trim(value.substr(0, comma));
        if (item.empty()) {
            throw ConfigError(key, "empty list item");
        }
        items.push_back(item);
        if (comma == std::string_view::npos) {
            break;
        }
        value.remove_prefix(comma + 1);
    }
    return items;
}

double parse_double(std::string_view value, const std::string& key) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError(key, "expected a number, got '" + std::string(value) + "'");
    }
    return out;
}

long parse_long(std::string_view value, const std::string& key) {
    long out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError(key, "expected an integer, got '" + std::string(value) + "'");
    }
    return out;
}

std::uint64_t parse_seed(std::string_view value, const std::string& key) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError(key, "expected a non-negative integer, got '" + std::string(value) +
                                   "'");
    }
    return out;
}

void check(bool ok, const char* field, const std::string& message) {
    if (!ok) {
        throw ConfigError(field, message);
    }
}

}  // namespace

const char* mode_token(EngineMode mode) noexcept {
    switch (mode) {
    case EngineMode::AdamWFull:
        return "adamw_full";
    case EngineMode::SignSgdOnly:
        return "signsgd_only";
    case EngineMode::FrugalStatic:
        return "frugal_static";
    case EngineMode::DynRho:
        return "adafrugal_dyn_rho";
    case EngineMode::DynT:
        return "adafrugal_dyn_t";
    case EngineMode::Combined:
        return "adafrugal_combined";
    }
    return "?";
}

const char* strategy_token(StateStrategy strategy) noexcept {
    return strategy == StateStrategy::Reset ? "reset" : "project";
}

const char* rule_token(SelectionRule rule) noexcept {
    return rule == SelectionRule::GradNormTopK ? "grad_norm_topk" : "random";
}

EngineMode mode_from_token(std::string_view token) {
    for (EngineMode mode : {EngineMode::AdamWFull, EngineMode::SignSgdOnly,
                            EngineMode::FrugalStatic, EngineMode::DynRho, EngineMode::DynT,
                            EngineMode::Combined}) {
        if (token == mode_token(mode)) {
            return mode;
        }
    }
    throw ConfigError("mode", "unknown mode '" + std::string(token) + "'");
}

StateStrategy strategy_from_token(std::string_view token) {
    if (token == "reset") {
        return StateStrategy::Reset;
    }
    if (token == "project") {
        return StateStrategy::Project;
    }
    throw ConfigError("strategy", "expected 'reset' or 'project', got '" + std::string(token) +
                                      "'");
}

SelectionRule rule_from_token(std::string_view token) {
    if (token == "grad_norm_topk") {
        return SelectionRule::GradNormTopK;
    }
    if (token == "random") {
        return SelectionRule::Random;
    }
    throw ConfigError("selection", "expected 'grad_norm_topk' or 'random', got '" +
                                       std::string(token) + "'");
}

void ExperimentConfig::validate() const {
    check(task == "quadratic_bowl" || task == "logistic_synth" || task == "mlp_regression",
          "task", "unknown task '" + task + "'");
    check(!modes.empty(), "modes", "at least one mode required");
    check(std::isfinite(hyper.lr_full) && hyper.lr_full > 0.0, "lr_full", "must be > 0");
    check(std::isfinite(hyper.lr_free) && hyper.lr_free > 0.0, "lr_free", "must be > 0");
    check(hyper.beta1 >= 0.0 && hyper.beta1 < 1.0, "beta1", "must be in [0, 1)");
    check(hyper.beta2 >= 0.0 && hyper.beta2 < 1.0, "beta2", "must be in [0, 1)");
    check(std::isfinite(hyper.eps) && hyper.eps > 0.0, "eps", "must be > 0");
    check(std::isfinite(hyper.weight_decay) && hyper.weight_decay >= 0.0, "weight_decay",
          "must be >= 0");
    check(std::isfinite(rho_start) && rho_start > 0.0 && rho_start <= 1.0, "rho_start",
          "must be in (0, 1]");
    check(std::isfinite(rho_end) && rho_end > 0.0 && rho_end <= rho_start, "rho_end",
          "must be in (0, rho_start]");
    check(std::isfinite(t_start) && t_start >= 1.0, "t_start", "must be >= 1");
    check(std::isfinite(t_max) && t_max >= t_start, "t_max", "must be >= t_start");
    check(std::isfinite(gamma_increase) && gamma_increase > 1.0, "gamma_increase",
          "must be > 1");
    check(std::isfinite(tau_low) && tau_low > 0.0, "tau_low", "must be > 0");
    check(n_eval >= 1, "n_eval", "must be >= 1");
    check(total_steps >= 0, "total_steps", "must be >= 0");
    check(!seeds.empty(), "seeds", "at least one seed required");
    std::set<std::uint64_t> unique_seeds(seeds.begin(), seeds.end());
    check(unique_seeds.size() == seeds.size(), "seeds", "seeds must be unique");
    check(!output_dir.empty(), "output_dir", "must not be empty");
}

EngineConfig ExperimentConfig::engine_config(EngineMode mode, std::uint64_t seed) const {
    EngineConfig cfg;
    cfg.mode = mode;
    cfg.strategy = strategy;
    cfg.rule = rule;
    cfg.hyper = hyper;
    cfg.rho_start = rho_start;
    cfg.rho_end = rho_end;
    cfg.t_start = t_start;
    cfg.t_max = t_max;
    cfg.gamma_increase = gamma_increase;
    cfg.tau_low = tau_low;
    cfg.n_eval = n_eval;
    cfg.total_steps = total_steps;
    cfg.seed = seed;
    return cfg;
}

ExperimentConfig parse_config_text(std::string_view text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    bool saw_mode = false;
    bool saw_modes = false;

    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto newline = text.find('\n');
        std::string_view line = text.substr(0, newline);
        text.remove_prefix(newline == std::string_view::npos ? text.size() : newline + 1);

        const auto hash = line.find('#');
        if (hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config",
                              "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config", "line " + std::to_string(line_no) + ": empty key");
        }
        if (!seen.insert(key).second) {
            throw ConfigError(key, "duplicate key");
        }

        if (key == "task") {
            cfg.task = std::string(value);
        } else if (key == "mode") {
            cfg.modes = {mode_from_token(value)};
            saw_mode = true;
        } else if (key == "modes") {
            cfg.modes.clear();
            for (std::string_view item : split_list(value, key)) {
                cfg.modes.push_back(mode_from_token(item));
            }
            saw_modes = true;
        } else if (key == "strategy") {
            cfg.strategy = strategy_from_token(value);
        } else if (key == "selection") {
            cfg.rule = rule_from_token(value);
        } else if (key == "lr_full") {
            cfg.hyper.lr_full = parse_double(value, key);
        } else if (key == "lr_free") {
            cfg.hyper.lr_free = parse_double(value, key);
        } else if (key == "beta1") {
            cfg.hyper.beta1 = parse_double(value, key);
        } else if (key == "beta2") {
            cfg.hyper.beta2 = parse_double(value, key);
        } else if (key == "eps") {
            cfg.hyper.eps = parse_double(value, key);
        } else if (key == "weight_decay") {
            cfg.hyper.weight_decay = parse_double(value, key);
        } else if (key == "rho_start") {
            cfg.rho_start = parse_double(value, key);
        } else if (key == "rho_end") {
            cfg.rho_end = parse_double(value, key);
        } else if (key == "t_start") {
            cfg.t_start = parse_double(value, key);
        } else if (key == "t_max") {
            cfg.t_max = parse_double(value, key);
        } else if (key == "gamma_increase") {
            cfg.gamma_increase = parse_double(value, key);
        } else if (key == "tau_low") {
            cfg.tau_low = parse_double(value, key);
        } else if (key == "n_eval") {
            cfg.n_eval = parse_long(value, key);
        } else if (key == "total_steps") {
            cfg.total_steps = parse_long(value, key);
        } else if (key == "seeds") {
            cfg.seeds.clear();
            for (std::string_view item : split_list(value, key)) {
                cfg.seeds.push_back(parse_seed(item, key));
            }
        } else if (key == "output_dir") {
            cfg.output_dir = std::string(value);
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    if (saw_mode && saw_modes) {
        throw ConfigError("modes", "give either 'mode' or 'modes', not both");
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot read '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string example_config(EngineMode mode) {
    const char* headline = "";
    switch (mode) {
    case EngineMode::AdamWFull:
        headline = "Full AdamW baseline: every column state-full, projector fixed after the "
                   "initial build.";
        break;
    case EngineMode::SignSgdOnly:
        headline = "Pure sign-update baseline: no optimizer state at all.";
        break;
    case EngineMode::FrugalStatic:
        headline = "Static subspace training: constant ratio and constant redefinition "
                   "interval.";
        break;
    case EngineMode::DynRho:
        headline = "Decaying state-full ratio, fixed redefinition interval.";
        break;
    case EngineMode::DynT:
        headline = "Constant ratio, loss-aware redefinition interval growth.";
        break;
    case EngineMode::Combined:
        headline = "Decaying ratio plus loss-aware interval growth.";
        break;
    }
    std::ostringstream out;
    out << "# " << headline << "\n"
        << "# Flat key = value pairs; '#' starts a comment; unknown keys are rejected.\n"
        << "# Desk-scale horizon: 2000 steps, evaluation every 100 steps.\n"
        << "\n"
        << "# Task: quadratic_bowl | logistic_synth | mlp_regression.\n"
        << "task = mlp_regression\n"
        << "\n"
        << "# Engine mode for `run`; `compare` configs use `modes = a,b,c` instead.\n"
        << "mode = " << mode_token(mode) << "\n"
        << "\n"
        << "# What happens to AdamW moments when the subspace moves: reset | project.\n"
        << "strategy = reset\n"
        << "# Column choice at redefinition: grad_norm_topk | random.\n"
        << "selection = grad_norm_topk\n"
        << "\n"
        << "# lr_full drives the state-full AdamW update, lr_free the sign update on\n"
        << "# the complement.\n"
        << "lr_full = 0.005\n"
        << "lr_free = 0.0005\n"
        << "beta1 = 0.9\n"
        << "beta2 = 0.999\n"
        << "eps = 1e-8\n"
        << "weight_decay = 0\n"
        << "\n"
        << "# State-full column ratio. Static-rho modes read rho_start only.\n"
        << "rho_start = 0.25\n"
        << "rho_end = 0.05\n"
        << "\n"
        << "# Redefinition interval. Static-T modes read t_start only; the dynamic\n"
        << "# controller grows T by gamma_increase (up to t_max) whenever the relative\n"
        << "# validation-loss change drops below tau_low.\n"
        << "t_start = 20\n"
        << "t_max = 160\n"
        << "gamma_increase = 1.5\n"
        << "tau_low = 0.008\n"
        << "\n"
        << "# Validation cadence and horizon.\n"
        << "n_eval = 100\n"
        << "total_steps = 2000\n"
        << "\n"
        << "seeds = 0\n"
        << "output_dir = out/" << mode_token(mode) << "\n";
    return out.str();
}

}  // namespace adafrugal
