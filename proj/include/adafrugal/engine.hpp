#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adafrugal/optim.hpp"
#include "adafrugal/projector.hpp"
#include "adafrugal/schedules.hpp"
#include "adafrugal/task.hpp"

namespace adafrugal {

/// Training-loop variants. The dynamic modes differ only in which controllers
/// are live: static modes freeze rho and/or T at their start values, the two
/// baselines pin rho at 1 (everything state-full) or 0 (no state at all).
enum class EngineMode {
    AdamWFull,     // rho == 1, projector fixed after the initial build
    SignSgdOnly,   // rho == 0, no optimizer state ever
    FrugalStatic,  // constant rho_start, constant interval t_start
    DynRho,        // decaying rho, constant interval
    DynT,          // constant rho_start, loss-aware interval growth
    Combined,      // decaying rho and loss-aware interval growth
};

/// What happens to AdamW moments when the subspace moves: Reset zeroes them
/// (bias correction restarts), Project carries overlapping columns over.
enum class StateStrategy {
    Reset,
    Project,
};

bool mode_uses_rho_schedule(EngineMode mode) noexcept;
bool mode_uses_t_controller(EngineMode mode) noexcept;
bool mode_redefines(EngineMode mode) noexcept;

struct EngineConfig {
    EngineMode mode = EngineMode::Combined;
    StateStrategy strategy = StateStrategy::Reset;
    SelectionRule rule = SelectionRule::GradNormTopK;
    OptimHyper hyper;

    double rho_start = 0.25;
    double rho_end = 0.05;
    double t_start = 100.0;
    double t_max = 800.0;
    double gamma_increase = 1.5;
    double tau_low = 0.008;
    long n_eval = 10000;
    long total_steps = 1000;
    std::uint64_t seed = 0;

    /// Throws ConfigError naming the offending field. Only fields the chosen
    /// mode actually reads are constrained.
    void validate() const;

    /// Mode-resolved rho at step k: the decay schedule for DynRho/Combined,
    /// otherwise the mode's constant.
    double rho_at_step(long k) const;
};

struct MetricsRow {
    long step = 0;
    double train_loss = 0.0;
    std::optional<double> val_loss;  // present only on evaluation steps
    double rho = 0.0;
    double t_current = 0.0;
    bool redefined = false;
    long state_scalars = 0;  // live AdamW scalars (m and v) across all params
};

using MetricsTrace = std::vector<MetricsRow>;

/// Number of rows with the redefined flag set (includes the initial build).
long redefinition_count(const MetricsTrace& trace);

/// Columns selected for one parameter at one redefinition event.
struct ProjectorRecord {
    std::string param;
    std::vector<std::size_t> columns;
};

struct ProjectorEvent {
    long step = 0;
    std::vector<ProjectorRecord> params;
};

struct RunResult {
    MetricsTrace trace;
    std::vector<std::string> param_names;
    std::vector<ParamTensor> params;  // final parameter values
    std::vector<ProjectorEvent> projector_events;
    double final_val_loss = 0.0;
};

/// Runs the full training loop. Deterministic: the same task, config and seed
/// produce a bitwise-identical RunResult. Throws NonFiniteLoss (with step and
/// parameter id) if any loss, gradient or parameter leaves the finite range.
RunResult run_engine(const TrainingTask& task, const EngineConfig& cfg);

}  // namespace adafrugal
