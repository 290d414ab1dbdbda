#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adafrugal/engine.hpp"

namespace adafrugal {

/// Shortest decimal that round-trips the exact double. All numeric output
/// goes through this so emitted files are bitwise reproducible.
std::string format_double(double v);

inline constexpr std::string_view kMetricsCsvHeader =
    "step,train_loss,val_loss,rho,t_current,redefined,state_scalars";

/// Serializes a trace under kMetricsCsvHeader. val_loss is empty on
/// non-evaluation steps; redefined is 0/1.
std::string metrics_csv(const MetricsTrace& trace);

/// Inverse of metrics_csv. Throws EmptyInput on empty text, ShapeMismatch on
/// a bad header or malformed row, NotSorted if steps fail to increase.
MetricsTrace parse_metrics_csv(std::string_view text);

/// One engine run reduced to the numbers the comparison table reports.
struct RunSummary {
    EngineMode mode = EngineMode::Combined;
    std::uint64_t seed = 0;
    double final_train_loss = 0.0;
    double final_val_loss = 0.0;
    long redefinitions = 0;
    long final_state_scalars = 0;
    long final_state_bytes = 0;
};

RunSummary summarize_run(EngineMode mode, std::uint64_t seed, const RunResult& result);

/// Per-mode medians over seeds. redefinitions_vs_static is the redefinition
/// count normalized to the static-interval baseline's median (1.0 for the
/// baseline itself, absent when no static baseline is in the batch).
struct ModeSummary {
    EngineMode mode = EngineMode::Combined;
    double median_final_train_loss = 0.0;
    double median_final_val_loss = 0.0;
    double median_redefinitions = 0.0;
    std::optional<double> redefinitions_vs_static;
    double median_final_state_bytes = 0.0;
    std::vector<RunSummary> runs;
};

/// Groups cells by mode, preserving first-appearance mode order.
/// Throws EmptyInput when there are no cells.
std::vector<ModeSummary> summarize(const std::vector<RunSummary>& cells);

/// Median of values (mean of the middle pair for even sizes).
/// Throws EmptyInput on an empty vector.
double median(std::vector<double> values);

/// Comparison table, one row per (mode, seed) cell in input order.
std::string compare_csv(const std::vector<RunSummary>& cells);

/// Summary record as pretty-printed JSON. Includes pairwise final-val-loss
/// ordering flags whenever both modes of a pair are present; ordering is
/// reported, never enforced.
std::string summary_json(const std::string& task, const std::vector<ModeSummary>& modes);

/// Redefinition history: every projector event with its selected columns.
std::string projectors_json(const RunResult& result);

}  // namespace adafrugal
