#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "adafrugal/schedules.hpp"

namespace adafrugal {

/// Optimizer state is accounted at 4 bytes per scalar (single-precision
/// moment tensors, the convention behind the reported GB figures) even
/// though compute runs in double.
inline constexpr std::size_t kBytesPerStateScalar = 4;

enum class GroupPolicy {
    AlwaysStateFull,  // embeddings, output projections, 1-D gains
    Blockable,        // attention/MLP matrices eligible for column blocking
};

struct ParamGroup {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t count = 1;  // identical matrices of this shape
    GroupPolicy policy = GroupPolicy::Blockable;
};

/// Named parameter groups of a model, enough to count optimizer state
/// without instantiating anything.
struct ModelShape {
    std::string name;
    std::vector<ParamGroup> groups;

    std::size_t param_count() const;

    /// Decoder-transformer shape: untied embedding + output head and 1-D
    /// gains always state-full, attention/MLP matrices blockable.
    static ModelShape transformer(std::string name, std::size_t layers, std::size_t hidden,
                                  std::size_t intermediate, std::size_t vocab);

    /// The LLaMA-130M-shaped reference config (L=12, h=768, f=2048, V=32000).
    static ModelShape llama130m();
};

struct MemoryReport {
    std::size_t param_count = 0;
    double rho = 1.0;
    std::size_t adamw_state_scalars = 0;   // 2 per parameter entry
    std::size_t frugal_state_scalars = 0;  // 2 per state-full entry only
    double ratio_to_adamw = 1.0;

    std::size_t adamw_bytes() const { return adamw_state_scalars * kBytesPerStateScalar; }
    std::size_t frugal_bytes() const { return frugal_state_scalars * kBytesPerStateScalar; }
    double adamw_gib() const;
    double frugal_gib() const;
};

/// Analytic state accounting: per group, 2 * rows * subspace_width(rho_g, cols)
/// * count scalars, with rho_g = 1 for AlwaysStateFull groups. Agrees with the
/// engine's live state_scalars metric by construction (same width helper).
MemoryReport count_states(const ModelShape& shape, double rho);

/// Overhead multiplier between two transformer scales: (L/L0) * (h/h0)^2.
double scaling_factor(std::size_t base_layers, std::size_t base_hidden,
                      std::size_t target_layers, std::size_t target_hidden);

/// Projects an absolute saving measured at (base_layers, base_hidden) onto a
/// larger model: saving * scaling_factor. Units follow base_saving.
double scaling_extrapolation(double base_saving, std::size_t base_layers,
                             std::size_t base_hidden, std::size_t target_layers,
                             std::size_t target_hidden);

struct TimelinePoint {
    long step = 0;
    std::size_t bytes = 0;
};

/// Optimizer-state bytes over a run under a decaying rho schedule, sampled
/// every `sample_every` steps (step 0 and the final step included when they
/// land on the grid). Non-increasing whenever the schedule is.
std::vector<TimelinePoint> dynamic_memory_timeline(const ModelShape& shape,
                                                   const RhoSchedule& schedule, long steps,
                                                   long sample_every);

}  // namespace adafrugal
