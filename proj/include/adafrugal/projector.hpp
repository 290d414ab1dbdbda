#pragma once

#include <vector>

#include "adafrugal/optim.hpp"
#include "adafrugal/tensor.hpp"

namespace adafrugal {

enum class SelectionRule {
    GradNormTopK,  // columns with the largest L2 gradient norm
    Random,        // uniform subset from the engine rng
};

/// Number of state-full columns for ratio rho: ceil(rho * cols), clamped to
/// [0, cols]. Shared by projectors and the memory accounting so the two can
/// never disagree.
std::size_t subspace_width(double rho, std::size_t cols);

/// Block-wise state-full subspace for one parameter: a sorted set of column
/// indices. Immutable after construction; redefinition produces a new value,
/// so per-parameter projectors can be handled in parallel.
class BlockProjector {
public:
    BlockProjector(std::size_t param_cols, std::vector<std::size_t> selected, double rho_used,
                   SelectionRule rule);

    /// Builds a projector from the current gradient. GradNormTopK keeps the
    /// ceil(rho*cols) columns with the largest L2 norm, ties broken by the
    /// smaller index; Random draws a uniform subset.
    static BlockProjector redefine(const ParamTensor& g, double rho, SelectionRule rule,
                                   Rng& rng);

    std::size_t param_cols() const noexcept { return param_cols_; }
    std::size_t width() const noexcept { return selected_.size(); }
    std::span<const std::size_t> selected() const noexcept { return selected_; }
    double rho_used() const noexcept { return rho_used_; }
    SelectionRule rule() const noexcept { return rule_; }
    bool is_full() const noexcept { return selected_.size() == param_cols_; }
    bool is_empty() const noexcept { return selected_.empty(); }

private:
    std::size_t param_cols_;
    std::vector<std::size_t> selected_;
    double rho_used_;
    SelectionRule rule_;
};

/// Gradient split into the projected state-full part and its complement.
/// Invariant: g_free is exactly zero on every selected column, and
/// lift(g_full_sub) + g_free reconstructs the original gradient bit-exactly.
struct SplitGradient {
    ParamTensor g_full_sub;  // rows x |selected|
    ParamTensor g_free;      // rows x param_cols, zero on selected columns
};

SplitGradient split(const BlockProjector& p, const ParamTensor& g);

/// Lifts a subspace tensor back to full parameter width (zeros elsewhere).
ParamTensor lift(const BlockProjector& p, const ParamTensor& u_sub);

/// Project-strategy state carry-over: each moment tensor is lifted to full
/// width under p_old and re-selected under p_new. Columns in old∩new keep
/// their values, new-only columns start at zero. The step counter is
/// preserved — transported moments are treated as continuous.
AdamSubState transport_state(const BlockProjector& p_old, const BlockProjector& p_new,
                             const AdamSubState& s);

/// Reset-strategy state: zero moments shaped rows x |selected| and a zero
/// step counter, so bias correction restarts with the fresh moments.
AdamSubState reset_state(const BlockProjector& p_new, std::size_t template_rows);

}  // namespace adafrugal
