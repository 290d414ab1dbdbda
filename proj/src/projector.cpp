#include "adafrugal/projector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace adafrugal {

std::size_t subspace_width(double rho, std::size_t cols) {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw std::invalid_argument("subspace_width: rho must be in [0,1], got " +
                                    std::to_string(rho));
    }
    const double raw = std::ceil(rho * static_cast<double>(cols));
    const auto width = static_cast<std::size_t>(raw);
    return std::min(width, cols);
}

BlockProjector::BlockProjector(std::size_t param_cols, std::vector<std::size_t> selected,
                               double rho_used, SelectionRule rule)
    : param_cols_(param_cols), selected_(std::move(selected)), rho_used_(rho_used), rule_(rule) {
    for (std::size_t i = 0; i < selected_.size(); ++i) {
        if (selected_[i] >= param_cols_) {
            throw IndexOutOfRange("BlockProjector: selected index out of range");
        }
        if (i > 0 && selected_[i] <= selected_[i - 1]) {
            throw NotSorted("BlockProjector: selected indices not strictly increasing");
        }
    }
}

BlockProjector BlockProjector::redefine(const ParamTensor& g, double rho, SelectionRule rule,
                                        Rng& rng) {
    const std::size_t cols = g.cols();
    const std::size_t k_sel = subspace_width(rho, cols);

    std::vector<std::size_t> selected;
    if (rule == SelectionRule::GradNormTopK) {
        const std::vector<double> norms = col_l2_norms(g);
        std::vector<std::size_t> order(cols);
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Largest norm first; equal norms keep the smaller index.
        std::ranges::stable_sort(order, [&norms](std::size_t a, std::size_t b) {
            return norms[a] > norms[b];
        });
        selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_sel));
        std::ranges::sort(selected);
    } else {
        selected = sample_without_replacement(rng, cols, k_sel);
    }
    return BlockProjector(cols, std::move(selected), rho, rule);
}

SplitGradient split(const BlockProjector& p, const ParamTensor& g) {
    if (g.cols() != p.param_cols()) {
        throw ShapeMismatch("split: gradient has " + std::to_string(g.cols()) +
                            " cols, projector expects " + std::to_string(p.param_cols()));
    }
    ParamTensor g_full_sub = select_cols(g, p.selected());
    // The complement is the gradient with selected columns zeroed, which makes
    // lift(g_full_sub) + g_free reconstruct g bit-exactly.
    ParamTensor g_free = g;
    for (std::size_t r = 0; r < g_free.rows(); ++r) {
        for (std::size_t c : p.selected()) {
            g_free(r, c) = 0.0;
        }
    }
    return SplitGradient{std::move(g_full_sub), std::move(g_free)};
}

ParamTensor lift(const BlockProjector& p, const ParamTensor& u_sub) {
    if (u_sub.cols() != p.width()) {
        throw ShapeMismatch("lift: tensor has " + std::to_string(u_sub.cols()) +
                            " cols, projector subspace width is " + std::to_string(p.width()));
    }
    return scatter_cols(u_sub, p.selected(), p.param_cols());
}

AdamSubState transport_state(const BlockProjector& p_old, const BlockProjector& p_new,
                             const AdamSubState& s) {
    if (p_old.param_cols() != p_new.param_cols()) {
        throw ShapeMismatch("transport_state: projectors cover different parameter widths");
    }
    if (s.m.cols() != p_old.width() || s.v.cols() != p_old.width()) {
        throw ShapeMismatch("transport_state: state shaped for a different projector");
    }
    const auto carry = [&](const ParamTensor& moment) {
        return select_cols(scatter_cols(moment, p_old.selected(), p_old.param_cols()),
                           p_new.selected());
    };
    return AdamSubState{carry(s.m), carry(s.v), s.t};
}

AdamSubState reset_state(const BlockProjector& p_new, std::size_t template_rows) {
    return AdamSubState::zeros(template_rows, p_new.width());
}

}  // namespace adafrugal
