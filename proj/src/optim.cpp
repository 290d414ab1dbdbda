#include "adafrugal/optim.hpp"

#include <cmath>

namespace adafrugal {

void OptimHyper::validate() const {
    if (!(lr_full > 0.0)) {
        throw std::invalid_argument("OptimHyper: lr_full must be positive");
    }
    if (!(lr_free > 0.0)) {
        throw std::invalid_argument("OptimHyper: lr_free must be positive");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0)) {
        throw std::invalid_argument("OptimHyper: beta1 must be in [0,1)");
    }
    if (!(beta2 >= 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("OptimHyper: beta2 must be in [0,1)");
    }
    if (!(eps > 0.0)) {
        throw std::invalid_argument("OptimHyper: eps must be positive");
    }
    if (!(weight_decay >= 0.0)) {
        throw std::invalid_argument("OptimHyper: weight_decay must be non-negative");
    }
}

AdamSubState AdamSubState::zeros(std::size_t rows, std::size_t width) {
    return AdamSubState{ParamTensor(rows, width), ParamTensor(rows, width), 0};
}

ParamTensor adamw_step(AdamSubState& state, const ParamTensor& g_sub, const OptimHyper& h) {
    if (!state.m.same_shape(g_sub) || !state.v.same_shape(g_sub)) {
        throw ShapeMismatch("adamw_step: gradient shape does not match moment shape");
    }
    check_finite(g_sub, "adamw_step gradient");

    state.t += 1;
    const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.t));

    ParamTensor update(g_sub.rows(), g_sub.cols());
    auto m = state.m.data();
    auto v = state.v.data();
    auto g = g_sub.data();
    auto u = update.data();
    for (std::size_t i = 0; i < g.size(); ++i) {
        m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
        v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        u[i] = -h.lr_full * m_hat / (std::sqrt(v_hat) + h.eps);
    }
    return update;
}

ParamTensor signsgd_step(const ParamTensor& g_free, double lr_free) {
    check_finite(g_free, "signsgd_step gradient");
    ParamTensor update(g_free.rows(), g_free.cols());
    auto g = g_free.data();
    auto u = update.data();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] > 0.0) {
            u[i] = -lr_free;
        } else if (g[i] < 0.0) {
            u[i] = lr_free;
        } else {
            u[i] = 0.0;
        }
    }
    return update;
}

ParamTensor sgd_step(const ParamTensor& g, double lr) {
    check_finite(g, "sgd_step gradient");
    ParamTensor update(g.rows(), g.cols());
    auto src = g.data();
    auto u = update.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        u[i] = -lr * src[i];
    }
    return update;
}

}  // namespace adafrugal
