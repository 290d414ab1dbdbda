#pragma once

#include "adafrugal/tensor.hpp"

namespace adafrugal {

/// Shared hyperparameters for the hybrid update. lr_free is independent of
/// lr_full so static-parity experiments stay honest; weight decay is applied
/// by the engine (decoupled, once per step on the full parameter), never
/// inside adamw_step.
struct OptimHyper {
    double lr_full = 1e-3;
    double lr_free = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;

    void validate() const;
};

/// AdamW moment tensors shaped like the projected subspace, plus the
/// bias-correction step counter.
struct AdamSubState {
    ParamTensor m;
    ParamTensor v;
    long t = 0;

    static AdamSubState zeros(std::size_t rows, std::size_t width);
};

/// One AdamW step on the state-full subspace. Advances `state` in place and
/// returns the additive update:
///
///   t' = t+1
///   m' = b1*m + (1-b1)*g          mhat = m' / (1 - b1^t')
///   v' = b2*v + (1-b2)*g^2        vhat = v' / (1 - b2^t')
///   u  = -lr_full * mhat / (sqrt(vhat) + eps)
///
/// Weight decay is NOT applied here (see OptimHyper).
ParamTensor adamw_step(AdamSubState& state, const ParamTensor& g_sub, const OptimHyper& h);

/// State-free update on the complement: u = -lr_free * sign(g), sign(0) = 0.
ParamTensor signsgd_step(const ParamTensor& g_free, double lr_free);

/// Plain-SGD baseline: u = -lr * g.
ParamTensor sgd_step(const ParamTensor& g, double lr);

}  // namespace adafrugal
