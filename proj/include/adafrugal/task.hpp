#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adafrugal/tensor.hpp"

namespace adafrugal {

/// A training problem as the engine sees it: deterministic initial
/// parameters, a fixed cycle of training batches, and loss/gradient
/// evaluation. Validation data is a held-out split evaluated in a fixed
/// order, so the loss samples feeding the T controller are low-noise.
///
/// Implementations must be stateless across calls (pure functions of the
/// supplied parameters) so the engine's determinism contract holds.
class TrainingTask {
public:
    virtual ~TrainingTask() = default;

    virtual std::string_view name() const = 0;

    virtual std::vector<std::string> param_names() const = 0;
    virtual std::vector<ParamTensor> initial_params() const = 0;

    virtual std::size_t train_batch_count() const = 0;

    /// Loss on one training batch, no gradients.
    virtual double train_loss(std::span<const ParamTensor> params,
                              std::size_t batch_index) const = 0;

    /// Loss plus gradients (same shapes as params) on one training batch.
    virtual double train_loss_grad(std::span<const ParamTensor> params, std::size_t batch_index,
                                   std::vector<ParamTensor>& grads_out) const = 0;

    /// Loss over the full validation split.
    virtual double validation_loss(std::span<const ParamTensor> params) const = 0;
};

}  // namespace adafrugal
