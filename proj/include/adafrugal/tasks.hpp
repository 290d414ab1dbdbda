#pragma once

#include <memory>

#include "adafrugal/task.hpp"

namespace adafrugal {

/// Least squares 0.5*||W x - y||^2 over fixed synthetic batches with
/// targets y = W* x, so the closed-form minimizer W* is known and the
/// minimum loss is exactly zero.
class QuadraticBowlTask final : public TrainingTask {
public:
    explicit QuadraticBowlTask(std::uint64_t seed);

    std::string_view name() const override { return "quadratic_bowl"; }
    std::vector<std::string> param_names() const override;
    std::vector<ParamTensor> initial_params() const override;
    std::size_t train_batch_count() const override;
    double train_loss(std::span<const ParamTensor> params,
                      std::size_t batch_index) const override;
    double train_loss_grad(std::span<const ParamTensor> params, std::size_t batch_index,
                           std::vector<ParamTensor>& grads_out) const override;
    double validation_loss(std::span<const ParamTensor> params) const override;

    const ParamTensor& minimizer() const { return w_star_; }

    static constexpr std::size_t kInputDim = 6;
    static constexpr std::size_t kOutputDim = 8;

private:
    double loss_grad_on(std::span<const ParamTensor> params, std::size_t begin, std::size_t end,
                        std::vector<ParamTensor>* grads) const;

    ParamTensor w_star_;
    std::vector<double> train_x_, train_y_;  // sample-major rows
    std::vector<double> val_x_, val_y_;
};

/// Binary classification of two well-separated Gaussians with a single
/// logit row vector and the usual log loss.
class LogisticSynthTask final : public TrainingTask {
public:
    explicit LogisticSynthTask(std::uint64_t seed);

    std::string_view name() const override { return "logistic_synth"; }
    std::vector<std::string> param_names() const override;
    std::vector<ParamTensor> initial_params() const override;
    std::size_t train_batch_count() const override;
    double train_loss(std::span<const ParamTensor> params,
                      std::size_t batch_index) const override;
    double train_loss_grad(std::span<const ParamTensor> params, std::size_t batch_index,
                           std::vector<ParamTensor>& grads_out) const override;
    double validation_loss(std::span<const ParamTensor> params) const override;

    /// Fraction of the validation split classified correctly.
    double validation_accuracy(std::span<const ParamTensor> params) const;

    static constexpr std::size_t kDim = 8;

private:
    double loss_grad_on(std::span<const ParamTensor> params, std::size_t begin, std::size_t end,
                        std::vector<ParamTensor>* grads) const;

    std::vector<double> train_x_, val_x_;
    std::vector<int> train_y_, val_y_;
};

/// One-hidden-layer tanh network regressing a seeded smooth target
/// y = sin(a.x) + 0.5*cos(b.x). Four parameters (two weight matrices, two
/// bias rows) exercise the engine's per-parameter paths.
class MlpRegressionTask final : public TrainingTask {
public:
    explicit MlpRegressionTask(std::uint64_t seed);

    std::string_view name() const override { return "mlp_regression"; }
    std::vector<std::string> param_names() const override;
    std::vector<ParamTensor> initial_params() const override;
    std::size_t train_batch_count() const override;
    double train_loss(std::span<const ParamTensor> params,
                      std::size_t batch_index) const override;
    double train_loss_grad(std::span<const ParamTensor> params, std::size_t batch_index,
                           std::vector<ParamTensor>& grads_out) const override;
    double validation_loss(std::span<const ParamTensor> params) const override;

    static constexpr std::size_t kInputDim = 16;
    static constexpr std::size_t kHiddenDim = 32;

private:
    double loss_grad_on(std::span<const ParamTensor> params, std::size_t begin, std::size_t end,
                        std::vector<ParamTensor>* grads) const;

    std::uint64_t seed_;
    std::vector<double> train_x_, train_y_;
    std::vector<double> val_x_, val_y_;
};

/// Factory keyed by task name; throws UnknownTask for anything else.
std::unique_ptr<TrainingTask> generate_task(std::string_view task_name, std::uint64_t seed);

}  // namespace adafrugal
