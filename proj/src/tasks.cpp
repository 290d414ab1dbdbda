#include "adafrugal/tasks.hpp"

#include <cmath>
#include <string>

namespace adafrugal {

namespace {

// Rng stream ids per task seed, so data, init and geometry never alias.
constexpr std::uint64_t kTrainStream = 0;
constexpr std::uint64_t kValStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kGeometryStream = 3;

constexpr std::size_t kQuadTrainSamples = 256;
constexpr std::size_t kQuadValSamples = 64;
constexpr std::size_t kQuadBatch = 32;

constexpr std::size_t kLogTrainSamples = 512;
constexpr std::size_t kLogValSamples = 256;
constexpr std::size_t kLogBatch = 64;
constexpr double kLogSeparation = 2.5;

constexpr std::size_t kMlpTrainSamples = 2048;
constexpr std::size_t kMlpValSamples = 256;
constexpr std::size_t kMlpBatch = 64;

double stable_softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

void fill_normal(Rng& rng, std::vector<double>& out, std::size_t count, double scale) {
    out.resize(count);
    for (double& v : out) {
        v = scale * rng.next_normal();
    }
}

void require_batch(std::size_t batch_index, std::size_t batch_count) {
    if (batch_index >= batch_count) {
        throw IndexOutOfRange("task batch index " + std::to_string(batch_index) +
                              " >= batch count " + std::to_string(batch_count));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// quadratic_bowl
// ---------------------------------------------------------------------------

QuadraticBowlTask::QuadraticBowlTask(std::uint64_t seed) : w_star_(kOutputDim, kInputDim) {
    Rng geometry(Rng::derive_seed(seed, kGeometryStream));
    for (double& v : w_star_.data()) {
        v = 0.5 * geometry.next_normal();
    }

    const auto synth = [&](std::uint64_t stream, std::size_t n, std::vector<double>& xs,
                           std::vector<double>& ys) {
        Rng rng(Rng::derive_seed(seed, stream));
        fill_normal(rng, xs, n * kInputDim, 1.0);
        ys.assign(n * kOutputDim, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t r = 0; r < kOutputDim; ++r) {
                double acc = 0.0;
                for (std::size_t c = 0; c < kInputDim; ++c) {
                    acc += w_star_(r, c) * xs[s * kInputDim + c];
                }
                ys[s * kOutputDim + r] = acc;
            }
        }
    };
    synth(kTrainStream, kQuadTrainSamples, train_x_, train_y_);
    synth(kValStream, kQuadValSamples, val_x_, val_y_);
}

std::vector<std::string> QuadraticBowlTask::param_names() const {
    return {"W"};
}

std::vector<ParamTensor> QuadraticBowlTask::initial_params() const {
    std::vector<ParamTensor> params;
    params.emplace_back(kOutputDim, kInputDim);  // start at the origin
    return params;
}

std::size_t QuadraticBowlTask::train_batch_count() const {
    return kQuadTrainSamples / kQuadBatch;
}

double QuadraticBowlTask::loss_grad_on(std::span<const ParamTensor> params, std::size_t begin,
                                       std::size_t end, std::vector<ParamTensor>* grads) const {
    if (params.size() != 1 || params[0].rows() != kOutputDim || params[0].cols() != kInputDim) {
        throw ShapeMismatch("quadratic_bowl expects a single " + std::to_string(kOutputDim) +
                            "x" + std::to_string(kInputDim) + " parameter");
    }
    const ParamTensor& w = params[0];
    const bool validation = begin >= kQuadTrainSamples;
    const std::vector<double>& xs = validation ? val_x_ : train_x_;
    const std::vector<double>& ys = validation ? val_y_ : train_y_;
    const std::size_t offset = validation ? kQuadTrainSamples : 0;

    if (grads) {
        grads->clear();
        grads->emplace_back(kOutputDim, kInputDim);
    }
    const double inv_n = 1.0 / static_cast<double>(end - begin);
    double loss = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
        const double* x = &xs[(s - offset) * kInputDim];
        const double* y = &ys[(s - offset) * kOutputDim];
        for (std::size_t r = 0; r < kOutputDim; ++r) {
            double residual = -y[r];
            for (std::size_t c = 0; c < kInputDim; ++c) {
                residual += w(r, c) * x[c];
            }
            loss += 0.5 * residual * residual * inv_n;
            if (grads) {
                ParamTensor& gw = (*grads)[0];
                for (std::size_t c = 0; c < kInputDim; ++c) {
                    gw(r, c) += residual * x[c] * inv_n;
                }
            }
        }
    }
    return loss;
}

double QuadraticBowlTask::train_loss(std::span<const ParamTensor> params,
                                     std::size_t batch_index) const {
    require_batch(batch_index, train_batch_count());
    return loss_grad_on(params, batch_index * kQuadBatch, (batch_index + 1) * kQuadBatch,
                        nullptr);
}

double QuadraticBowlTask::train_loss_grad(std::span<const ParamTensor> params,
                                          std::size_t batch_index,
                                          std::vector<ParamTensor>& grads_out) const {
    require_batch(batch_index, train_batch_count());
    return loss_grad_on(params, batch_index * kQuadBatch, (batch_index + 1) * kQuadBatch,
                        &grads_out);
}

double QuadraticBowlTask::validation_loss(std::span<const ParamTensor> params) const {
    return loss_grad_on(params, kQuadTrainSamples, kQuadTrainSamples + kQuadValSamples, nullptr);
}

// ---------------------------------------------------------------------------
// logistic_synth
// ---------------------------------------------------------------------------

LogisticSynthTask::LogisticSynthTask(std::uint64_t seed) {
    Rng geometry(Rng::derive_seed(seed, kGeometryStream));
    std::vector<double> mean(kDim);
    double norm_sq = 0.0;
    for (double& v : mean) {
        v = geometry.next_normal();
        norm_sq += v * v;
    }
    const double scale = kLogSeparation / std::sqrt(norm_sq);
    for (double& v : mean) {
        v *= scale;
    }

    const auto synth = [&](std::uint64_t stream, std::size_t n, std::vector<double>& xs,
                           std::vector<int>& ys) {
        Rng rng(Rng::derive_seed(seed, stream));
        xs.resize(n * kDim);
        ys.resize(n);
        for (std::size_t s = 0; s < n; ++s) {
            const int label = static_cast<int>(s % 2);  // balanced, interleaved
            const double sign = label == 1 ? 1.0 : -1.0;
            ys[s] = label;
            for (std::size_t c = 0; c < kDim; ++c) {
                xs[s * kDim + c] = sign * mean[c] + rng.next_normal();
            }
        }
    };
    synth(kTrainStream, kLogTrainSamples, train_x_, train_y_);
    synth(kValStream, kLogValSamples, val_x_, val_y_);
}

std::vector<std::string> LogisticSynthTask::param_names() const {
    return {"W"};
}

std::vector<ParamTensor> LogisticSynthTask::initial_params() const {
    std::vector<ParamTensor> params;
    params.emplace_back(1, kDim);
    return params;
}

std::size_t LogisticSynthTask::train_batch_count() const {
    return kLogTrainSamples / kLogBatch;
}

double LogisticSynthTask::loss_grad_on(std::span<const ParamTensor> params, std::size_t begin,
                                       std::size_t end, std::vector<ParamTensor>* grads) const {
    if (params.size() != 1 || params[0].rows() != 1 || params[0].cols() != kDim) {
        throw ShapeMismatch("logistic_synth expects a single 1x" + std::to_string(kDim) +
                            " parameter");
    }
    const ParamTensor& w = params[0];
    const bool validation = begin >= kLogTrainSamples;
    const std::vector<double>& xs = validation ? val_x_ : train_x_;
    const std::vector<int>& ys = validation ? val_y_ : train_y_;
    const std::size_t offset = validation ? kLogTrainSamples : 0;

    if (grads) {
        grads->clear();
        grads->emplace_back(1, kDim);
    }
    const double inv_n = 1.0 / static_cast<double>(end - begin);
    double loss = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
        const double* x = &xs[(s - offset) * kDim];
        const double y = static_cast<double>(ys[s - offset]);
        double logit = 0.0;
        for (std::size_t c = 0; c < kDim; ++c) {
            logit += w(0, c) * x[c];
        }
        loss += (stable_softplus(logit) - y * logit) * inv_n;
        if (grads) {
            const double err = sigmoid(logit) - y;
            ParamTensor& gw = (*grads)[0];
            for (std::size_t c = 0; c < kDim; ++c) {
                gw(0, c) += err * x[c] * inv_n;
            }
        }
    }
    return loss;
}

double LogisticSynthTask::train_loss(std::span<const ParamTensor> params,
                                     std::size_t batch_index) const {
    require_batch(batch_index, train_batch_count());
    return loss_grad_on(params, batch_index * kLogBatch, (batch_index + 1) * kLogBatch, nullptr);
}

double LogisticSynthTask::train_loss_grad(std::span<const ParamTensor> params,
                                          std::size_t batch_index,
                                          std::vector<ParamTensor>& grads_out) const {
    require_batch(batch_index, train_batch_count());
    return loss_grad_on(params, batch_index * kLogBatch, (batch_index + 1) * kLogBatch,
                        &grads_out);
}

double LogisticSynthTask::validation_loss(std::span<const ParamTensor> params) const {
    return loss_grad_on(params, kLogTrainSamples, kLogTrainSamples + kLogValSamples, nullptr);
}

double LogisticSynthTask::validation_accuracy(std::span<const ParamTensor> params) const {
    const ParamTensor& w = params[0];
    std::size_t correct = 0;
    for (std::size_t s = 0; s < kLogValSamples; ++s) {
        double logit = 0.0;
        for (std::size_t c = 0; c < kDim; ++c) {
            logit += w(0, c) * val_x_[s * kDim + c];
        }
        const int predicted = logit > 0.0 ? 1 : 0;
        correct += static_cast<std::size_t>(predicted == val_y_[s]);
    }
    return static_cast<double>(correct) / static_cast<double>(kLogValSamples);
}

// ---------------------------------------------------------------------------
// mlp_regression
// ---------------------------------------------------------------------------

MlpRegressionTask::MlpRegressionTask(std::uint64_t seed) : seed_(seed) {
    Rng geometry(Rng::derive_seed(seed, kGeometryStream));
    std::vector<double> dir_a(kInputDim);
    std::vector<double> dir_b(kInputDim);
    const auto unit = [&](std::vector<double>& v) {
        double norm_sq = 0.0;
        for (double& e : v) {
            e = geometry.next_normal();
            norm_sq += e * e;
        }
        const double inv = 1.2 / std::sqrt(norm_sq);  // argument std ~1.2, keeps tanh active
        for (double& e : v) {
            e *= inv;
        }
    };
    unit(dir_a);
    unit(dir_b);

    const auto synth = [&](std::uint64_t stream, std::size_t n, std::vector<double>& xs,
                           std::vector<double>& ys) {
        Rng rng(Rng::derive_seed(seed, stream));
        fill_normal(rng, xs, n * kInputDim, 1.0);
        ys.resize(n);
        for (std::size_t s = 0; s < n; ++s) {
            double arg_a = 0.0;
            double arg_b = 0.0;
            for (std::size_t c = 0; c < kInputDim; ++c) {
                arg_a += dir_a[c] * xs[s * kInputDim + c];
                arg_b += dir_b[c] * xs[s * kInputDim + c];
            }
            ys[s] = std::sin(arg_a) + 0.5 * std::cos(arg_b);
        }
    };
    synth(kTrainStream, kMlpTrainSamples, train_x_, train_y_);
    synth(kValStream, kMlpValSamples, val_x_, val_y_);
}

std::vector<std::string> MlpRegressionTask::param_names() const {
    return {"W1", "b1", "W2", "b2"};
}

std::vector<ParamTensor> MlpRegressionTask::initial_params() const {
    Rng rng(Rng::derive_seed(seed_, kInitStream));
    std::vector<ParamTensor> params;
    params.emplace_back(kInputDim, kHiddenDim);
    params.emplace_back(1, kHiddenDim);
    params.emplace_back(kHiddenDim, 1);
    params.emplace_back(1, 1);
    const double w1_scale = 1.0 / std::sqrt(static_cast<double>(kInputDim));
    const double w2_scale = 1.0 / std::sqrt(static_cast<double>(kHiddenDim));
    for (double& v : params[0].data()) {
        v = w1_scale * rng.next_normal();
    }
    for (double& v : params[2].data()) {
        v = w2_scale * rng.next_normal();
    }
    return params;
}

std::size_t MlpRegressionTask::train_batch_count() const {
    return kMlpTrainSamples / kMlpBatch;
}

double MlpRegressionTask::loss_grad_on(std::span<const ParamTensor> params, std::size_t begin,
                                       std::size_t end, std::vector<ParamTensor>* grads) const {
    if (params.size() != 4 || params[0].rows() != kInputDim ||
        params[0].cols() != kHiddenDim || params[1].rows() != 1 ||
        params[1].cols() != kHiddenDim || params[2].rows() != kHiddenDim ||
        params[2].cols() != 1 || params[3].rows() != 1 || params[3].cols() != 1) {
        throw ShapeMismatch("mlp_regression expects params (W1, b1, W2, b2)");
    }
    const ParamTensor& w1 = params[0];
    const ParamTensor& b1 = params[1];
    const ParamTensor& w2 = params[2];
    const ParamTensor& b2 = params[3];
    const bool validation = begin >= kMlpTrainSamples;
    const std::vector<double>& xs = validation ? val_x_ : train_x_;
    const std::vector<double>& ys = validation ? val_y_ : train_y_;
    const std::size_t offset = validation ? kMlpTrainSamples : 0;

    if (grads) {
        grads->clear();
        grads->emplace_back(kInputDim, kHiddenDim);
        grads->emplace_back(1, kHiddenDim);
        grads->emplace_back(kHiddenDim, 1);
        grads->emplace_back(1, 1);
    }
    const double inv_n = 1.0 / static_cast<double>(end - begin);
    double loss = 0.0;
    std::vector<double> hidden(kHiddenDim);
    for (std::size_t s = begin; s < end; ++s) {
        const double* x = &xs[(s - offset) * kInputDim];
        for (std::size_t j = 0; j < kHiddenDim; ++j) {
            double pre = b1(0, j);
            for (std::size_t c = 0; c < kInputDim; ++c) {
                pre += x[c] * w1(c, j);
            }
            hidden[j] = std::tanh(pre);
        }
        double prediction = b2(0, 0);
        for (std::size_t j = 0; j < kHiddenDim; ++j) {
            prediction += hidden[j] * w2(j, 0);
        }
        const double err = prediction - ys[s - offset];
        loss += 0.5 * err * err * inv_n;
        if (grads) {
            ParamTensor& gw1 = (*grads)[0];
            ParamTensor& gb1 = (*grads)[1];
            ParamTensor& gw2 = (*grads)[2];
            ParamTensor& gb2 = (*grads)[3];
            gb2(0, 0) += err * inv_n;
            for (std::size_t j = 0; j < kHiddenDim; ++j) {
                gw2(j, 0) += err * hidden[j] * inv_n;
                const double dpre = err * w2(j, 0) * (1.0 - hidden[j] * hidden[j]) * inv_n;
                gb1(0, j) += dpre;
                for (std::size_t c = 0; c < kInputDim; ++c) {
                    gw1(c, j) += dpre * x[c];
                }
            }
        }
    }
    return loss;
}

double MlpRegressionTask::train_loss(std::span<const ParamTensor> params,
                                     std::size_t batch_index) const {
    require_batch(batch_index, train_batch_count());
    return loss_grad_on(params, batch_index * kMlpBatch, (batch_index + 1) * kMlpBatch, nullptr);
}

double MlpRegressionTask::train_loss_grad(std::span<const ParamTensor> params,
                                          std::size_t batch_index,
                                          std::vector<ParamTensor>& grads_out) const {
    require_batch(batch_index, train_batch_count());
    return loss_grad_on(params, batch_index * kMlpBatch, (batch_index + 1) * kMlpBatch,
                        &grads_out);
}

double MlpRegressionTask::validation_loss(std::span<const ParamTensor> params) const {
    return loss_grad_on(params, kMlpTrainSamples, kMlpTrainSamples + kMlpValSamples, nullptr);
}

std::unique_ptr<TrainingTask> generate_task(std::string_view task_name, std::uint64_t seed) {
    if (task_name == "quadratic_bowl") {
        return std::make_unique<QuadraticBowlTask>(seed);
    }
    if (task_name == "logistic_synth") {
        return std::make_unique<LogisticSynthTask>(seed);
    }
    if (task_name == "mlp_regression") {
        return std::make_unique<MlpRegressionTask>(seed);
    }
    throw UnknownTask("unknown task '" + std::string(task_name) + "'");
}

}  // namespace adafrugal
