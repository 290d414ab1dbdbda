#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "adafrugal/tasks.hpp"
#include "oracles.hpp"

using namespace adafrugal;

namespace {

// Perturbs the initial point so gradient checks run away from any symmetric
// special case (all-zero weights, saturated tanh, ...).
std::vector<ParamTensor> nudged_params(const TrainingTask& task, std::uint64_t seed) {
    std::vector<ParamTensor> params = task.initial_params();
    Rng rng(seed);
    for (ParamTensor& p : params) {
        for (double& x : p.data()) {
            x += 0.1 * rng.next_normal();
        }
    }
    return params;
}

// Central-difference check of train_loss_grad over a handful of coordinates
// per parameter. Relative error guard matches the acceptance budget.
void gradcheck(const TrainingTask& task, std::uint64_t nudge_seed, int coords_per_param) {
    const std::vector<ParamTensor> params = nudged_params(task, nudge_seed);
    std::vector<ParamTensor> grads;
    const double loss = task.train_loss_grad(params, 0, grads);
    CHECK(loss == task.train_loss(params, 0));
    REQUIRE(grads.size() == params.size());
    Rng pick(nudge_seed + 1);
    for (std::size_t p = 0; p < params.size(); ++p) {
        REQUIRE(grads[p].same_shape(params[p]));
        for (int c = 0; c < coords_per_param; ++c) {
            const std::size_t i = pick.next_below(params[p].size());
            const double theta = params[p].data()[i];
            const double h = 1e-5 * std::max(1.0, std::abs(theta));
            const double fd = oracle::fd_train_loss(task, params, p, i, 0, h);
            const double an = grads[p].data()[i];
            const double rel =
                std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
            CHECK(rel < 1e-4);
        }
    }
}

}  // namespace

TEST_CASE("factory produces every task and rejects unknown names") {
    for (const char* name : {"quadratic_bowl", "logistic_synth", "mlp_regression"}) {
        auto task = generate_task(name, 0);
        REQUIRE(task != nullptr);
        CHECK(task->name() == name);
        CHECK(task->param_names().size() == task->initial_params().size());
        CHECK(task->train_batch_count() > 0);
    }
    CHECK_THROWS_AS(generate_task("no_such_task", 0), UnknownTask);
    CHECK_THROWS_AS(generate_task("", 0), UnknownTask);
}

TEST_CASE("tasks are deterministic functions of the seed") {
    for (const char* name : {"quadratic_bowl", "logistic_synth", "mlp_regression"}) {
        auto a = generate_task(name, 7);
        auto b = generate_task(name, 7);
        CHECK(oracle::params_bitwise_equal(a->initial_params(), b->initial_params()));
        const auto params = nudged_params(*a, 3);
        CHECK(a->train_loss(params, 0) == b->train_loss(params, 0));
        CHECK(a->validation_loss(params) == b->validation_loss(params));
        std::vector<ParamTensor> ga, gb;
        CHECK(a->train_loss_grad(params, 1, ga) == b->train_loss_grad(params, 1, gb));
        CHECK(oracle::params_bitwise_equal(ga, gb));
        // A different seed draws different data.
        auto c = generate_task(name, 8);
        CHECK(a->train_loss(params, 0) != c->train_loss(params, 0));
    }
}

TEST_CASE("initial parameters are reproducible across repeated calls") {
    // The MLP builds its init from a private rng; two calls on the same task
    // object must still agree exactly.
    for (const char* name : {"quadratic_bowl", "logistic_synth", "mlp_regression"}) {
        auto task = generate_task(name, 5);
        CHECK(oracle::params_bitwise_equal(task->initial_params(), task->initial_params()));
    }
}

TEST_CASE("quadratic bowl vanishes at its minimizer") {
    QuadraticBowlTask task(11);
    std::vector<ParamTensor> at_min;
    at_min.push_back(task.minimizer());
    for (std::size_t b = 0; b < task.train_batch_count(); ++b) {
        CHECK(task.train_loss(at_min, b) < 1e-12);
        std::vector<ParamTensor> grads;
        task.train_loss_grad(at_min, b, grads);
        for (double g : grads[0].data()) {
            CHECK(std::abs(g) < 1e-9);
        }
    }
    CHECK(task.validation_loss(at_min) < 1e-12);
    // Away from the minimizer the loss is strictly positive.
    const auto start = task.initial_params();
    CHECK(task.train_loss(start, 0) > 0.1);
}

TEST_CASE("quadratic bowl shapes and batching") {
    QuadraticBowlTask task(1);
    CHECK(task.param_names() == std::vector<std::string>{"W"});
    const auto params = task.initial_params();
    REQUIRE(params.size() == 1);
    CHECK(params[0].rows() == QuadraticBowlTask::kOutputDim);
    CHECK(params[0].cols() == QuadraticBowlTask::kInputDim);
    for (double x : params[0].data()) {
        CHECK(x == 0.0);  // zero init keeps the first gradient data-driven
    }
    CHECK(task.train_batch_count() == 8);
    CHECK_THROWS_AS(task.train_loss(params, 8), IndexOutOfRange);
    std::vector<ParamTensor> grads;
    CHECK_THROWS_AS(task.train_loss_grad(params, 99, grads), IndexOutOfRange);
}

TEST_CASE("logistic synth starts at log two and at chance accuracy") {
    LogisticSynthTask task(3);
    const auto zero = task.initial_params();
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].rows() == 1);
    CHECK(zero[0].cols() == LogisticSynthTask::kDim);
    // With w = 0 every logit is 0: loss is exactly log 2, accuracy is the
    // label base rate (balanced -> one half).
    for (std::size_t b = 0; b < task.train_batch_count(); ++b) {
        CHECK(task.train_loss(zero, b) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    }
    CHECK(task.validation_loss(zero) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(task.validation_accuracy(zero) == 0.5);
}

TEST_CASE("logistic synth is separable enough to train past 95 percent") {
    LogisticSynthTask task(0);
    // Plain full-batch gradient descent, cycling the fixed batches.
    std::vector<ParamTensor> params = task.initial_params();
    std::vector<ParamTensor> grads;
    for (long k = 0; k < 200; ++k) {
        task.train_loss_grad(params, static_cast<std::size_t>(k) % task.train_batch_count(),
                             grads);
        params[0].add_scaled_in_place(grads[0], -0.5);
    }
    CHECK(task.validation_accuracy(params) > 0.95);
    CHECK(task.validation_loss(params) < 0.15);
}

TEST_CASE("mlp regression shapes, init scale, and batching") {
    MlpRegressionTask task(2);
    const auto names = task.param_names();
    CHECK(names == std::vector<std::string>{"W1", "b1", "W2", "b2"});
    const auto params = task.initial_params();
    REQUIRE(params.size() == 4);
    CHECK(params[0].rows() == MlpRegressionTask::kInputDim);
    CHECK(params[0].cols() == MlpRegressionTask::kHiddenDim);
    CHECK(params[1].rows() == 1);
    CHECK(params[1].cols() == MlpRegressionTask::kHiddenDim);
    CHECK(params[2].rows() == MlpRegressionTask::kHiddenDim);
    CHECK(params[2].cols() == 1);
    CHECK(params[3].rows() == 1);
    CHECK(params[3].cols() == 1);
    // Biases start at zero; weights are small but not degenerate.
    for (double x : params[1].data()) {
        CHECK(x == 0.0);
    }
    for (double x : params[3].data()) {
        CHECK(x == 0.0);
    }
    double w1_max = 0.0;
    for (double x : params[0].data()) {
        w1_max = std::max(w1_max, std::abs(x));
    }
    CHECK(w1_max > 0.0);
    CHECK(w1_max < 2.0);
    CHECK(task.train_batch_count() == 32);
    CHECK(task.validation_loss(params) > 0.0);
}

TEST_CASE("mlp regression learns the smooth target") {
    MlpRegressionTask task(0);
    const double start_val = task.validation_loss(task.initial_params());
    const auto trained = oracle::adamw_loop(task, 400, 5e-3, 0.9, 0.999, 1e-8);
    const double end_val = task.validation_loss(trained);
    CHECK(end_val < 0.5 * start_val);
}

TEST_CASE("analytic gradients match central differences everywhere") {
    gradcheck(QuadraticBowlTask(4), 21, 8);
    gradcheck(LogisticSynthTask(4), 22, 8);
    gradcheck(MlpRegressionTask(4), 23, 8);
}

TEST_CASE("gradients reject mis-shaped parameter lists") {
    QuadraticBowlTask task(1);
    std::vector<ParamTensor> wrong;
    wrong.emplace_back(3, 3);
    std::vector<ParamTensor> grads;
    CHECK_THROWS_AS(task.train_loss_grad(wrong, 0, grads), ShapeMismatch);
    CHECK_THROWS_AS(task.validation_loss(wrong), ShapeMismatch);
}
