#include "adafrugal/engine.hpp"

#include <cmath>
#include <utility>

#include "adafrugal/errors.hpp"

namespace adafrugal {

namespace {

// Offsets the per-redefinition rng streams away from the low stream ids the
// tasks use for data synthesis, so engine and task draws never alias even
// when both are derived from the same seed.
constexpr std::uint64_t kEngineStreamBase = 1u << 20;

void require(bool ok, const char* field, const std::string& message) {
    if (!ok) {
        throw ConfigError(field, message);
    }
}

void check_all_finite(const ParamTensor& t, long step, const std::string& id) {
    for (double v : t.data()) {
        if (!std::isfinite(v)) {
            throw NonFiniteLoss(step, id);
        }
    }
}

// State-free update over the columns NOT covered by the projector, applied
// directly to theta. Zero-gradient entries are skipped (sign(0) = 0), so
// untouched parameters keep their exact bit pattern; selected columns are
// never visited at all.
void apply_signsgd_free(ParamTensor& theta, const ParamTensor& g,
                        std::span<const std::size_t> selected, double lr_free) {
    std::size_t next = 0;
    for (std::size_t c = 0; c < g.cols(); ++c) {
        if (next < selected.size() && selected[next] == c) {
            ++next;
            continue;
        }
        for (std::size_t r = 0; r < g.rows(); ++r) {
            const double gv = g(r, c);
            if (gv > 0.0) {
                theta(r, c) -= lr_free;
            } else if (gv < 0.0) {
                theta(r, c) += lr_free;
            }
        }
    }
}

}  // namespace

bool mode_uses_rho_schedule(EngineMode mode) noexcept {
    return mode == EngineMode::DynRho || mode == EngineMode::Combined;
}

bool mode_uses_t_controller(EngineMode mode) noexcept {
    return mode == EngineMode::DynT || mode == EngineMode::Combined;
}

bool mode_redefines(EngineMode mode) noexcept {
    return mode != EngineMode::AdamWFull;
}

void EngineConfig::validate() const {
    require(total_steps >= 0, "total_steps", "must be >= 0");
    require(n_eval >= 1, "n_eval", "must be >= 1");
    require(std::isfinite(t_start) && t_start >= 1.0, "t_start", "must be >= 1");
    if (mode_uses_t_controller(mode)) {
        require(std::isfinite(t_max) && t_max >= t_start, "t_max", "must be >= t_start");
        require(std::isfinite(gamma_increase) && gamma_increase > 1.0, "gamma_increase",
                "must be > 1");
        require(std::isfinite(tau_low) && tau_low > 0.0, "tau_low", "must be > 0");
    }
    if (mode == EngineMode::FrugalStatic || mode == EngineMode::DynT) {
        require(std::isfinite(rho_start) && rho_start > 0.0 && rho_start <= 1.0, "rho_start",
                "must be in (0, 1]");
    }
    if (mode_uses_rho_schedule(mode)) {
        require(std::isfinite(rho_end) && rho_end > 0.0, "rho_end", "must be > 0");
        require(rho_end <= rho_start, "rho_end", "must be <= rho_start");
        require(std::isfinite(rho_start) && rho_start <= 1.0, "rho_start", "must be <= 1");
    }
    hyper.validate();
}

double EngineConfig::rho_at_step(long k) const {
    switch (mode) {
    case EngineMode::AdamWFull:
        return 1.0;
    case EngineMode::SignSgdOnly:
        return 0.0;
    case EngineMode::FrugalStatic:
    case EngineMode::DynT:
        return rho_start;
    case EngineMode::DynRho:
    case EngineMode::Combined:
        return RhoSchedule(rho_start, rho_end, std::max(total_steps, 1L)).rho_at(k);
    }
    throw ConfigError("mode", "unrecognized engine mode");
}

long redefinition_count(const MetricsTrace& trace) {
    long count = 0;
    for (const MetricsRow& row : trace) {
        count += row.redefined ? 1 : 0;
    }
    return count;
}

RunResult run_engine(const TrainingTask& task, const EngineConfig& cfg) {
    cfg.validate();

    RunResult result;
    result.param_names = task.param_names();
    result.params = task.initial_params();
    if (result.param_names.size() != result.params.size()) {
        throw ShapeMismatch("task param_names and initial_params disagree in length");
    }
    const std::size_t n_params = result.params.size();

    std::optional<TController> controller;
    if (mode_uses_t_controller(cfg.mode)) {
        controller.emplace(TController::Params{cfg.t_start, cfg.t_max, cfg.gamma_increase,
                                               cfg.tau_low, cfg.n_eval});
    }

    std::vector<BlockProjector> projectors;
    std::vector<AdamSubState> adam;
    projectors.reserve(n_params);
    adam.reserve(n_params);
    for (const ParamTensor& p : result.params) {
        projectors.emplace_back(p.cols(), std::vector<std::size_t>{}, 0.0, cfg.rule);
        adam.push_back(AdamSubState::zeros(p.rows(), 0));
    }

    const std::size_t batch_count = task.train_batch_count();
    if (batch_count == 0) {
        throw EmptyInput("task provides no training batches");
    }
    result.trace.reserve(static_cast<std::size_t>(cfg.total_steps));
    long steps_since_redefine = 0;
    std::vector<ParamTensor> grads;

    for (long k = 0; k < cfg.total_steps; ++k) {
        const double rho_k = cfg.rho_at_step(k);

        std::optional<double> val_loss;
        if (k > 0 && k % cfg.n_eval == 0) {
            val_loss = task.validation_loss(result.params);
            if (!std::isfinite(*val_loss)) {
                throw NonFiniteLoss(k, "validation_loss");
            }
            if (controller) {
                controller->observe_val_loss(k, *val_loss);
            }
        }

        const std::size_t batch = static_cast<std::size_t>(k) % batch_count;
        const double train_loss = task.train_loss_grad(result.params, batch, grads);
        if (!std::isfinite(train_loss)) {
            throw NonFiniteLoss(k, "train_loss");
        }
        for (std::size_t p = 0; p < n_params; ++p) {
            check_all_finite(grads[p], k, "grad:" + result.param_names[p]);
        }

        const double t_now = controller ? controller->t_current() : cfg.t_start;
        const long t_rounded = controller ? controller->rounded_t() : std::lround(cfg.t_start);
        const bool redefine_now =
            k == 0 || (mode_redefines(cfg.mode) && steps_since_redefine >= t_rounded);
        if (redefine_now) {
            ProjectorEvent event;
            event.step = k;
            event.params.reserve(n_params);
            for (std::size_t p = 0; p < n_params; ++p) {
                const std::uint64_t stream = kEngineStreamBase +
                                             static_cast<std::uint64_t>(k) * n_params + p;
                Rng rng(Rng::derive_seed(cfg.seed, stream));
                BlockProjector next = BlockProjector::redefine(grads[p], rho_k, cfg.rule, rng);
                adam[p] = cfg.strategy == StateStrategy::Project
                              ? transport_state(projectors[p], next, adam[p])
                              : reset_state(next, result.params[p].rows());
                event.params.push_back(
                    {result.param_names[p],
                     std::vector<std::size_t>(next.selected().begin(), next.selected().end())});
                projectors[p] = std::move(next);
            }
            steps_since_redefine = 0;
            result.projector_events.push_back(std::move(event));
        }

        if (cfg.hyper.weight_decay > 0.0) {
            const double shrink = 1.0 - cfg.hyper.lr_full * cfg.hyper.weight_decay;
            for (ParamTensor& theta : result.params) {
                theta.scale_in_place(shrink);
            }
        }

        long state_scalars = 0;
        for (std::size_t p = 0; p < n_params; ++p) {
            ParamTensor& theta = result.params[p];
            const BlockProjector& proj = projectors[p];
            if (proj.width() > 0) {
                const SplitGradient parts = split(proj, grads[p]);
                const ParamTensor u_full = adamw_step(adam[p], parts.g_full_sub, cfg.hyper);
                theta.add_in_place(lift(proj, u_full));
                if (!proj.is_full()) {
                    apply_signsgd_free(theta, parts.g_free, proj.selected(),
                                       cfg.hyper.lr_free);
                }
            } else {
                apply_signsgd_free(theta, grads[p], proj.selected(), cfg.hyper.lr_free);
            }
            check_all_finite(theta, k, result.param_names[p]);
            state_scalars +=
                2 * static_cast<long>(theta.rows()) * static_cast<long>(proj.width());
        }

        result.trace.push_back(
            {k, train_loss, val_loss, rho_k, t_now, redefine_now, state_scalars});
        ++steps_since_redefine;
    }

    result.final_val_loss = task.validation_loss(result.params);
    return result;
}

}  // namespace adafrugal
