#pragma once

#include <optional>

#include "adafrugal/errors.hpp"

namespace adafrugal {

/// Linear decay of the state-full ratio over the training horizon:
///
///   rho(k) = max(rho_end, rho_start - (rho_start - rho_end) * k / k_total)
///
/// Starts wide while the model learns coarse structure, shrinks toward
/// rho_end to shed optimizer state as training settles. Immutable; freely
/// shared across threads.
class RhoSchedule {
public:
    RhoSchedule(double rho_start, double rho_end, long k_total);

    /// Value at step k >= 0; clamps to rho_end beyond the horizon.
    double rho_at(long k) const;

    double rho_start() const noexcept { return rho_start_; }
    double rho_end() const noexcept { return rho_end_; }
    long k_total() const noexcept { return k_total_; }

private:
    double rho_start_;
    double rho_end_;
    long k_total_;
};

/// Relative change in validation loss between two evaluations:
/// |l_prev - l_curr| / l_prev. Throws NonPositiveLoss if l_prev <= 0.
double rel_loss_change(double l_prev, double l_curr);

enum class ValLossEvent {
    FirstObservation,  // baseline stored, no decision possible yet
    Increased,         // plateau detected, T grew
    Unchanged,         // loss still moving, T left alone
};

/// Loss-aware controller for the subspace update interval T. Every n_eval
/// steps it compares the new validation loss against the previous one; when
/// the relative change drops below tau_low the run is considered stable and
/// T is multiplied by gamma_increase, capped at t_max. T never decreases —
/// there is no shrink rule, only growth toward the cap.
///
/// Single-owner mutable state: callers serialize observe_val_loss.
class TController {
public:
    struct Params {
        double t_start = 100.0;
        double t_max = 800.0;
        double gamma_increase = 1.5;
        double tau_low = 0.008;
        long n_eval = 10000;
    };

    explicit TController(const Params& params);

    /// Feed one validation loss observed at `step`. Preconditions: step > 0
    /// and step is a multiple of n_eval (CadenceViolation otherwise).
    ValLossEvent observe_val_loss(long step, double val_loss);

    /// Current interval as a real; repeated gamma multiplication stays
    /// cleanly monotone in reals and is rounded only at the point of use.
    double t_current() const noexcept { return t_current_; }

    /// Nearest-integer interval for comparison against step counters.
    long rounded_t() const noexcept;

    const Params& params() const noexcept { return params_; }
    std::optional<double> last_val_loss() const noexcept { return last_val_loss_; }

private:
    Params params_;
    double t_current_;
    std::optional<double> last_val_loss_;
};

}  // namespace adafrugal
