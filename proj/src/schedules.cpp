#include "adafrugal/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adafrugal {

RhoSchedule::RhoSchedule(double rho_start, double rho_end, long k_total)
    : rho_start_(rho_start), rho_end_(rho_end), k_total_(k_total) {
    if (!(rho_end > 0.0) || !(rho_end <= rho_start) || !(rho_start <= 1.0)) {
        throw std::invalid_argument("RhoSchedule: need 0 < rho_end <= rho_start <= 1");
    }
    if (k_total < 1) {
        throw std::invalid_argument("RhoSchedule: k_total must be positive");
    }
}

double RhoSchedule::rho_at(long k) const {
    if (k < 0) {
        throw std::invalid_argument("RhoSchedule::rho_at: negative step");
    }
    const double frac = static_cast<double>(k) / static_cast<double>(k_total_);
    return std::max(rho_end_, rho_start_ - (rho_start_ - rho_end_) * frac);
}

double rel_loss_change(double l_prev, double l_curr) {
    if (!(l_prev > 0.0)) {
        throw NonPositiveLoss("rel_loss_change: previous loss must be positive, got " +
                              std::to_string(l_prev));
    }
    return std::abs(l_prev - l_curr) / l_prev;
}

TController::TController(const Params& params) : params_(params), t_current_(params.t_start) {
    if (!(params.t_start > 0.0)) {
        throw std::invalid_argument("TController: t_start must be positive");
    }
    if (!(params.t_max >= params.t_start)) {
        throw std::invalid_argument("TController: t_max must be >= t_start");
    }
    if (!(params.gamma_increase > 1.0)) {
        throw std::invalid_argument("TController: gamma_increase must be > 1");
    }
    if (!(params.tau_low > 0.0)) {
        throw std::invalid_argument("TController: tau_low must be positive");
    }
    if (params.n_eval < 1) {
        throw std::invalid_argument("TController: n_eval must be positive");
    }
}

ValLossEvent TController::observe_val_loss(long step, double val_loss) {
    if (step <= 0 || step % params_.n_eval != 0) {
        throw CadenceViolation("observe_val_loss: step " + std::to_string(step) +
                               " is not a positive multiple of n_eval " +
                               std::to_string(params_.n_eval));
    }
    if (!last_val_loss_.has_value()) {
        last_val_loss_ = val_loss;
        return ValLossEvent::FirstObservation;
    }
    const double delta = rel_loss_change(*last_val_loss_, val_loss);
    last_val_loss_ = val_loss;
    if (delta < params_.tau_low) {
        t_current_ = std::min(params_.t_max, t_current_ * params_.gamma_increase);
        return ValLossEvent::Increased;
    }
    return ValLossEvent::Unchanged;
}

long TController::rounded_t() const noexcept {
    return std::lround(t_current_);
}

}  // namespace adafrugal
