#pragma once

#include <stdexcept>
#include <string>

namespace adafrugal {

// Error taxonomy shared by every module. All types carry a human-readable
// message; CLI maps them onto exit codes (config problems -> 1, runtime
// divergence -> 2).

struct ShapeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IndexOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct NotSorted : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct KTooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonFiniteInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonPositiveLoss : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Validation-loss observation arrived at a step that is not a multiple of
// the evaluation cadence.
struct CadenceViolation : std::logic_error {
    using std::logic_error::logic_error;
};

struct UnknownTask : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Config-file validation failure; names the offending field.
struct ConfigError : std::invalid_argument {
    ConfigError(std::string field_name, const std::string& message)
        : std::invalid_argument("config field '" + field_name + "': " + message),
          field(std::move(field_name)) {}

    std::string field;
};

// A loss or a parameter went NaN/Inf mid-run. The engine aborts rather than
// clipping; at desk scale divergence is a bug signal, not a tuning issue.
struct NonFiniteLoss : std::runtime_error {
    NonFiniteLoss(long at_step, std::string param_id)
        : std::runtime_error("non-finite value at step " + std::to_string(at_step) +
                             " (" + param_id + ")"),
          step(at_step),
          param(std::move(param_id)) {}

    long step;
    std::string param;
};

}  // namespace adafrugal
