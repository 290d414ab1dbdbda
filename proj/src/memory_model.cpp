#include "adafrugal/memory_model.hpp"

#include <stdexcept>

#include "adafrugal/projector.hpp"

namespace adafrugal {

std::size_t ModelShape::param_count() const {
    std::size_t total = 0;
    for (const ParamGroup& g : groups) {
        total += g.rows * g.cols * g.count;
    }
    return total;
}

ModelShape ModelShape::transformer(std::string name, std::size_t layers, std::size_t hidden,
                                   std::size_t intermediate, std::size_t vocab) {
    if (layers == 0 || hidden == 0 || intermediate == 0 || vocab == 0) {
        throw std::invalid_argument("ModelShape::transformer: all dims must be positive");
    }
    ModelShape shape;
    shape.name = std::move(name);
    shape.groups = {
        {"token_embedding", vocab, hidden, 1, GroupPolicy::AlwaysStateFull},
        {"output_head", hidden, vocab, 1, GroupPolicy::AlwaysStateFull},
        {"attention_proj", hidden, hidden, 4 * layers, GroupPolicy::Blockable},
        {"mlp_in", hidden, intermediate, 2 * layers, GroupPolicy::Blockable},
        {"mlp_out", intermediate, hidden, layers, GroupPolicy::Blockable},
        {"norm_gain", 1, hidden, 2 * layers + 1, GroupPolicy::AlwaysStateFull},
    };
    return shape;
}

ModelShape ModelShape::llama130m() {
    return transformer("llama130m", 12, 768, 2048, 32000);
}

double MemoryReport::adamw_gib() const {
    return static_cast<double>(adamw_bytes()) / (1024.0 * 1024.0 * 1024.0);
}

double MemoryReport::frugal_gib() const {
    return static_cast<double>(frugal_bytes()) / (1024.0 * 1024.0 * 1024.0);
}

MemoryReport count_states(const ModelShape& shape, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw std::invalid_argument("count_states: rho must be in [0,1]");
    }
    MemoryReport report;
    report.rho = rho;
    report.param_count = shape.param_count();
    for (const ParamGroup& g : shape.groups) {
        const double rho_g = g.policy == GroupPolicy::AlwaysStateFull ? 1.0 : rho;
        const std::size_t width = subspace_width(rho_g, g.cols);
        report.frugal_state_scalars += 2 * g.rows * width * g.count;
    }
    report.adamw_state_scalars = 2 * report.param_count;
    report.ratio_to_adamw =
        report.adamw_state_scalars == 0
            ? 1.0
            : static_cast<double>(report.frugal_state_scalars) /
                  static_cast<double>(report.adamw_state_scalars);
    return report;
}

double scaling_factor(std::size_t base_layers, std::size_t base_hidden,
                      std::size_t target_layers, std::size_t target_hidden) {
    if (base_layers == 0 || base_hidden == 0 || target_layers == 0 || target_hidden == 0) {
        throw std::invalid_argument("scaling_factor: all dims must be positive");
    }
    const double layer_ratio =
        static_cast<double>(target_layers) / static_cast<double>(base_layers);
    const double hidden_ratio =
        static_cast<double>(target_hidden) / static_cast<double>(base_hidden);
    return layer_ratio * hidden_ratio * hidden_ratio;
}

double scaling_extrapolation(double base_saving, std::size_t base_layers,
                             std::size_t base_hidden, std::size_t target_layers,
                             std::size_t target_hidden) {
    return base_saving * scaling_factor(base_layers, base_hidden, target_layers, target_hidden);
}

std::vector<TimelinePoint> dynamic_memory_timeline(const ModelShape& shape,
                                                   const RhoSchedule& schedule, long steps,
                                                   long sample_every) {
    if (sample_every <= 0) {
        throw std::invalid_argument("dynamic_memory_timeline: sample_every must be positive");
    }
    if (steps < 0) {
        throw std::invalid_argument("dynamic_memory_timeline: steps must be non-negative");
    }
    std::vector<TimelinePoint> series;
    for (long k = 0; k <= steps; k += sample_every) {
        series.push_back({k, count_states(shape, schedule.rho_at(k)).frugal_bytes()});
    }
    return series;
}

}  // namespace adafrugal
