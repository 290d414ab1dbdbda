#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "adafrugal/memory_model.hpp"

using namespace adafrugal;

TEST_CASE("single square blockable group at quarter ratio") {
    ModelShape shape{"square", {ParamGroup{"w", 768, 768, 1, GroupPolicy::Blockable}}};
    const MemoryReport r = count_states(shape, 0.25);
    CHECK(r.param_count == 768 * 768);
    CHECK(r.adamw_state_scalars == 2 * 768 * 768);
    // ceil(0.25 * 768) = 192 exactly, so the ratio is exactly one quarter.
    CHECK(r.frugal_state_scalars == 2 * 768 * 192);
    CHECK(r.ratio_to_adamw == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.adamw_bytes() == 8 * 768 * 768);
}

TEST_CASE("ratio is exactly one at rho = 1 and group counts multiply") {
    ModelShape shape{"two", {ParamGroup{"w", 64, 48, 3, GroupPolicy::Blockable}}};
    const MemoryReport r = count_states(shape, 1.0);
    CHECK(r.param_count == 64 * 48 * 3);
    CHECK(r.frugal_state_scalars == r.adamw_state_scalars);
    CHECK(r.ratio_to_adamw == 1.0);
}

TEST_CASE("always-state-full groups ignore rho entirely") {
    ModelShape shape{"mixed",
                     {ParamGroup{"emb", 100, 32, 1, GroupPolicy::AlwaysStateFull},
                      ParamGroup{"w", 32, 32, 2, GroupPolicy::Blockable}}};
    const MemoryReport lo = count_states(shape, 0.25);
    // emb keeps 2*100*32 = 6400 scalars at any rho; w drops to 2*32*8*2.
    CHECK(lo.frugal_state_scalars == 6400 + 2 * 32 * 8 * 2);
    const MemoryReport hi = count_states(shape, 1.0);
    CHECK(hi.frugal_state_scalars == 6400 + 2 * 32 * 32 * 2);
}

TEST_CASE("frugal scalars are monotone in rho") {
    const ModelShape shape = ModelShape::llama130m();
    std::size_t prev = 0;
    for (double rho = 0.05; rho <= 1.0; rho += 0.05) {
        const MemoryReport r = count_states(shape, rho);
        CHECK(r.frugal_state_scalars >= prev);
        CHECK(r.frugal_state_scalars <= r.adamw_state_scalars);
        prev = r.frugal_state_scalars;
    }
}

TEST_CASE("reference transformer parameter count is pinned") {
    const ModelShape shape = ModelShape::llama130m();
    // Hand total: embeddings 2*32000*768, attention 4*12*768^2, MLP
    // 3*12*768*2048, gains 25*768.
    const std::size_t embeddings = 2ul * 32000 * 768;
    const std::size_t attention = 4ul * 12 * 768 * 768;
    const std::size_t mlp = 3ul * 12 * 768 * 2048;
    const std::size_t gains = 25ul * 768;
    CHECK(shape.param_count() == embeddings + attention + mlp + gains);
    CHECK(shape.param_count() == 134105856);
}

TEST_CASE("reference transformer full-state footprint is about one binary gigabyte") {
    const MemoryReport r = count_states(ModelShape::llama130m(), 1.0);
    CHECK(r.adamw_state_scalars == 2 * 134105856ul);
    CHECK(r.adamw_bytes() == 1072846848ul);
    CHECK(r.adamw_gib() == doctest::Approx(0.9991664886474609).epsilon(1e-12));
    CHECK(r.adamw_gib() > 0.95);
    CHECK(r.adamw_gib() < 1.10);
}

TEST_CASE("reference transformer ratio at wide blocking") {
    const MemoryReport r = count_states(ModelShape::llama130m(), 0.25);
    CHECK(r.frugal_state_scalars == 140809728ul);
    const double ratio = r.ratio_to_adamw;
    CHECK(ratio == doctest::Approx(0.5249947026921777).epsilon(1e-12));
    CHECK(ratio > 0.47);
    CHECK(ratio < 0.57);
}

TEST_CASE("reference transformer ratio at narrow blocking") {
    const MemoryReport r = count_states(ModelShape::llama130m(), 0.05);
    CHECK(r.frugal_state_scalars == 106931712ul);
    const double ratio = r.ratio_to_adamw;
    CHECK(ratio == doctest::Approx(0.398683976932372).epsilon(1e-12));
    CHECK(ratio > 0.33);
    CHECK(ratio < 0.45);
}

TEST_CASE("scaling factor and extrapolation arithmetic") {
    CHECK(scaling_factor(24, 768, 24, 768) == 1.0);
    CHECK(scaling_factor(24, 768, 48, 768) == 2.0);
    CHECK(scaling_factor(24, 768, 24, 1536) == 4.0);
    // (32/24) * (4096/768)^2 == 1024/27 exactly in rationals; the double
    // computation lands within one ulp of that.
    const double factor = scaling_factor(24, 768, 32, 4096);
    CHECK(factor == doctest::Approx(1024.0 / 27.0).epsilon(1e-15));
    const double projected = scaling_extrapolation(0.15, 24, 768, 32, 4096);
    CHECK(projected == doctest::Approx(0.15 * 1024.0 / 27.0).epsilon(1e-15));
    CHECK(projected > 5.57);
    CHECK(projected < 5.77);
}

TEST_CASE("scaling rejects zero dimensions") {
    CHECK_THROWS_AS(scaling_factor(0, 768, 32, 4096), std::invalid_argument);
    CHECK_THROWS_AS(scaling_factor(24, 0, 32, 4096), std::invalid_argument);
    CHECK_THROWS_AS(scaling_factor(24, 768, 0, 4096), std::invalid_argument);
    CHECK_THROWS_AS(scaling_factor(24, 768, 32, 0), std::invalid_argument);
}

TEST_CASE("memory timeline endpoints follow the schedule") {
    const ModelShape shape{"square", {ParamGroup{"w", 100, 100, 1, GroupPolicy::Blockable}}};
    const RhoSchedule sched(0.25, 0.05, 1000);
    const auto points = dynamic_memory_timeline(shape, sched, 1000, 100);
    REQUIRE(points.size() == 11);
    CHECK(points.front().step == 0);
    CHECK(points.back().step == 1000);
    CHECK(points.front().bytes == count_states(shape, 0.25).frugal_bytes());
    CHECK(points.back().bytes == count_states(shape, 0.05).frugal_bytes());
    for (std::size_t i = 1; i < points.size(); ++i) {
        CHECK(points[i].step == points[i - 1].step + 100);
        CHECK(points[i].bytes <= points[i - 1].bytes);
    }
}

TEST_CASE("memory timeline is flat for a constant schedule") {
    const ModelShape shape{"square", {ParamGroup{"w", 64, 64, 1, GroupPolicy::Blockable}}};
    const RhoSchedule sched(0.2, 0.2, 500);
    const auto points = dynamic_memory_timeline(shape, sched, 500, 50);
    for (const auto& p : points) {
        CHECK(p.bytes == count_states(shape, 0.2).frugal_bytes());
    }
}

TEST_CASE("memory timeline keeps the off-grid final step out") {
    const ModelShape shape{"square", {ParamGroup{"w", 32, 32, 1, GroupPolicy::Blockable}}};
    const RhoSchedule sched(0.5, 0.1, 130);
    const auto points = dynamic_memory_timeline(shape, sched, 130, 50);
    REQUIRE(points.size() == 3);  // 0, 50, 100; 130 is off the sampling grid
    CHECK(points.back().step == 100);
}
