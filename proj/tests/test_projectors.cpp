#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <vector>

#include "adafrugal/projector.hpp"

using namespace adafrugal;

namespace {

bool bitwise_equal(const ParamTensor& a, const ParamTensor& b) {
    if (!a.same_shape(b)) {
        return false;
    }
    return std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("subspace_width matches the ceiling rule at reference sizes") {
    CHECK(subspace_width(0.25, 768) == 192);
    CHECK(subspace_width(0.05, 768) == 39);  // ceil(38.4)
    CHECK(subspace_width(1.0, 768) == 768);
    CHECK(subspace_width(0.5, 7) == 4);      // ceil(3.5)
    CHECK(subspace_width(0.0, 768) == 0);
    CHECK(subspace_width(0.3, 0) == 0);
    CHECK(subspace_width(1e-9, 1000) == 1);  // any positive rho keeps a column
}

TEST_CASE("subspace_width never exceeds cols and is monotone in rho") {
    for (double rho : {0.01, 0.05, 0.17, 0.25, 0.5, 0.73, 0.99, 1.0}) {
        for (std::size_t n : {1u, 2u, 6u, 39u, 768u}) {
            const std::size_t w = subspace_width(rho, n);
            CHECK(w <= n);
            CHECK(w >= 1);  // rho > 0 and n > 0
        }
    }
    std::size_t prev = 0;
    for (double rho = 0.05; rho <= 1.0; rho += 0.05) {
        const std::size_t w = subspace_width(rho, 97);
        CHECK(w >= prev);
        prev = w;
    }
}

TEST_CASE("subspace_width rejects rho outside [0, 1]") {
    CHECK_THROWS_AS(subspace_width(-0.1, 10), std::invalid_argument);
    CHECK_THROWS_AS(subspace_width(1.1, 10), std::invalid_argument);
}

TEST_CASE("GradNormTopK picks the largest-norm columns, sorted ascending") {
    // Column norms: c0 = 5, c1 = 1, c2 = sqrt(8), c3 = 0, c4 = 13.
    const ParamTensor g = ParamTensor::from_rows({
        {3.0, 1.0, 2.0, 0.0, 5.0},
        {4.0, 0.0, -2.0, 0.0, 12.0},
    });
    Rng rng(1);
    const BlockProjector p = BlockProjector::redefine(g, 0.6, SelectionRule::GradNormTopK, rng);
    CHECK(p.width() == 3);  // ceil(0.6*5)
    const std::vector<std::size_t> want = {0, 2, 4};
    CHECK(std::vector<std::size_t>(p.selected().begin(), p.selected().end()) == want);
    CHECK(p.param_cols() == 5);
    CHECK(p.rho_used() == 0.6);
    CHECK(!p.is_full());
    CHECK(!p.is_empty());
}

TEST_CASE("GradNormTopK breaks norm ties toward the lower index") {
    const ParamTensor g = ParamTensor::from_rows({
        {1.0, -1.0, 1.0, 1.0},
    });
    Rng rng(1);
    const BlockProjector p = BlockProjector::redefine(g, 0.5, SelectionRule::GradNormTopK, rng);
    const std::vector<std::size_t> want = {0, 1};
    CHECK(std::vector<std::size_t>(p.selected().begin(), p.selected().end()) == want);
}

TEST_CASE("Random rule is deterministic per seed and respects bounds") {
    ParamTensor g(3, 20);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.data()[i] = static_cast<double>(i) * 0.1;
    }
    Rng a(42);
    Rng b(42);
    const BlockProjector pa = BlockProjector::redefine(g, 0.35, SelectionRule::Random, a);
    const BlockProjector pb = BlockProjector::redefine(g, 0.35, SelectionRule::Random, b);
    CHECK(std::equal(pa.selected().begin(), pa.selected().end(), pb.selected().begin(),
                     pb.selected().end()));
    CHECK(pa.width() == 7);  // ceil(0.35*20)
    CHECK(std::is_sorted(pa.selected().begin(), pa.selected().end()));
    std::set<std::size_t> uniq(pa.selected().begin(), pa.selected().end());
    CHECK(uniq.size() == pa.width());
    CHECK(*uniq.rbegin() < 20);
    Rng c(43);
    const BlockProjector pc = BlockProjector::redefine(g, 0.35, SelectionRule::Random, c);
    // Different seeds almost surely differ for 7-of-20 subsets.
    CHECK(!std::equal(pa.selected().begin(), pa.selected().end(), pc.selected().begin(),
                      pc.selected().end()));
}

TEST_CASE("BlockProjector constructor validates the index set") {
    CHECK_NOTHROW(BlockProjector(5, {0, 2, 4}, 0.6, SelectionRule::GradNormTopK));
    CHECK_NOTHROW(BlockProjector(5, {}, 0.0, SelectionRule::GradNormTopK));
    CHECK_THROWS_AS(BlockProjector(5, {0, 5}, 0.5, SelectionRule::GradNormTopK), IndexOutOfRange);
    CHECK_THROWS_AS(BlockProjector(5, {2, 1}, 0.5, SelectionRule::GradNormTopK), NotSorted);
    CHECK_THROWS_AS(BlockProjector(5, {1, 1}, 0.5, SelectionRule::GradNormTopK), NotSorted);
}

TEST_CASE("split and lift reconstruct the gradient bit-exactly") {
    Rng rng(7);
    int nontrivial = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t rows = 1 + rng.next_below(6);
        const std::size_t cols = 1 + rng.next_below(12);
        ParamTensor g(rows, cols);
        for (std::size_t i = 0; i < g.size(); ++i) {
            // Mix magnitudes and exact zeros so reconstruction is stressed
            // across exponents.
            const auto pick = rng.next_below(10);
            if (pick == 0) {
                g.data()[i] = 0.0;
            } else if (pick == 1) {
                g.data()[i] = rng.next_normal() * 1e-200;
            } else {
                g.data()[i] = rng.next_normal() * std::pow(10.0, double(rng.next_below(7)) - 3.0);
            }
        }
        const double rho = 0.05 + 0.95 * rng.next_double();
        const SelectionRule rule =
            (trial % 2 == 0) ? SelectionRule::GradNormTopK : SelectionRule::Random;
        const BlockProjector p = BlockProjector::redefine(g, rho, rule, rng);

        const SplitGradient parts = split(p, g);
        CHECK(parts.g_full_sub.rows() == rows);
        CHECK(parts.g_full_sub.cols() == p.width());
        CHECK(parts.g_free.same_shape(g));

        // The complement is exactly zero on selected columns.
        for (std::size_t c : p.selected()) {
            for (std::size_t r = 0; r < rows; ++r) {
                CHECK(parts.g_free(r, c) == 0.0);
            }
        }
        // lift(selected part) + complement == original, bit for bit.
        ParamTensor recon = lift(p, parts.g_full_sub);
        CHECK(recon.same_shape(g));
        recon.add_in_place(parts.g_free);
        if (!p.is_full() && !p.is_empty()) {
            ++nontrivial;
        }
        CHECK(bitwise_equal(recon, g));
    }
    CHECK(nontrivial > 200);  // the sweep genuinely exercises partial splits
}

TEST_CASE("split rejects a gradient of the wrong width") {
    const BlockProjector p(5, {1, 3}, 0.4, SelectionRule::GradNormTopK);
    ParamTensor g(2, 4);
    CHECK_THROWS_AS(split(p, g), ShapeMismatch);
    ParamTensor u(2, 3);
    CHECK_THROWS_AS(lift(p, u), ShapeMismatch);
}

TEST_CASE("transport_state keeps overlapping columns and zeros fresh ones") {
    const BlockProjector p_old(6, {0, 2, 4}, 0.5, SelectionRule::GradNormTopK);
    const BlockProjector p_new(6, {2, 3, 4}, 0.5, SelectionRule::GradNormTopK);
    AdamSubState s = AdamSubState::zeros(2, 3);
    // Old layout columns are (0, 2, 4); tag each with a distinct value.
    for (std::size_t j = 0; j < 3; ++j) {
        s.m(0, j) = 10.0 + double(j);
        s.m(1, j) = 20.0 + double(j);
        s.v(0, j) = 30.0 + double(j);
        s.v(1, j) = 40.0 + double(j);
    }
    s.t = 17;
    const AdamSubState out = transport_state(p_old, p_new, s);
    CHECK(out.m.rows() == 2);
    CHECK(out.m.cols() == 3);
    // New layout (2, 3, 4): col 2 was old slot 1, col 3 is fresh, col 4 was
    // old slot 2.
    CHECK(out.m(0, 0) == 11.0);
    CHECK(out.m(0, 1) == 0.0);
    CHECK(out.m(0, 2) == 12.0);
    CHECK(out.v(1, 0) == 41.0);
    CHECK(out.v(1, 1) == 0.0);
    CHECK(out.v(1, 2) == 42.0);
    CHECK(out.t == 17);
}

TEST_CASE("transport_state with identical projectors is the identity") {
    Rng rng(11);
    ParamTensor g(3, 8);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.data()[i] = rng.next_normal();
    }
    const BlockProjector p = BlockProjector::redefine(g, 0.5, SelectionRule::GradNormTopK, rng);
    AdamSubState s = AdamSubState::zeros(3, p.width());
    for (std::size_t i = 0; i < s.m.size(); ++i) {
        s.m.data()[i] = rng.next_normal();
        s.v.data()[i] = std::abs(rng.next_normal());
    }
    s.t = 99;
    const AdamSubState out = transport_state(p, p, s);
    CHECK(bitwise_equal(out.m, s.m));
    CHECK(bitwise_equal(out.v, s.v));
    CHECK(out.t == 99);
}

TEST_CASE("transport_state with disjoint projectors zeroes everything but keeps t") {
    const BlockProjector p_old(6, {0, 1}, 0.34, SelectionRule::GradNormTopK);
    const BlockProjector p_new(6, {4, 5}, 0.34, SelectionRule::GradNormTopK);
    AdamSubState s = AdamSubState::zeros(2, 2);
    s.m.fill(3.0);
    s.v.fill(5.0);
    s.t = 8;
    const AdamSubState out = transport_state(p_old, p_new, s);
    for (double x : out.m.data()) {
        CHECK(x == 0.0);
    }
    for (double x : out.v.data()) {
        CHECK(x == 0.0);
    }
    CHECK(out.t == 8);
}

TEST_CASE("reset_state starts from zero moments and a zero counter") {
    const BlockProjector p(10, {1, 5, 9}, 0.3, SelectionRule::GradNormTopK);
    const AdamSubState s = reset_state(p, 4);
    CHECK(s.m.rows() == 4);
    CHECK(s.m.cols() == 3);
    CHECK(s.v.rows() == 4);
    CHECK(s.v.cols() == 3);
    CHECK(s.t == 0);
    for (double x : s.m.data()) {
        CHECK(x == 0.0);
    }
}

TEST_CASE("redefine rejects invalid rho and empty gradients") {
    ParamTensor g(2, 4);
    Rng rng(1);
    CHECK_THROWS_AS(BlockProjector::redefine(g, -0.5, SelectionRule::GradNormTopK, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(BlockProjector::redefine(g, 1.5, SelectionRule::GradNormTopK, rng),
                    std::invalid_argument);
}
