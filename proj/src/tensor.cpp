#include "adafrugal/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace adafrugal {

namespace {

void require_shape(std::size_t rows, std::size_t cols) {
    if (rows == 0) {
        throw ShapeMismatch("ParamTensor: rows must be positive");
    }
    (void)cols;  // cols == 0 is a legal empty subspace
}

std::uint64_t splitmix64_scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

ParamTensor::ParamTensor(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    require_shape(rows, cols);
}

ParamTensor::ParamTensor(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    require_shape(rows, cols);
    if (data_.size() != rows * cols) {
        throw ShapeMismatch("ParamTensor: data length " + std::to_string(data_.size()) +
                            " != rows*cols " + std::to_string(rows * cols));
    }
    for (double v : data_) {
        if (!std::isfinite(v)) {
            throw NonFiniteInput("ParamTensor: non-finite entry at construction");
        }
    }
}

ParamTensor ParamTensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r > 0 ? rows.begin()->size() : 0;
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw ShapeMismatch("ParamTensor::from_rows: ragged rows");
        }
        data.insert(data.end(), row.begin(), row.end());
    }
    return ParamTensor(r, c, std::move(data));
}

void ParamTensor::add_in_place(const ParamTensor& other) {
    if (!same_shape(other)) {
        throw ShapeMismatch("add_in_place: shape mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
}

void ParamTensor::add_scaled_in_place(const ParamTensor& other, double alpha) {
    if (!same_shape(other)) {
        throw ShapeMismatch("add_scaled_in_place: shape mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += alpha * other.data_[i];
    }
}

void ParamTensor::scale_in_place(double alpha) {
    for (double& v : data_) {
        v *= alpha;
    }
}

void ParamTensor::fill(double value) {
    std::ranges::fill(data_, value);
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix64_scramble(state_);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
    // Lemire's nearly-divisionless bounded draw.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Rng::next_normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) {
        u1 = next_double();
    }
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_normal_ = true;
    return radius * std::cos(angle);
}

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64_scramble(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

void check_finite(const ParamTensor& t, const char* context) {
    for (double v : t.data()) {
        if (!std::isfinite(v)) {
            throw NonFiniteInput(std::string(context) + ": non-finite entry");
        }
    }
}

std::vector<double> col_l2_norms(const ParamTensor& t) {
    std::vector<double> sums(t.cols(), 0.0);
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.cols(); ++c) {
            const double v = t(r, c);
            sums[c] += v * v;
        }
    }
    for (double& s : sums) {
        s = std::sqrt(s);
    }
    return sums;
}

namespace {

void require_sorted_in_range(std::span<const std::size_t> idx, std::size_t limit,
                             const char* op) {
    std::size_t prev = 0;
    bool first = true;
    for (std::size_t i : idx) {
        if (i >= limit) {
            throw IndexOutOfRange(std::string(op) + ": index " + std::to_string(i) +
                                  " >= " + std::to_string(limit));
        }
        if (!first && i <= prev) {
            throw NotSorted(std::string(op) + ": indices not strictly increasing");
        }
        prev = i;
        first = false;
    }
}

}  // namespace

ParamTensor select_cols(const ParamTensor& t, std::span<const std::size_t> idx) {
    require_sorted_in_range(idx, t.cols(), "select_cols");
    ParamTensor out(t.rows(), idx.size());
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            out(r, j) = t(r, idx[j]);
        }
    }
    return out;
}

ParamTensor scatter_cols(const ParamTensor& sub, std::span<const std::size_t> idx,
                         std::size_t total_cols) {
    if (idx.size() != sub.cols()) {
        throw ShapeMismatch("scatter_cols: |idx| " + std::to_string(idx.size()) +
                            " != sub.cols " + std::to_string(sub.cols()));
    }
    require_sorted_in_range(idx, total_cols, "scatter_cols");
    ParamTensor out(sub.rows(), total_cols);
    for (std::size_t r = 0; r < sub.rows(); ++r) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            out(r, idx[j]) = sub(r, j);
        }
    }
    return out;
}

std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k) {
    if (k > n) {
        throw KTooLarge("sample_without_replacement: k " + std::to_string(k) + " > n " +
                        std::to_string(n));
    }
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
        pool[i] = i;
    }
    // Partial Fisher-Yates: the first k slots are a uniform k-permutation.
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::ranges::sort(pool);
    return pool;
}

}  // namespace adafrugal
