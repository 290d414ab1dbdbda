#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "adafrugal/errors.hpp"

namespace adafrugal {

/// Dense row-major 2-D array of doubles — the unit every optimizer
/// operation acts on. Vectors (biases, norm gains) are 1xN tensors.
/// Zero-width (rows x 0) tensors are legal; they represent an empty
/// state-full subspace.
class ParamTensor {
public:
    /// rows x cols, zero-filled.
    ParamTensor(std::size_t rows, std::size_t cols);

    /// Adopts `values` (row-major, length rows*cols). Rejects NaN/Inf.
    ParamTensor(std::size_t rows, std::size_t cols, std::vector<double> values);

    /// Convenience literal constructor for tests: {{1,2},{3,4}}.
    static ParamTensor from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool same_shape(const ParamTensor& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    /// this += other (shape-checked).
    void add_in_place(const ParamTensor& other);
    /// this += alpha * other (shape-checked).
    void add_scaled_in_place(const ParamTensor& other, double alpha);
    /// this *= alpha.
    void scale_in_place(double alpha);
    void fill(double value);

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

/// Counter-based deterministic generator (splitmix64 core). Identical seeds
/// yield identical draw sequences on every platform; the sequence is frozen
/// by regression tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 bits of precision.
    double next_double();

    /// Uniform integer in [0, bound). bound must be nonzero. Debiased via
    /// Lemire's multiply-shift rejection.
    std::uint64_t next_below(std::uint64_t bound);

    /// Standard normal via Box-Muller (libm-portable enough for one build;
    /// values are pinned by regression tests, not by a published table).
    double next_normal();

    /// Derives an independent stream seed from (seed, stream) so that data
    /// synthesis and projector selection never share a sequence.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

private:
    std::uint64_t state_;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

/// Throws NonFiniteInput naming `context` if any entry is NaN/Inf.
void check_finite(const ParamTensor& t, const char* context);

/// Entry j = sqrt(sum_i t[i,j]^2); length = cols.
std::vector<double> col_l2_norms(const ParamTensor& t);

/// Copies the columns named by `idx` (strictly increasing, all < cols) into
/// a rows x |idx| tensor.
ParamTensor select_cols(const ParamTensor& t, std::span<const std::size_t> idx);

/// Inverse of select_cols: places sub's columns at positions `idx` of a
/// rows x total_cols tensor, zeros elsewhere.
ParamTensor scatter_cols(const ParamTensor& sub, std::span<const std::size_t> idx,
                         std::size_t total_cols);

/// k distinct indices in [0, n), sorted ascending, uniform over k-subsets.
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k);

}  // namespace adafrugal
