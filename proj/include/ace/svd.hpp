#pragma once

#include "ace/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>

namespace ace {

enum class SvdMethod { exact, randomized };

/// Thin factorization E ~= U diag(S) V^T.
///
/// S is non-increasing and non-negative; U (n x r) and V (d x r) have
/// orthonormal columns. Each column pair is sign-normalized so that the
/// largest-magnitude entry of the V column is positive (first such entry on
/// ties).
struct SvdFactors {
    Matrix U;
    Vector S;
    Matrix V;
    SvdMethod method = SvdMethod::exact;
    std::optional<std::uint64_t> seed;
    std::size_t source_rows = 0;
    std::size_t source_cols = 0;

    std::size_t rank() const noexcept { return static_cast<std::size_t>(S.size()); }
    /// Number of strictly positive singular values.
    std::size_t numerical_rank() const noexcept;
    /// Leading k columns / values, same metadata.
    SvdFactors truncated(std::size_t k) const;
};

inline constexpr std::size_t default_exact_limit = 2048;
/// Singular values below this fraction of sigma_max are set to exactly zero.
inline constexpr double zero_singular_ratio = 1e-12;

/// Full thin SVD, r = min(n, d), via eigendecomposition of the smaller Gram
/// matrix. Throws DimensionTooLarge when min(n, d) > exact_limit.
SvdFactors exact_svd(const EmbeddingMatrix& e, std::size_t exact_limit = default_exact_limit);
SvdFactors exact_svd(const Matrix& e, std::size_t exact_limit = default_exact_limit);

enum class RangeFinder {
    /// Orthonormal basis of [Y_0, Y_1, ..., Y_q] where Y_{i+1} = E E^T Y_i.
    block_krylov,
    /// Basis of the last iterate Y_q only.
    subspace_iteration,
};

struct RandomizedOptions {
    std::size_t oversample = 10;
    std::size_t power_iters = 4;
    RangeFinder range_finder = RangeFinder::block_krylov;
};

/// Rank-k approximate SVD from a seeded Gaussian sketch. Deterministic for a
/// fixed seed. Throws InvalidRank unless 1 <= k <= min(n, d).
SvdFactors randomized_svd(const EmbeddingMatrix& e, std::size_t k, std::uint64_t seed,
                          const RandomizedOptions& options = {});

struct SvdOptions {
    std::size_t exact_limit = default_exact_limit;
    RandomizedOptions randomized{};
    std::uint64_t seed = 0;
};

/// Leading k factors: exact path when min(n, d) <= exact_limit, randomized
/// otherwise.
SvdFactors truncated_svd(const EmbeddingMatrix& e, std::size_t k, const SvdOptions& options = {});

/// max_ij |Q^T Q - I|_ij
double orthonormality_residual(const Matrix& q);

}  // namespace ace
