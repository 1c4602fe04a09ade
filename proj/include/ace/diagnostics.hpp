#pragma once

#include "ace/matrix.hpp"
#include "ace/svd.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace ace {

inline constexpr std::size_t default_max_pairs = 100000;

/// Eigenvalue spectrum of (1/n) E^T E, or of the covariance when centered,
/// plus scalar anisotropy summaries.
///
/// eigenvalues holds all min(n, d) values, zeros included. rank counts the
/// non-zero ones. effective_rank is exp(Shannon entropy) of the eigenvalue
/// distribution; spectral_flatness divides it by eigenvalues.size(), so a
/// matrix confined to a subspace is not reported as flat. condition_number is
/// lambda_1 over the smallest non-zero eigenvalue.
struct SpectrumReport {
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool centered = false;
    std::vector<double> eigenvalues;
    std::vector<double> normalized;
    std::size_t rank = 0;
    double effective_rank = 0.0;
    double spectral_flatness = 0.0;
    double condition_number = 0.0;
    std::optional<double> avg_cosine;
};

/// Builds the scalar summaries from a non-increasing, non-negative spectrum.
/// Throws DegenerateInput if every value is zero.
SpectrumReport summarize_spectrum(std::vector<double> eigenvalues);

struct SpectrumOptions {
    bool centered = false;
    bool with_cosine = false;
    std::uint64_t seed = 0;
    std::size_t max_pairs = default_max_pairs;
    std::size_t exact_limit = default_exact_limit;
};

/// avg_cosine, when requested, is measured on E as given: centering removes
/// exactly the shared direction the cosine is meant to detect.
SpectrumReport spectrum_report(const EmbeddingMatrix& e, const SpectrumOptions& options = {});

/// Distinct unordered row pairs (i < j). Every pair when n(n-1)/2 <= max_pairs,
/// otherwise max_pairs drawn without replacement. Sorted, seed-deterministic.
std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t max_pairs, std::uint64_t seed);

/// Distinct indices in [0, n), sorted. All of them when count >= n.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, std::uint64_t seed);

/// Mean cosine similarity over sampled row pairs. Throws ZeroVector when a
/// sampled row has norm < 1e-15.
double avg_pairwise_cosine(const EmbeddingMatrix& e, std::size_t max_pairs = default_max_pairs, std::uint64_t seed = 0);

/// Average ranks, ties share the mean of their positions (1-based).
std::vector<double> average_ranks(const std::vector<double>& values);

/// Spearman correlation with average ranks. Throws DegenerateInput when
/// either side is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Spearman correlation between pairwise cosines of the same sampled pairs
/// in both embeddings.
double similarity_preservation(const EmbeddingMatrix& ref, const EmbeddingMatrix& other,
                               std::size_t max_pairs = default_max_pairs, std::uint64_t seed = 0);

/// Indices of the k rows most cosine-similar to row `query` (self excluded),
/// ties broken by lower index. `unit_rows` must hold L2-normalized rows.
std::vector<std::size_t> cosine_neighbors(const Matrix& unit_rows, std::size_t query, std::size_t k);

/// Mean Jaccard overlap of cosine k-NN sets between the two embeddings over
/// up to max_queries sampled rows.
double nn_overlap(const EmbeddingMatrix& ref, const EmbeddingMatrix& other, std::size_t k_nn,
                  std::size_t max_queries, std::uint64_t seed = 0);

struct Top3Projection {
    Matrix coords;  // n x 3
    std::array<double, 3> singular_values{};
};

/// U_3 diag(S_3) of the uncentered SVD. Throws RankTooLow below rank 3.
Top3Projection top3_projection(const EmbeddingMatrix& e, std::size_t exact_limit = default_exact_limit);

}  // namespace ace
