#pragma once

#include "ace/matrix.hpp"
#include "ace/svd.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <variant>

namespace ace {

/// Rescale so the pooled standard deviation of the output equals value.
struct TargetStd {
    double value = 1.0;
};

/// Multiply the output by a fixed factor.
struct ExplicitGamma {
    double value = 1.0;
};

using GammaPolicy = std::variant<TargetStd, ExplicitGamma>;

struct AceConfig {
    double lambda = 0.0;
    std::size_t k = 128;
    GammaPolicy gamma = ExplicitGamma{1.0};
    bool use_centering = false;

    /// Throws InvalidArgument / NegativeInput on out-of-range fields.
    void validate() const;
};

/// Dense n x n item-item operator. Only built for small n.
class SimilarityOperator {
public:
    /// Rejects non-square or asymmetric (1e-8 max-abs) input.
    explicit SimilarityOperator(Matrix values);

    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    const Matrix& values() const noexcept { return values_; }

private:
    Matrix values_;
};

inline constexpr std::size_t default_operator_limit = 4096;

/// Regularization values swept per item table: 0 and the 1-5 decade pattern
/// up to 5000.
inline constexpr std::array<double, 9> default_lambda_grid{0, 1, 5, 10, 50, 100, 500, 1000, 5000};

/// sqrt(s^2 / (s^2 + lambda)) per entry; 0 where s = 0 and lambda = 0.
Vector shrink_singular_values(std::span<const double> singular_values, double lambda);
Vector shrink_singular_values(const Vector& singular_values, double lambda);

/// target / global_std(pre_gamma). Throws DegenerateScale when the std is 0.
double gamma_for_target_std(const EmbeddingMatrix& pre_gamma, double target);

/// The scale factor a policy implies for a given pre-scale embedding.
double resolve_gamma(const EmbeddingMatrix& pre_gamma, const GammaPolicy& policy);

/// gamma * U_k * diag(g_lambda(S_k)). V is not used.
EmbeddingMatrix ace_embedding(const SvdFactors& factors, const AceConfig& config);

/// Factorizes E (or center(E) when config.use_centering) and applies
/// ace_embedding. Item ids carry over.
EmbeddingMatrix ace_transform(const EmbeddingMatrix& e, const AceConfig& config, const SvdOptions& svd = {});

/// sqrt(n) * U~ of centered E, restricted to non-zero singular directions, so
/// the centered covariance of the result is the identity.
EmbeddingMatrix whiten(const EmbeddingMatrix& e, std::size_t exact_limit = default_exact_limit);

/// Centered scores on the top-k principal directions: E~ V_k.
EmbeddingMatrix pca_project(const EmbeddingMatrix& e, std::size_t k, std::size_t exact_limit = default_exact_limit);

/// U diag(s^2 / (s^2 + lambda)) U^T from exact factors.
SimilarityOperator ace_operator_spectral(const SvdFactors& factors, double lambda,
                                         std::size_t max_items = default_operator_limit);

/// (E E^T + lambda I)^{-1} E E^T by a Cholesky solve. Requires lambda > 0.
SimilarityOperator ace_operator_closed_form(const EmbeddingMatrix& e, double lambda,
                                            std::size_t max_items = default_operator_limit);

/// Ratios (s_i^2/(s_i^2+lambda)) / (s_1^2/(s_1^2+lambda)); spectrum of the
/// ACE output normalized to its leading eigenvalue.
Vector normalized_ace_spectrum(const Vector& singular_values, double lambda);

}  // namespace ace
