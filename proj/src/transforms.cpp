#include "ace/transforms.hpp"

#include "ace/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <string>

namespace ace {
namespace {

using Index = Eigen::Index;

void check_lambda(double lambda) {
    if (std::isnan(lambda) || std::isinf(lambda)) throw Error(ErrorKind::InvalidArgument, "lambda must be finite");
    if (lambda < 0.0) throw Error(ErrorKind::NegativeInput, "lambda must be >= 0, got " + std::to_string(lambda));
}

double shrink_one(double sigma, double lambda) {
    if (sigma == 0.0) return 0.0;
    const double s2 = sigma * sigma;
    const double ratio = s2 / (s2 + lambda);
    if (std::isfinite(ratio)) return std::sqrt(ratio);
    return 1.0 / std::sqrt(1.0 + (lambda / sigma) / sigma);
}

// s^2 / (s^2 + lambda), 0 for the null directions
double spectral_weight(double sigma, double lambda) {
    if (sigma == 0.0) return 0.0;
    const double s2 = sigma * sigma;
    const double ratio = s2 / (s2 + lambda);
    if (std::isfinite(ratio)) return ratio;
    return 1.0 / (1.0 + (lambda / sigma) / sigma);
}

}  // namespace

void AceConfig::validate() const {
    check_lambda(lambda);
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    std::visit(
        [](const auto& policy) {
            if (!(policy.value > 0.0) || !std::isfinite(policy.value))
                throw Error(ErrorKind::InvalidArgument, "gamma policy value must be finite and > 0");
        },
        gamma);
}

SimilarityOperator::SimilarityOperator(Matrix values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols()) throw Error(ErrorKind::DimensionMismatch, "similarity operator must be square");
    const double asym = (values_ - values_.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= 1e-8)) throw Error(ErrorKind::NumericalFailure, "similarity operator is not symmetric");
}

Vector shrink_singular_values(std::span<const double> singular_values, double lambda) {
    check_lambda(lambda);
    Vector out(static_cast<Index>(singular_values.size()));
    for (std::size_t i = 0; i < singular_values.size(); ++i) {
        const double s = singular_values[i];
        if (!(s >= 0.0)) throw Error(ErrorKind::NegativeInput, "singular value " + std::to_string(i) + " is negative");
        out(static_cast<Index>(i)) = shrink_one(s, lambda);
    }
    return out;
}

Vector shrink_singular_values(const Vector& singular_values, double lambda) {
    return shrink_singular_values(std::span<const double>(singular_values.data(), static_cast<std::size_t>(singular_values.size())),
                                  lambda);
}

double gamma_for_target_std(const EmbeddingMatrix& pre_gamma, double target) {
    if (!(target > 0.0) || !std::isfinite(target)) throw Error(ErrorKind::InvalidArgument, "target std must be finite and > 0");
    const double current = global_std(pre_gamma);
    if (!(current > 0.0)) throw Error(ErrorKind::DegenerateScale, "embedding has zero spread; cannot rescale");
    return target / current;
}

double resolve_gamma(const EmbeddingMatrix& pre_gamma, const GammaPolicy& policy) {
    if (const auto* target = std::get_if<TargetStd>(&policy)) return gamma_for_target_std(pre_gamma, target->value);
    const double gamma = std::get<ExplicitGamma>(policy).value;
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorKind::InvalidArgument, "gamma must be finite and > 0");
    return gamma;
}

EmbeddingMatrix ace_embedding(const SvdFactors& factors, const AceConfig& config) {
    config.validate();
    if (config.k > factors.rank())
        throw Error(ErrorKind::RankExceeded,
                    "k = " + std::to_string(config.k) + " exceeds factor rank " + std::to_string(factors.rank()));

    const auto k = static_cast<Index>(config.k);
    const Vector g = shrink_singular_values(Vector(factors.S.head(k)), config.lambda);
    Matrix pre = factors.U.leftCols(k) * g.asDiagonal();

    if (std::holds_alternative<TargetStd>(config.gamma) && pre.isZero(0.0))
        throw Error(ErrorKind::DegenerateScale, "shrunk embedding is identically zero");
    EmbeddingMatrix unscaled(std::move(pre));
    const double gamma = resolve_gamma(unscaled, config.gamma);
    return gamma == 1.0 ? unscaled : unscaled.scaled(gamma);
}

EmbeddingMatrix ace_transform(const EmbeddingMatrix& e, const AceConfig& config, const SvdOptions& svd) {
    config.validate();
    const std::size_t full = std::min(e.rows(), e.cols());
    if (config.k > full)
        throw Error(ErrorKind::RankExceeded, "k = " + std::to_string(config.k) + " exceeds min(n, d) = " + std::to_string(full));

    const SvdFactors factors = config.use_centering ? truncated_svd(center(e), config.k, svd) : truncated_svd(e, config.k, svd);
    EmbeddingMatrix out = ace_embedding(factors, config);
    if (!e.item_ids()) return out;
    return EmbeddingMatrix(out.values(), e.item_ids());
}

EmbeddingMatrix whiten(const EmbeddingMatrix& e, std::size_t exact_limit) {
    const EmbeddingMatrix centered = center(e);
    const SvdFactors f = exact_svd(centered, exact_limit);
    const std::size_t rank = f.numerical_rank();
    if (rank == 0) throw Error(ErrorKind::DegenerateInput, "all rows are identical; nothing to whiten");
    Matrix out = std::sqrt(static_cast<double>(e.rows())) * f.U.leftCols(static_cast<Index>(rank));
    return EmbeddingMatrix(std::move(out), e.item_ids());
}

EmbeddingMatrix pca_project(const EmbeddingMatrix& e, std::size_t k, std::size_t exact_limit) {
    const EmbeddingMatrix centered = center(e);
    const SvdFactors f = exact_svd(centered, exact_limit);
    const std::size_t rank = f.numerical_rank();
    if (k < 1 || k > rank)
        throw Error(ErrorKind::InvalidRank, "k = " + std::to_string(k) + " outside [1, " + std::to_string(rank) + "] (centered rank)");
    Matrix out = centered.values() * f.V.leftCols(static_cast<Index>(k));
    return EmbeddingMatrix(std::move(out), e.item_ids());
}

SimilarityOperator ace_operator_spectral(const SvdFactors& factors, double lambda, std::size_t max_items) {
    check_lambda(lambda);
    if (factors.method != SvdMethod::exact)
        throw Error(ErrorKind::InvalidArgument, "the spectral operator needs exact factors");
    const auto n = static_cast<std::size_t>(factors.U.rows());
    if (n > max_items)
        throw Error(ErrorKind::TooLarge, std::to_string(n) + " items exceeds the dense operator limit " + std::to_string(max_items));

    Vector w(factors.S.size());
    for (Index i = 0; i < w.size(); ++i) w(i) = spectral_weight(factors.S(i), lambda);
    Matrix b = (factors.U * w.asDiagonal()) * factors.U.transpose();
    return SimilarityOperator(std::move(b));
}

SimilarityOperator ace_operator_closed_form(const EmbeddingMatrix& e, double lambda, std::size_t max_items) {
    check_lambda(lambda);
    if (lambda == 0.0)
        throw Error(ErrorKind::InvalidArgument, "closed form needs lambda > 0; use the spectral operator for lambda = 0");
    if (e.rows() > max_items)
        throw Error(ErrorKind::TooLarge,
                    std::to_string(e.rows()) + " items exceeds the dense operator limit " + std::to_string(max_items));

    const Matrix gram = e.values() * e.values().transpose();
    Matrix system = gram;
    system.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "E E^T + lambda I is not positive definite");
    Matrix b = llt.solve(gram);
    if (!b.allFinite()) throw Error(ErrorKind::SingularSystem, "solve produced non-finite entries");
    return SimilarityOperator(std::move(b));
}

Vector normalized_ace_spectrum(const Vector& singular_values, double lambda) {
    check_lambda(lambda);
    if (singular_values.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty spectrum");
    Vector w(singular_values.size());
    for (Index i = 0; i < w.size(); ++i) {
        if (!(singular_values(i) >= 0.0)) throw Error(ErrorKind::NegativeInput, "negative singular value");
        w(i) = spectral_weight(singular_values(i), lambda);
    }
    if (!(w(0) > 0.0)) throw Error(ErrorKind::DegenerateInput, "leading spectral weight is zero");
    return w / w(0);
}

}  // namespace ace
