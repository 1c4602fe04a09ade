#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense n x d matrix of item embeddings, one row per item.
///
/// Immutable after construction. Construction rejects empty shapes, any
/// NaN/Inf entry, and item id lists that are the wrong length or contain
/// duplicates.
class EmbeddingMatrix {
public:
    explicit EmbeddingMatrix(Matrix values, std::optional<std::vector<std::string>> item_ids = std::nullopt);

    /// Builds from a row-major buffer of exactly rows * cols values.
    static EmbeddingMatrix from_row_major(std::size_t rows, std::size_t cols, std::span<const double> data,
                                          std::optional<std::vector<std::string>> item_ids = std::nullopt);

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }

    const Matrix& values() const noexcept { return values_; }
    double operator()(std::size_t i, std::size_t j) const { return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }

    const std::optional<std::vector<std::string>>& item_ids() const noexcept { return item_ids_; }

    /// Copy of the entries in row-major order.
    std::vector<double> row_major() const;

    /// Same ids, entries multiplied by factor.
    EmbeddingMatrix scaled(double factor) const;

private:
    Matrix values_;
    std::optional<std::vector<std::string>> item_ids_;
};

/// Symmetric positive semi-definite d x d matrix.
class CovarianceMatrix {
public:
    /// Rejects non-square or asymmetric input (1e-10 relative to the largest entry).
    explicit CovarianceMatrix(Matrix values);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    const Matrix& values() const noexcept { return values_; }
    double trace() const { return values_.trace(); }

private:
    Matrix values_;
};

Vector column_mean(const EmbeddingMatrix& e);

/// E - 1 mu^T. Item ids carry over.
EmbeddingMatrix center(const EmbeddingMatrix& e);

/// (1/n)(E - mu)^T (E - mu) when centered, (1/n) E^T E otherwise.
CovarianceMatrix covariance(const EmbeddingMatrix& e, bool centered);

/// Population standard deviation of all n*d entries pooled together.
double global_std(const EmbeddingMatrix& e);

}  // namespace ace
