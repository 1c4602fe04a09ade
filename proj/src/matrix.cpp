#include "ace/matrix.hpp"

#include "ace/error.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

namespace ace {

EmbeddingMatrix::EmbeddingMatrix(Matrix values, std::optional<std::vector<std::string>> item_ids)
    : values_(std::move(values)), item_ids_(std::move(item_ids)) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw Error(ErrorKind::InvalidArgument, "embedding matrix must have at least one row and one column");

    for (Eigen::Index j = 0; j < values_.cols(); ++j)
        for (Eigen::Index i = 0; i < values_.rows(); ++i)
            if (!std::isfinite(values_(i, j)))
                throw Error(ErrorKind::NonFiniteValue,
                            "entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is not finite");

    if (item_ids_) {
        if (item_ids_->size() != rows())
            throw Error(ErrorKind::DimensionMismatch, "got " + std::to_string(item_ids_->size()) + " item ids for " +
                                                          std::to_string(rows()) + " rows");
        std::unordered_set<std::string> seen;
        for (const auto& id : *item_ids_)
            if (!seen.insert(id).second) throw Error(ErrorKind::InvalidArgument, "duplicate item id '" + id + "'");
    }
}

EmbeddingMatrix EmbeddingMatrix::from_row_major(std::size_t rows, std::size_t cols, std::span<const double> data,
                                                std::optional<std::vector<std::string>> item_ids) {
    if (data.size() != rows * cols)
        throw Error(ErrorKind::DimensionMismatch,
                    "expected " + std::to_string(rows * cols) + " values, got " + std::to_string(data.size()));
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i * cols + j];
    return EmbeddingMatrix(std::move(m), std::move(item_ids));
}

std::vector<double> EmbeddingMatrix::row_major() const {
    std::vector<double> out;
    out.reserve(rows() * cols());
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
        for (Eigen::Index j = 0; j < values_.cols(); ++j) out.push_back(values_(i, j));
    return out;
}

EmbeddingMatrix EmbeddingMatrix::scaled(double factor) const {
    return EmbeddingMatrix(values_ * factor, item_ids_);
}

CovarianceMatrix::CovarianceMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols()) throw Error(ErrorKind::DimensionMismatch, "covariance must be square");
    const double scale = values_.cwiseAbs().maxCoeff();
    const double asym = (values_ - values_.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= 1e-10 * scale)) throw Error(ErrorKind::InvalidArgument, "covariance is not symmetric");
}

Vector column_mean(const EmbeddingMatrix& e) {
    return e.values().colwise().mean().transpose();
}

EmbeddingMatrix center(const EmbeddingMatrix& e) {
    const Vector mu = column_mean(e);
    Matrix centered = e.values().rowwise() - mu.transpose();
    return EmbeddingMatrix(std::move(centered), e.item_ids());
}

CovarianceMatrix covariance(const EmbeddingMatrix& e, bool centered) {
    const double n = static_cast<double>(e.rows());
    Matrix gram;
    if (centered) {
        const Matrix x = e.values().rowwise() - column_mean(e).transpose();
        gram = x.transpose() * x;
    } else {
        gram = e.values().transpose() * e.values();
    }
    gram /= n;
    // products are symmetric up to rounding; store the exact symmetric part
    Matrix sym = 0.5 * (gram + gram.transpose());
    return CovarianceMatrix(std::move(sym));
}

double global_std(const EmbeddingMatrix& e) {
    const double count = static_cast<double>(e.rows() * e.cols());
    const double mean = e.values().sum() / count;
    const double ss = (e.values().array() - mean).square().sum();
    return std::sqrt(ss / count);
}

}  // namespace ace
