#pragma once

// Test-only generators and brute-force oracles. Nothing here calls into the
// library's numerical paths.

#include "ace/matrix.hpp"

#include <unistd.h>

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace ace::test {

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    return m;
}

inline EmbeddingMatrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    return EmbeddingMatrix(gaussian_matrix(rows, cols, seed));
}

inline Matrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(rows, cols, seed));
    return qr.householderQ() * Matrix::Identity(rows, cols);
}

/// Matrix with prescribed singular values (n >= values.size() = d).
inline EmbeddingMatrix planted(Eigen::Index rows, const std::vector<double>& values, std::uint64_t seed) {
    const auto d = static_cast<Eigen::Index>(values.size());
    const Matrix u = random_orthonormal(rows, d, seed);
    const Matrix v = random_orthonormal(d, d, seed + 1);
    Vector s(d);
    for (Eigen::Index i = 0; i < d; ++i) s(i) = values[static_cast<std::size_t>(i)];
    return EmbeddingMatrix(u * s.asDiagonal() * v.transpose());
}

inline std::vector<double> power_law(std::size_t count, double alpha) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = std::pow(static_cast<double>(i + 1), -alpha);
    return out;
}

/// Singular values from Eigen's Jacobi SVD, a route independent of the library.
inline Vector reference_singular_values(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues();
}

inline double max_abs(const Matrix& m) {
    return m.cwiseAbs().maxCoeff();
}

inline double naive_cosine(const Matrix& m, Eigen::Index i, Eigen::Index j) {
    double dot = 0, a = 0, b = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        dot += m(i, c) * m(j, c);
        a += m(i, c) * m(i, c);
        b += m(j, c) * m(j, c);
    }
    return dot / std::sqrt(a * b);
}

inline Matrix pairwise_distances(const Matrix& m) {
    Matrix out(m.rows(), m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.rows(); ++j) out(i, j) = (m.row(i) - m.row(j)).norm();
    return out;
}

/// Centered covariance of the columns, double loop.
inline Matrix naive_covariance(const Matrix& m) {
    const auto n = m.rows();
    const auto d = m.cols();
    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) mean[static_cast<std::size_t>(j)] += m(i, j);
        mean[static_cast<std::size_t>(j)] /= static_cast<double>(n);
    }
    Matrix c = Matrix::Zero(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            double s = 0;
            for (Eigen::Index i = 0; i < n; ++i)
                s += (m(i, a) - mean[static_cast<std::size_t>(a)]) * (m(i, b) - mean[static_cast<std::size_t>(b)]);
            c(a, b) = s / static_cast<double>(n);
        }
    return c;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("ace-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace ace::test
