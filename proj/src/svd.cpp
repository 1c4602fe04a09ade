#include "ace/svd.hpp"

#include "ace/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace ace {
namespace {

using Index = Eigen::Index;

// Two passes of classical Gram-Schmidt of v against the first `count` columns of q.
void orthogonalize_against(const Matrix& q, Index count, Eigen::Ref<Vector> v) {
    if (count == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
        const Vector coeffs = q.leftCols(count).transpose() * v;
        v -= q.leftCols(count) * coeffs;
    }
}

// Orthonormal basis with min(rows, cols) columns whose span contains range(a).
Matrix orthonormal_basis(const Matrix& a) {
    const Index width = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(a.rows(), width);
}

void canonicalize_signs(Matrix& u, Matrix& v) {
    for (Index c = 0; c < v.cols(); ++c) {
        Index best = 0;
        double best_abs = -1.0;
        for (Index r = 0; r < v.rows(); ++r) {
            const double a = std::abs(v(r, c));
            if (a > best_abs) {
                best_abs = a;
                best = r;
            }
        }
        if (v(best, c) < 0.0) {
            v.col(c) *= -1.0;
            u.col(c) *= -1.0;
        }
    }
}

// x is m x p with p <= m. Returns left factor (m x p), singular values and
// right factor (p x p) of x.
void gram_svd(const Matrix& x, Matrix& left, Vector& sigma, Matrix& right) {
    const Index m = x.rows();
    const Index p = x.cols();

    const Matrix gram = x.transpose() * x;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "symmetric eigensolver did not converge");

    // eigenvalues come back ascending
    const Matrix w = eig.eigenvectors().rowwise().reverse();
    const Matrix b = x * w;

    Vector norms(p);
    for (Index i = 0; i < p; ++i) norms(i) = b.col(i).norm();

    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index c) { return norms(a) > norms(c); });

    right.resize(p, p);
    sigma.resize(p);
    Matrix scaled(m, p);
    for (Index i = 0; i < p; ++i) {
        const Index src = order[static_cast<std::size_t>(i)];
        right.col(i) = w.col(src);
        sigma(i) = norms(src);
        scaled.col(i) = b.col(src);
    }

    const double sigma_max = p > 0 ? sigma(0) : 0.0;
    for (Index i = 0; i < p; ++i)
        if (!(sigma(i) > zero_singular_ratio * sigma_max)) sigma(i) = 0.0;

    left.setZero(m, p);
    Index filled = 0;
    for (; filled < p && sigma(filled) > 0.0; ++filled) {
        Vector col = scaled.col(filled) / sigma(filled);
        orthogonalize_against(left, filled, col);
        left.col(filled) = col / col.norm();
    }

    // complete the null directions from the canonical basis
    Index candidate = 0;
    while (filled < p) {
        if (candidate >= m) throw Error(ErrorKind::NumericalFailure, "could not complete orthonormal basis");
        Vector col = Vector::Unit(m, candidate++);
        orthogonalize_against(left, filled, col);
        const double residual = col.norm();
        const double floor = 0.5 * std::sqrt(static_cast<double>(m - filled) / static_cast<double>(m));
        if (residual < floor) continue;
        left.col(filled++) = col / residual;
    }
}

}  // namespace

std::size_t SvdFactors::numerical_rank() const noexcept {
    std::size_t count = 0;
    for (Index i = 0; i < S.size(); ++i)
        if (S(i) > 0.0) ++count;
    return count;
}

SvdFactors SvdFactors::truncated(std::size_t k) const {
    if (k < 1 || k > rank())
        throw Error(ErrorKind::InvalidRank, "cannot truncate rank " + std::to_string(rank()) + " factors to " + std::to_string(k));
    SvdFactors out = *this;
    const auto kk = static_cast<Index>(k);
    out.U = U.leftCols(kk);
    out.S = S.head(kk);
    out.V = V.leftCols(kk);
    return out;
}

SvdFactors exact_svd(const EmbeddingMatrix& e, std::size_t exact_limit) {
    return exact_svd(e.values(), exact_limit);
}

SvdFactors exact_svd(const Matrix& e, std::size_t exact_limit) {
    const auto n = static_cast<std::size_t>(e.rows());
    const auto d = static_cast<std::size_t>(e.cols());
    if (n == 0 || d == 0) throw Error(ErrorKind::InvalidArgument, "cannot factorize an empty matrix");
    const std::size_t r = std::min(n, d);
    if (r > exact_limit)
        throw Error(ErrorKind::DimensionTooLarge, "min(n, d) = " + std::to_string(r) + " exceeds the exact SVD limit " +
                                                      std::to_string(exact_limit) + "; use the randomized path");

    SvdFactors f;
    f.method = SvdMethod::exact;
    f.source_rows = n;
    f.source_cols = d;
    if (d <= n) {
        gram_svd(e, f.U, f.S, f.V);
    } else {
        const Matrix t = e.transpose();
        gram_svd(t, f.V, f.S, f.U);
    }
    canonicalize_signs(f.U, f.V);
    return f;
}

SvdFactors randomized_svd(const EmbeddingMatrix& e, std::size_t k, std::uint64_t seed, const RandomizedOptions& options) {
    const Matrix& a = e.values();
    const std::size_t n = e.rows();
    const std::size_t d = e.cols();
    const std::size_t full = std::min(n, d);
    if (k < 1 || k > full)
        throw Error(ErrorKind::InvalidRank, "k = " + std::to_string(k) + " outside [1, " + std::to_string(full) + "]");

    const auto width = static_cast<Index>(std::min(k + options.oversample, full));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix omega(a.cols(), width);
    for (Index j = 0; j < width; ++j)
        for (Index i = 0; i < omega.rows(); ++i) omega(i, j) = normal(rng);

    Matrix q = orthonormal_basis(a * omega);
    std::vector<Matrix> blocks{q};
    for (std::size_t it = 0; it < options.power_iters; ++it) {
        const Matrix z = orthonormal_basis(a.transpose() * q);
        q = orthonormal_basis(a * z);
        if (options.range_finder == RangeFinder::block_krylov) blocks.push_back(q);
    }

    Matrix basis;
    if (blocks.size() == 1) {
        basis = std::move(q);
    } else {
        Index total = 0;
        for (const auto& b : blocks) total += b.cols();
        Matrix krylov(a.rows(), total);
        Index offset = 0;
        for (const auto& b : blocks) {
            krylov.middleCols(offset, b.cols()) = b;
            offset += b.cols();
        }
        basis = orthonormal_basis(krylov);
    }

    const Matrix projected = basis.transpose() * a;
    SvdFactors small = exact_svd(projected, std::numeric_limits<std::size_t>::max());

    SvdFactors f;
    f.method = SvdMethod::randomized;
    f.seed = seed;
    f.source_rows = n;
    f.source_cols = d;
    const auto kk = static_cast<Index>(k);
    f.U = basis * small.U.leftCols(kk);
    f.S = small.S.head(kk);
    f.V = small.V.leftCols(kk);
    return f;
}

SvdFactors truncated_svd(const EmbeddingMatrix& e, std::size_t k, const SvdOptions& options) {
    const std::size_t full = std::min(e.rows(), e.cols());
    if (k < 1 || k > full)
        throw Error(ErrorKind::InvalidRank, "k = " + std::to_string(k) + " outside [1, " + std::to_string(full) + "]");
    if (full <= options.exact_limit) return exact_svd(e, options.exact_limit).truncated(k);
    return randomized_svd(e, k, options.seed, options.randomized);
}

double orthonormality_residual(const Matrix& q) {
    const Matrix gram = q.transpose() * q;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace ace
