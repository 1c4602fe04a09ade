#include "ace/synth.hpp"

#include "ace/error.hpp"

#include <Eigen/QR>

#include <cmath>
#include <random>
#include <string>

namespace ace {
namespace {

using Index = Eigen::Index;

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

Matrix orthonormal_columns(const Matrix& a) {
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace

SynthSpec llm_like_preset(std::uint64_t seed) {
    SynthSpec spec;
    spec.rows = 2000;
    spec.cols = 256;
    spec.spectrum = PowerLaw{1.2};
    spec.seed = seed;
    return spec;
}

std::vector<double> target_singular_values(const SynthSpec& spec) {
    if (spec.cols < 1) throw Error(ErrorKind::InvalidSpec, "d must be >= 1");
    if (const auto* law = std::get_if<PowerLaw>(&spec.spectrum)) {
        if (!(law->alpha >= 0.0) || !std::isfinite(law->alpha))
            throw Error(ErrorKind::InvalidSpec, "power-law exponent must be finite and >= 0");
        std::vector<double> out(spec.cols);
        for (std::size_t i = 0; i < spec.cols; ++i) out[i] = std::pow(static_cast<double>(i + 1), -law->alpha);
        return out;
    }
    const auto& values = std::get<ExplicitSpectrum>(spec.spectrum).values;
    if (values.size() != spec.cols)
        throw Error(ErrorKind::InvalidSpec,
                    "explicit spectrum has " + std::to_string(values.size()) + " values for d = " + std::to_string(spec.cols));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0)
            throw Error(ErrorKind::InvalidSpec, "explicit spectrum values must be finite and >= 0");
        if (i > 0 && values[i] > values[i - 1]) throw Error(ErrorKind::InvalidSpec, "explicit spectrum must be non-increasing");
    }
    return values;
}

EmbeddingMatrix synth_power_spectrum(const SynthSpec& spec) {
    if (spec.clusters) throw Error(ErrorKind::InvalidSpec, "spectrum generation does not take clusters");
    if (spec.cols < 1 || spec.rows < spec.cols)
        throw Error(ErrorKind::InvalidSpec, "spectrum generation needs n >= d >= 1");
    const auto sigma = target_singular_values(spec);

    std::mt19937_64 rng(spec.seed);
    const auto n = static_cast<Index>(spec.rows);
    const auto d = static_cast<Index>(spec.cols);
    const Matrix left = orthonormal_columns(gaussian(n, d, rng));
    const Matrix basis = orthonormal_columns(gaussian(d, d, rng));
    const Eigen::Map<const Vector> s(sigma.data(), d);
    return EmbeddingMatrix(left * s.asDiagonal() * basis.transpose());
}

ClusteredSample synth_clustered(const SynthSpec& spec) {
    if (!spec.clusters) throw Error(ErrorKind::InvalidSpec, "cluster parameters are required");
    const ClusterSpec& c = *spec.clusters;
    if (spec.rows < 1 || spec.cols < 1) throw Error(ErrorKind::InvalidSpec, "n and d must be >= 1");
    if (c.count < 2 || c.count > spec.rows) throw Error(ErrorKind::InvalidSpec, "cluster count must lie in [2, n]");
    if (!(c.spread >= 0.0) || !std::isfinite(c.spread) || !(c.noise >= 0.0) || !std::isfinite(c.noise))
        throw Error(ErrorKind::InvalidSpec, "spread and noise must be finite and >= 0");

    std::mt19937_64 rng(spec.seed);
    const auto d = static_cast<Index>(spec.cols);
    Matrix centroids = gaussian(static_cast<Index>(c.count), d, rng);
    for (Index i = 0; i < centroids.rows(); ++i) {
        const double norm = centroids.row(i).norm();
        centroids.row(i) *= norm > 0.0 ? c.spread / norm : 0.0;
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix rows(static_cast<Index>(spec.rows), d);
    std::vector<std::size_t> labels(spec.rows);
    for (std::size_t i = 0; i < spec.rows; ++i) {
        labels[i] = i % c.count;
        for (Index j = 0; j < d; ++j)
            rows(static_cast<Index>(i), j) = centroids(static_cast<Index>(labels[i]), j) + c.noise * normal(rng);
    }
    return {EmbeddingMatrix(std::move(rows)), std::move(labels)};
}

}  // namespace ace
