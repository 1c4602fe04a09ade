#pragma once

#include "ace/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace ace {

/// sigma_i = i^(-alpha), i = 1..d
struct PowerLaw {
    double alpha = 0.0;
};

/// Exactly d non-increasing, non-negative singular values.
struct ExplicitSpectrum {
    std::vector<double> values;
};

using SpectrumShape = std::variant<PowerLaw, ExplicitSpectrum>;

struct ClusterSpec {
    std::size_t count = 2;
    double spread = 1.0;  // centroid radius
    double noise = 0.0;   // per-coordinate noise std
};

struct SynthSpec {
    std::size_t rows = 0;
    std::size_t cols = 0;
    SpectrumShape spectrum = PowerLaw{};
    std::optional<ClusterSpec> clusters;
    std::uint64_t seed = 0;
};

/// Fast-decaying preset meant to resemble LLM encoder output:
/// alpha = 1.2, n = 2000, d = 256.
SynthSpec llm_like_preset(std::uint64_t seed);

/// Target singular values for spec.spectrum (length spec.cols).
std::vector<double> target_singular_values(const SynthSpec& spec);

/// E = G diag(sigma) Q^T with G orthonormalized Gaussian (n x d) and Q a
/// random orthogonal d x d basis. Throws InvalidSpec.
EmbeddingMatrix synth_power_spectrum(const SynthSpec& spec);

struct ClusteredSample {
    EmbeddingMatrix embeddings;
    std::vector<std::size_t> labels;
};

/// Centroids drawn uniformly on the sphere of radius spread; row i belongs to
/// cluster i mod count and adds N(0, noise^2 I) to its centroid. The spectrum
/// field is ignored. Throws InvalidSpec.
ClusteredSample synth_clustered(const SynthSpec& spec);

}  // namespace ace
