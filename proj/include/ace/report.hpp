#pragma once

#include "ace/diagnostics.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace ace::report {

inline constexpr int schema_version = 1;

struct SourceInfo {
    std::string path;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

struct TransformInfo {
    std::string method = "none";  // none | ace | whiten | pca
    std::optional<double> lambda;
    std::optional<std::size_t> k;
    std::optional<double> gamma;
    bool centering = false;
};

struct Report {
    SourceInfo source;
    std::optional<SourceInfo> compared;
    TransformInfo transform;
    SpectrumReport spectrum;
    std::optional<double> similarity_preservation;
    std::optional<double> nn_overlap;
    std::uint64_t seed = 0;
};

nlohmann::ordered_json to_json(const Report& report);
/// Throws ParseError on missing fields or a schema version mismatch.
Report from_json(const nlohmann::ordered_json& j);

/// Pretty-printed JSON with every floating-point number written at 17
/// significant digits. Throws NonFiniteValue on NaN/Inf.
std::string render(const nlohmann::ordered_json& j);

}  // namespace ace::report
