#include "ace/report.hpp"

#include "ace/error.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace ace::report {
namespace {

using json = nlohmann::ordered_json;

json source_json(const SourceInfo& s) {
    return json{{"path", s.path}, {"n", s.rows}, {"d", s.cols}};
}

SourceInfo source_from(const json& j) {
    return {j.at("path").get<std::string>(), j.at("n").get<std::size_t>(), j.at("d").get<std::size_t>()};
}

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

std::string render_double(double v) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, "report contains a non-finite number");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    if (ec != std::errc{}) throw Error(ErrorKind::IoFailure, "number formatting failed");
    return std::string(buf, ptr);
}

void render_into(const json& j, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + json(key).dump() + ": ";
                render_into(value, depth + 1, out);
            }
            out += "\n" + close + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i > 0) out += ",\n";
                out += pad;
                render_into(j[i], depth + 1, out);
            }
            out += "\n" + close + "]";
            return;
        }
        case json::value_t::number_float:
            out += render_double(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

}  // namespace

json to_json(const Report& r) {
    json spectrum{
        {"n", r.spectrum.rows},
        {"d", r.spectrum.cols},
        {"centered", r.spectrum.centered},
        {"eigenvalues", r.spectrum.eigenvalues},
        {"normalized", r.spectrum.normalized},
        {"rank", r.spectrum.rank},
        {"spectral_flatness", r.spectrum.spectral_flatness},
        {"effective_rank", r.spectrum.effective_rank},
        {"condition_number", r.spectrum.condition_number},
    };

    json out;
    out["schema_version"] = schema_version;
    out["source"] = source_json(r.source);
    if (r.compared) out["compared"] = source_json(*r.compared);
    out["transform"] = json{
        {"method", r.transform.method},
        {"lambda", optional_json(r.transform.lambda)},
        {"k", optional_json(r.transform.k)},
        {"gamma", optional_json(r.transform.gamma)},
        {"centering", r.transform.centering},
    };
    out["spectrum"] = std::move(spectrum);
    if (r.spectrum.avg_cosine) out["avg_cosine"] = *r.spectrum.avg_cosine;
    if (r.similarity_preservation) out["similarity_preservation"] = *r.similarity_preservation;
    if (r.nn_overlap) out["nn_overlap"] = *r.nn_overlap;
    out["seed"] = r.seed;
    return out;
}

Report from_json(const json& j) {
    try {
        if (j.at("schema_version").get<int>() != schema_version)
            throw Error(ErrorKind::ParseError, "unsupported report schema version");
        Report r;
        r.source = source_from(j.at("source"));
        if (j.contains("compared")) r.compared = source_from(j.at("compared"));

        const json& t = j.at("transform");
        r.transform.method = t.at("method").get<std::string>();
        r.transform.lambda = optional_from<double>(t, "lambda");
        r.transform.k = optional_from<std::size_t>(t, "k");
        r.transform.gamma = optional_from<double>(t, "gamma");
        r.transform.centering = t.at("centering").get<bool>();

        const json& s = j.at("spectrum");
        r.spectrum.rows = s.at("n").get<std::size_t>();
        r.spectrum.cols = s.at("d").get<std::size_t>();
        r.spectrum.centered = s.at("centered").get<bool>();
        r.spectrum.eigenvalues = s.at("eigenvalues").get<std::vector<double>>();
        r.spectrum.normalized = s.at("normalized").get<std::vector<double>>();
        r.spectrum.rank = s.at("rank").get<std::size_t>();
        r.spectrum.spectral_flatness = s.at("spectral_flatness").get<double>();
        r.spectrum.effective_rank = s.at("effective_rank").get<double>();
        r.spectrum.condition_number = s.at("condition_number").get<double>();
        r.spectrum.avg_cosine = optional_from<double>(j, "avg_cosine");

        r.similarity_preservation = optional_from<double>(j, "similarity_preservation");
        r.nn_overlap = optional_from<double>(j, "nn_overlap");
        r.seed = j.at("seed").get<std::uint64_t>();
        return r;
    } catch (const json::exception& ex) {
        throw Error(ErrorKind::ParseError, std::string("malformed report: ") + ex.what());
    }
}

std::string render(const json& j) {
    std::string out;
    render_into(j, 0, out);
    out += '\n';
    return out;
}

}  // namespace ace::report
