#include "ace/cli.hpp"

#include "ace/diagnostics.hpp"
#include "ace/io.hpp"
#include "ace/report.hpp"
#include "ace/synth.hpp"
#include "ace/transforms.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

namespace ace::cli {
namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

io::DType parse_dtype(const std::string& name) {
    return name == "f32" ? io::DType::f32 : io::DType::f64;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        const char* first = item.data();
        const char* last = item.data() + item.size();
        while (first < last && *first == ' ') ++first;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) throw UsageError("--spectrum: '" + item + "' is not a number");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("--spectrum needs at least one value");
    return out;
}

void write_report(const report::Report& r, const std::string& path) {
    io::write_file_atomic(path, report::render(report::to_json(r)));
}

// Options shared by report-producing commands.
struct SpectrumFlags {
    bool centered = false;
    bool cosine = false;
    std::size_t pairs = default_max_pairs;
    std::uint64_t seed = 0;
    std::size_t exact_limit = default_exact_limit;

    SpectrumOptions options() const { return {centered, cosine, seed, pairs, exact_limit}; }
};

struct DiagnoseArgs {
    std::string input;
    std::string output;
    SpectrumFlags spectrum;
};

struct TransformArgs {
    std::string input;
    std::string method;
    std::optional<double> lambda;
    std::size_t k = 128;
    std::optional<double> target_std;
    std::optional<double> gamma;
    bool centered = false;
    std::string output;
    std::string report;
    std::string dtype = "f64";
    std::uint64_t seed = 0;
    std::size_t exact_limit = default_exact_limit;
    bool cosine = false;
    CLI::Option* k_option = nullptr;
};

struct CompareArgs {
    std::string ref;
    std::string other;
    std::size_t pairs = default_max_pairs;
    std::size_t knn = 10;
    std::size_t queries = 1000;
    std::uint64_t seed = 0;
    std::string output;
    std::size_t exact_limit = default_exact_limit;
};

struct SynthArgs {
    std::optional<std::size_t> n;
    std::optional<std::size_t> d;
    std::optional<double> alpha;
    std::optional<std::string> spectrum;
    std::optional<std::size_t> clusters;
    double spread = 1.0;
    double noise = 0.0;
    std::string preset;
    std::uint64_t seed = 0;
    std::string output;
    std::string labels;
    std::string dtype = "f64";
};

struct CheckArgs {
    std::size_t n = 0;
    std::size_t d = 0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
};

constexpr double operator_tolerance = 1e-8;

void add_exact_limit(CLI::App* cmd, std::size_t& target) {
    cmd->add_option("--exact-limit", target, "Largest min(n, d) factorized exactly")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

int run_diagnose(const DiagnoseArgs& a) {
    const EmbeddingMatrix e = io::read_embeddings(a.input);
    report::Report r;
    r.source = {a.input, e.rows(), e.cols()};
    r.spectrum = spectrum_report(e, a.spectrum.options());
    r.seed = a.spectrum.seed;
    write_report(r, a.output);
    return exit_success;
}

int run_transform(const TransformArgs& a) {
    const bool is_ace = a.method == "ace";
    if (is_ace && !a.lambda) throw UsageError("--method ace requires an explicit --lambda (grid: 0 1 5 10 50 100 500 1000 5000)");
    if (!is_ace && a.lambda) throw UsageError("--lambda only applies to --method ace");
    if (a.method == "whiten" && a.k_option->count() > 0) throw UsageError("--k does not apply to --method whiten");

    GammaPolicy policy = ExplicitGamma{1.0};
    if (a.target_std) policy = TargetStd{*a.target_std};
    if (a.gamma) policy = ExplicitGamma{*a.gamma};

    const EmbeddingMatrix e = io::read_embeddings(a.input);
    report::TransformInfo info;
    info.method = a.method;

    EmbeddingMatrix pre = [&] {
        if (is_ace) {
            AceConfig cfg;
            cfg.lambda = *a.lambda;
            cfg.k = a.k;
            cfg.use_centering = a.centered;
            SvdOptions svd;
            svd.exact_limit = a.exact_limit;
            svd.seed = a.seed;
            info.lambda = cfg.lambda;
            info.k = cfg.k;
            info.centering = cfg.use_centering;
            return ace_transform(e, cfg, svd);
        }
        info.centering = true;
        if (a.method == "whiten") return whiten(e, a.exact_limit);
        info.k = a.k;
        return pca_project(e, a.k, a.exact_limit);
    }();

    const double gamma = resolve_gamma(pre, policy);
    info.gamma = gamma;
    const EmbeddingMatrix out = gamma == 1.0 ? pre : pre.scaled(gamma);
    io::write_embeddings(out, a.output, io::format_for_path(a.output), parse_dtype(a.dtype));

    if (!a.report.empty()) {
        report::Report r;
        r.source = {a.input, e.rows(), e.cols()};
        r.transform = info;
        SpectrumOptions opts;
        opts.with_cosine = a.cosine;
        opts.seed = a.seed;
        opts.exact_limit = a.exact_limit;
        r.spectrum = spectrum_report(out, opts);
        r.seed = a.seed;
        write_report(r, a.report);
    }
    return exit_success;
}

int run_compare(const CompareArgs& a) {
    const EmbeddingMatrix ref = io::read_embeddings(a.ref);
    const EmbeddingMatrix other = io::read_embeddings(a.other);
    if (ref.rows() != other.rows())
        throw Error(ErrorKind::DimensionMismatch,
                    "--ref has " + std::to_string(ref.rows()) + " rows, --new has " + std::to_string(other.rows()));

    report::Report r;
    r.source = {a.ref, ref.rows(), ref.cols()};
    r.compared = report::SourceInfo{a.other, other.rows(), other.cols()};
    SpectrumOptions opts;
    opts.with_cosine = true;
    opts.seed = a.seed;
    opts.max_pairs = a.pairs;
    opts.exact_limit = a.exact_limit;
    r.spectrum = spectrum_report(other, opts);
    r.similarity_preservation = similarity_preservation(ref, other, a.pairs, a.seed);
    r.nn_overlap = nn_overlap(ref, other, a.knn, a.queries, a.seed);
    r.seed = a.seed;
    write_report(r, a.output);
    return exit_success;
}

int run_synth(const SynthArgs& a) {
    SynthSpec spec;
    if (!a.preset.empty()) spec = llm_like_preset(a.seed);
    if (a.n) spec.rows = *a.n;
    if (a.d) spec.cols = *a.d;
    spec.seed = a.seed;
    if (spec.rows == 0 || spec.cols == 0) throw UsageError("synth needs --n and --d (or --preset)");
    if (a.alpha && a.spectrum) throw UsageError("--alpha and --spectrum are mutually exclusive");
    if (a.alpha) spec.spectrum = PowerLaw{*a.alpha};
    if (a.spectrum) spec.spectrum = ExplicitSpectrum{parse_number_list(*a.spectrum)};

    const auto dtype = parse_dtype(a.dtype);
    if (a.clusters) {
        spec.clusters = ClusterSpec{*a.clusters, a.spread, a.noise};
        const ClusteredSample sample = synth_clustered(spec);
        io::write_embeddings(sample.embeddings, a.output, io::format_for_path(a.output), dtype);
        if (!a.labels.empty()) {
            std::string text = "label\n";
            for (auto l : sample.labels) text += std::to_string(l) + '\n';
            io::write_file_atomic(a.labels, text);
        }
        return exit_success;
    }
    if (!a.labels.empty()) throw UsageError("--labels needs --clusters");
    if (!a.alpha && !a.spectrum && a.preset.empty()) throw UsageError("synth needs --alpha or --spectrum");
    io::write_embeddings(synth_power_spectrum(spec), a.output, io::format_for_path(a.output), dtype);
    return exit_success;
}

int run_check_operator(const CheckArgs& a, std::ostream& out) {
    std::mt19937_64 rng(a.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(static_cast<Eigen::Index>(a.n), static_cast<Eigen::Index>(a.d));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = normal(rng);
    const EmbeddingMatrix e(std::move(m));

    const SimilarityOperator spectral = ace_operator_spectral(exact_svd(e), a.lambda);
    const SimilarityOperator closed = ace_operator_closed_form(e, a.lambda);
    const double deviation = (spectral.values() - closed.values()).cwiseAbs().maxCoeff();
    out << "max_abs_deviation " << format_double(deviation) << '\n';
    return deviation <= operator_tolerance ? exit_success : exit_numerical;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DegenerateScale:
        case ErrorKind::SingularSystem:
        case ErrorKind::NumericalFailure:
            return exit_numerical;
        default:
            return exit_data;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral shrinkage, whitening and PCA for embedding matrices, with anisotropy diagnostics."};
    app.name("ace");
    app.require_subcommand(1);

    DiagnoseArgs diag;
    auto* diagnose = app.add_subcommand("diagnose", "Eigenvalue spectrum and anisotropy report of an embedding file");
    diagnose->add_option("--input", diag.input, "Embedding file (EMB1 or CSV)")->required();
    diagnose->add_flag("--centered", diag.spectrum.centered, "Use the covariance instead of E^T E / n");
    diagnose->add_flag("--cosine", diag.spectrum.cosine, "Also report the mean pairwise cosine");
    diagnose->add_option("--pairs", diag.spectrum.pairs, "Row pairs sampled for the cosine")->check(CLI::PositiveNumber);
    diagnose->add_option("--seed", diag.spectrum.seed, "Sampling seed");
    diagnose->add_option("--output", diag.output, "Report JSON path")->required();
    add_exact_limit(diagnose, diag.spectrum.exact_limit);

    TransformArgs tr;
    auto* transform = app.add_subcommand("transform", "Reshape embeddings with ace, whiten or pca");
    transform->add_option("--input", tr.input, "Embedding file (EMB1 or CSV)")->required();
    transform->add_option("--method", tr.method, "ace | whiten | pca")->required()->check(CLI::IsMember({"ace", "whiten", "pca"}));
    transform->add_option("--lambda", tr.lambda, "Regularization weight (ace only, required)")->check(CLI::NonNegativeNumber);
    tr.k_option = transform->add_option("--k", tr.k, "Output dimension (ace, pca)")->check(CLI::PositiveNumber)->capture_default_str();
    auto* target = transform->add_option("--target-std", tr.target_std, "Rescale output to this pooled std")->check(CLI::PositiveNumber);
    auto* gamma = transform->add_option("--gamma", tr.gamma, "Multiply output by this factor")->check(CLI::PositiveNumber);
    target->excludes(gamma);
    transform->add_flag("--centered", tr.centered, "Run ace on the mean-centered matrix");
    transform->add_option("--output", tr.output, "Output embedding path (.csv for CSV, otherwise EMB1)")->required();
    transform->add_option("--report", tr.report, "Also write a report JSON for the output");
    transform->add_flag("--cosine", tr.cosine, "Include the mean pairwise cosine in --report");
    transform->add_option("--dtype", tr.dtype, "Output precision")->check(CLI::IsMember({"f32", "f64"}))->capture_default_str();
    transform->add_option("--seed", tr.seed, "Seed for the randomized SVD and sampling");
    add_exact_limit(transform, tr.exact_limit);

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "Similarity-structure preservation between two embeddings of the same items");
    compare->add_option("--ref", cmp.ref, "Reference embedding file")->required();
    compare->add_option("--new", cmp.other, "Transformed embedding file")->required();
    compare->add_option("--pairs", cmp.pairs, "Row pairs sampled for the rank correlation")->check(CLI::PositiveNumber)->capture_default_str();
    compare->add_option("--knn", cmp.knn, "Neighbors per query for the overlap")->check(CLI::PositiveNumber)->capture_default_str();
    compare->add_option("--queries", cmp.queries, "Query rows sampled for the overlap")->check(CLI::PositiveNumber)->capture_default_str();
    compare->add_option("--seed", cmp.seed, "Sampling seed");
    compare->add_option("--output", cmp.output, "Report JSON path")->required();
    add_exact_limit(compare, cmp.exact_limit);

    SynthArgs syn;
    auto* synth = app.add_subcommand("synth", "Generate synthetic embeddings with a planted spectrum or clusters");
    synth->add_option("--n", syn.n, "Rows")->check(CLI::PositiveNumber);
    synth->add_option("--d", syn.d, "Columns")->check(CLI::PositiveNumber);
    auto* alpha = synth->add_option("--alpha", syn.alpha, "Power-law exponent, sigma_i = i^-alpha")->check(CLI::NonNegativeNumber);
    auto* spectrum = synth->add_option("--spectrum", syn.spectrum, "Comma-separated singular values (length d)");
    alpha->excludes(spectrum);
    synth->add_option("--clusters", syn.clusters, "Number of planted clusters")->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    synth->add_option("--spread", syn.spread, "Centroid radius")->check(CLI::NonNegativeNumber)->capture_default_str();
    synth->add_option("--noise", syn.noise, "Per-coordinate noise std")->check(CLI::NonNegativeNumber)->capture_default_str();
    synth->add_option("--preset", syn.preset, "Named preset")->check(CLI::IsMember({"llm-like"}));
    synth->add_option("--seed", syn.seed, "Generator seed")->required();
    synth->add_option("--output", syn.output, "Output embedding path")->required();
    synth->add_option("--labels", syn.labels, "Write cluster labels here (with --clusters)");
    synth->add_option("--dtype", syn.dtype, "Output precision")->check(CLI::IsMember({"f32", "f64"}))->capture_default_str();

    CheckArgs chk;
    auto* check = app.add_subcommand("check-operator", "Compare the closed-form and spectral item-item operators on random data");
    check->add_option("--n", chk.n, "Items")->required()->check(CLI::PositiveNumber);
    check->add_option("--d", chk.d, "Dimensions")->required()->check(CLI::PositiveNumber);
    check->add_option("--lambda", chk.lambda, "Regularization weight, > 0")->required()->check(CLI::PositiveNumber);
    check->add_option("--seed", chk.seed, "Generator seed")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return exit_success;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return exit_success;
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return exit_usage;
    }

    try {
        if (diagnose->parsed()) return run_diagnose(diag);
        if (transform->parsed()) return run_transform(tr);
        if (compare->parsed()) return run_compare(cmp);
        if (synth->parsed()) return run_synth(syn);
        if (check->parsed()) return run_check_operator(chk, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_usage;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace ace::cli
