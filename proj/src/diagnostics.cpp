#include "ace/diagnostics.hpp"

#include "ace/error.hpp"
#include "ace/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <unordered_set>

namespace ace {
namespace {

using Index = Eigen::Index;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double zero_norm = 1e-15;

// Floyd's algorithm: `count` distinct values from [0, population).
std::vector<std::uint64_t> floyd_sample(std::uint64_t population, std::uint64_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(count) * 2);
    for (std::uint64_t j = population - count; j < population; ++j) {
        std::uniform_int_distribution<std::uint64_t> pick(0, j);
        const std::uint64_t t = pick(rng);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> pair_cosines(const EmbeddingMatrix& e, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    const RowMatrix rows = e.values();
    const Vector norms = rows.rowwise().norm();

    std::vector<char> used(e.rows(), 0);
    for (const auto& [i, j] : pairs) used[i] = used[j] = 1;
    for (std::size_t i = 0; i < used.size(); ++i)
        if (used[i] && norms(static_cast<Index>(i)) < zero_norm)
            throw Error(ErrorKind::ZeroVector, "row " + std::to_string(i) + " has zero norm");

    std::vector<double> out(pairs.size());
    parallel_for(0, pairs.size(), [&](std::size_t p) {
        const auto i = static_cast<Index>(pairs[p].first);
        const auto j = static_cast<Index>(pairs[p].second);
        out[p] = rows.row(i).dot(rows.row(j)) / (norms(i) * norms(j));
    });
    return out;
}

Matrix unit_rows(const EmbeddingMatrix& e) {
    Matrix out = e.values();
    for (Index i = 0; i < out.rows(); ++i) {
        const double norm = out.row(i).norm();
        if (norm < zero_norm) throw Error(ErrorKind::ZeroVector, "row " + std::to_string(i) + " has zero norm");
        out.row(i) /= norm;
    }
    return out;
}

double jaccard(std::vector<std::size_t> a, std::vector<std::size_t> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::size_t> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    const std::size_t unite = a.size() + b.size() - common.size();
    return static_cast<double>(common.size()) / static_cast<double>(unite);
}

}  // namespace

SpectrumReport summarize_spectrum(std::vector<double> eigenvalues) {
    if (eigenvalues.empty()) throw Error(ErrorKind::DegenerateInput, "empty spectrum");
    double total = 0.0;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        const double v = eigenvalues[i];
        if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::InvalidArgument, "eigenvalues must be finite and >= 0");
        if (i > 0 && v > eigenvalues[i - 1]) throw Error(ErrorKind::InvalidArgument, "eigenvalues must be non-increasing");
        total += v;
    }
    if (!(total > 0.0)) throw Error(ErrorKind::DegenerateInput, "all eigenvalues are zero");

    SpectrumReport r;
    const double lead = eigenvalues.front();
    r.normalized.reserve(eigenvalues.size());
    double entropy = 0.0;
    double smallest = lead;
    for (const double v : eigenvalues) {
        r.normalized.push_back(v / lead);
        if (v > 0.0) {
            ++r.rank;
            smallest = v;
            const double p = v / total;
            entropy -= p * std::log(p);
        }
    }
    const auto dims = static_cast<double>(eigenvalues.size());
    r.effective_rank = std::clamp(std::exp(entropy), 1.0, static_cast<double>(r.rank));
    r.spectral_flatness = r.effective_rank / dims;
    r.condition_number = lead / smallest;
    r.eigenvalues = std::move(eigenvalues);
    return r;
}

SpectrumReport spectrum_report(const EmbeddingMatrix& e, const SpectrumOptions& options) {
    const SvdFactors f = options.centered ? exact_svd(center(e), options.exact_limit) : exact_svd(e, options.exact_limit);
    const double n = static_cast<double>(e.rows());
    std::vector<double> eig(static_cast<std::size_t>(f.S.size()));
    for (Index i = 0; i < f.S.size(); ++i) eig[static_cast<std::size_t>(i)] = f.S(i) * f.S(i) / n;

    SpectrumReport r = summarize_spectrum(std::move(eig));
    r.rows = e.rows();
    r.cols = e.cols();
    r.centered = options.centered;
    if (options.with_cosine) r.avg_cosine = avg_pairwise_cosine(e, options.max_pairs, options.seed);
    return r;
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t max_pairs, std::uint64_t seed) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "need at least two rows to form pairs");
    if (max_pairs < 1) throw Error(ErrorKind::InvalidArgument, "max_pairs must be >= 1");
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;

    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (total <= max_pairs) {
        out.reserve(static_cast<std::size_t>(total));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
        return out;
    }

    // unrank the sorted pair indices by sweeping rows: row i owns n-1-i pairs
    const auto ranks = floyd_sample(total, max_pairs, seed);
    out.reserve(ranks.size());
    std::size_t row = 0;
    std::uint64_t row_start = 0;
    for (const std::uint64_t r : ranks) {
        while (r >= row_start + (n - 1 - row)) {
            row_start += n - 1 - row;
            ++row;
        }
        out.emplace_back(row, row + 1 + static_cast<std::size_t>(r - row_start));
    }
    return out;
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> out;
    if (count >= n) {
        out.resize(n);
        std::iota(out.begin(), out.end(), std::size_t{0});
        return out;
    }
    for (const auto v : floyd_sample(n, count, seed)) out.push_back(static_cast<std::size_t>(v));
    return out;
}

double avg_pairwise_cosine(const EmbeddingMatrix& e, std::size_t max_pairs, std::uint64_t seed) {
    const auto pairs = sample_pairs(e.rows(), max_pairs, seed);
    const auto cosines = pair_cosines(e, pairs);
    double sum = 0.0;
    for (const double c : cosines) sum += c;
    return sum / static_cast<double>(cosines.size());
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(values.size());
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t stop = start + 1;
        while (stop < order.size() && values[order[stop]] == values[order[start]]) ++stop;
        // positions start..stop-1 hold ranks start+1..stop
        const double rank = 0.5 * static_cast<double>(start + 1 + stop);
        for (std::size_t p = start; p < stop; ++p) ranks[order[p]] = rank;
        start = stop;
    }
    return ranks;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "rank correlation needs equal-length inputs");
    if (a.size() < 2) throw Error(ErrorKind::InvalidArgument, "rank correlation needs at least two values");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double mean = 0.5 * static_cast<double>(a.size() + 1);

    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double x = ra[i] - mean;
        const double y = rb[i] - mean;
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    if (saa == 0.0 || sbb == 0.0) throw Error(ErrorKind::DegenerateInput, "rank correlation of a constant sequence");
    return sab / std::sqrt(saa * sbb);
}

double similarity_preservation(const EmbeddingMatrix& ref, const EmbeddingMatrix& other, std::size_t max_pairs, std::uint64_t seed) {
    if (ref.rows() != other.rows())
        throw Error(ErrorKind::DimensionMismatch,
                    "row counts differ: " + std::to_string(ref.rows()) + " vs " + std::to_string(other.rows()));
    if (ref.rows() < 3) throw Error(ErrorKind::InvalidArgument, "similarity preservation needs at least 3 rows");
    const auto pairs = sample_pairs(ref.rows(), max_pairs, seed);
    return spearman(pair_cosines(ref, pairs), pair_cosines(other, pairs));
}

std::vector<std::size_t> cosine_neighbors(const Matrix& unit_rows, std::size_t query, std::size_t k) {
    const auto n = static_cast<std::size_t>(unit_rows.rows());
    if (k < 1 || k >= n) throw Error(ErrorKind::InvalidK, "k_nn = " + std::to_string(k) + " must lie in [1, n)");
    const Vector sims = unit_rows * unit_rows.row(static_cast<Index>(query)).transpose();

    std::vector<std::size_t> candidates;
    candidates.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        if (i != query) candidates.push_back(i);
    auto closer = [&](std::size_t a, std::size_t b) {
        const double sa = sims(static_cast<Index>(a));
        const double sb = sims(static_cast<Index>(b));
        return sa > sb || (sa == sb && a < b);
    };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(), closer);
    candidates.resize(k);
    return candidates;
}

double nn_overlap(const EmbeddingMatrix& ref, const EmbeddingMatrix& other, std::size_t k_nn, std::size_t max_queries,
                  std::uint64_t seed) {
    if (ref.rows() != other.rows())
        throw Error(ErrorKind::DimensionMismatch,
                    "row counts differ: " + std::to_string(ref.rows()) + " vs " + std::to_string(other.rows()));
    const std::size_t n = ref.rows();
    if (k_nn < 1 || k_nn >= n) throw Error(ErrorKind::InvalidK, "k_nn = " + std::to_string(k_nn) + " must lie in [1, n)");
    if (max_queries < 1) throw Error(ErrorKind::InvalidArgument, "max_queries must be >= 1");

    const Matrix a = unit_rows(ref);
    const Matrix b = unit_rows(other);
    const auto queries = sample_indices(n, max_queries, seed);

    std::vector<double> overlap(queries.size());
    parallel_for(0, queries.size(), [&](std::size_t q) {
        overlap[q] = jaccard(cosine_neighbors(a, queries[q], k_nn), cosine_neighbors(b, queries[q], k_nn));
    });
    double sum = 0.0;
    for (const double v : overlap) sum += v;
    return sum / static_cast<double>(overlap.size());
}

Top3Projection top3_projection(const EmbeddingMatrix& e, std::size_t exact_limit) {
    const SvdFactors f = exact_svd(e, exact_limit);
    if (f.numerical_rank() < 3)
        throw Error(ErrorKind::RankTooLow, "rank " + std::to_string(f.numerical_rank()) + " is below 3");
    Top3Projection out;
    out.coords = f.U.leftCols(3) * f.S.head(3).asDiagonal();
    for (Index i = 0; i < 3; ++i) out.singular_values[static_cast<std::size_t>(i)] = f.S(i);
    return out;
}

}  // namespace ace
