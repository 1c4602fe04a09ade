#include "ace/diagnostics.hpp"
#include "ace/error.hpp"
#include "ace/synth.hpp"
#include "ace/transforms.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace ace;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an ace::Error");
    return ErrorKind::InvalidArgument;
}

double brute_avg_cosine(const Matrix& m) {
    double sum = 0;
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.rows(); ++j) {
            sum += test::naive_cosine(m, i, j);
            ++count;
        }
    return sum / static_cast<double>(count);
}

// Brute-force Spearman: ranks by counting, then Pearson.
double brute_spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0, equal = 0;
            for (double x : v) {
                if (x < v[i]) less += 1;
                if (x == v[i]) equal += 1;
            }
            r[i] = less + (equal + 1) / 2;
        }
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

ClusteredSample clusters(std::uint64_t seed, std::size_t rows = 1000, std::size_t cols = 64) {
    SynthSpec spec;
    spec.rows = rows;
    spec.cols = cols;
    spec.seed = seed;
    spec.clusters = ClusterSpec{10, 10.0, 1.0};
    return synth_clustered(spec);
}

AceConfig ace_config(double lambda, std::size_t k, double gamma = 1.0) {
    AceConfig c;
    c.lambda = lambda;
    c.k = k;
    c.gamma = ExplicitGamma{gamma};
    return c;
}

}  // namespace

TEST_CASE("summarize_spectrum") {
    const auto flat = summarize_spectrum({1, 1, 1, 1});
    CHECK(flat.effective_rank == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(flat.spectral_flatness == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(flat.condition_number == 1.0);
    CHECK(flat.rank == 4);

    const auto spike = summarize_spectrum({5, 0, 0});
    CHECK(spike.effective_rank == 1.0);
    CHECK(spike.rank == 1);
    CHECK(spike.condition_number == 1.0);
    CHECK(spike.spectral_flatness == doctest::Approx(1.0 / 3.0));
    CHECK(spike.normalized == std::vector<double>{1, 0, 0});

    // entropy oracle for an uneven spectrum
    const std::vector<double> values{4, 2, 1, 1};
    double h = 0;
    for (double v : values) h -= v / 8 * std::log(v / 8);
    const auto uneven = summarize_spectrum(values);
    CHECK(uneven.effective_rank == doctest::Approx(std::exp(h)).epsilon(1e-12));
    CHECK(uneven.condition_number == 4.0);
    CHECK(uneven.normalized[1] == 0.5);

    CHECK(kind_of([] { summarize_spectrum({0, 0}); }) == ErrorKind::DegenerateInput);
}

TEST_CASE("spectrum_report") {
    SUBCASE("eigenvalues match the second-moment matrix") {
        const auto e = test::gaussian(40, 6, 3);
        const auto r = spectrum_report(e);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(e.values().transpose() * e.values() / 40.0);
        const Vector expected = eig.eigenvalues().reverse();
        REQUIRE(r.eigenvalues.size() == 6);
        for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(r.eigenvalues[i] - expected(static_cast<Eigen::Index>(i))) <= 1e-10);
        CHECK(r.rows == 40);
        CHECK(r.cols == 6);
        CHECK(!r.centered);
        CHECK(!r.avg_cosine);
    }
    SUBCASE("centered uses the covariance") {
        Matrix m = test::gaussian_matrix(40, 5, 4);
        m.rowwise() += Eigen::RowVectorXd::Constant(5, 10.0);
        SpectrumOptions opts;
        opts.centered = true;
        const auto r = spectrum_report(EmbeddingMatrix(m), opts);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(test::naive_covariance(m));
        const Vector expected = eig.eigenvalues().reverse();
        for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(r.eigenvalues[i] - expected(static_cast<Eigen::Index>(i))) <= 1e-9);
        CHECK(r.centered);
    }
    SUBCASE("rank-1 input") {
        const Matrix m = test::gaussian_matrix(20, 1, 1) * test::gaussian_matrix(1, 4, 2);
        const auto r = spectrum_report(EmbeddingMatrix(m));
        CHECK(r.rank == 1);
        CHECK(r.effective_rank == 1.0);
        CHECK(r.spectral_flatness == doctest::Approx(0.25));
    }
    SUBCASE("isotropic Gaussian") {
        SpectrumOptions opts;
        opts.with_cosine = true;
        const auto r = spectrum_report(test::gaussian(5000, 16, 1), opts);
        REQUIRE(r.avg_cosine);
        CHECK(std::abs(*r.avg_cosine) <= 0.02);
        CHECK(r.spectral_flatness >= 0.95);
    }
    SUBCASE("zero input") {
        CHECK(kind_of([] { spectrum_report(EmbeddingMatrix(Matrix::Zero(3, 3))); }) == ErrorKind::DegenerateInput);
    }
}

TEST_CASE("sample_pairs and sample_indices") {
    const auto all = sample_pairs(6, 100, 0);
    CHECK(all.size() == 15);
    CHECK(std::is_sorted(all.begin(), all.end()));
    CHECK(all.front() == std::pair<std::size_t, std::size_t>{0, 1});

    const auto some = sample_pairs(1000, 500, 9);
    CHECK(some.size() == 500);
    CHECK(std::is_sorted(some.begin(), some.end()));
    CHECK(std::adjacent_find(some.begin(), some.end()) == some.end());
    for (auto [i, j] : some) {
        CHECK(i < j);
        CHECK(j < 1000);
    }
    CHECK(sample_pairs(1000, 500, 9) == some);
    CHECK(sample_pairs(1000, 500, 10) != some);
    CHECK(kind_of([] { sample_pairs(1, 10, 0); }) == ErrorKind::InvalidArgument);

    const auto idx = sample_indices(50, 10, 3);
    CHECK(idx.size() == 10);
    CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 10);
    CHECK(std::is_sorted(idx.begin(), idx.end()));
    CHECK(sample_indices(5, 10, 3) == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("avg_pairwise_cosine") {
    SUBCASE("identical rows") {
        Matrix m(4, 3);
        m.rowwise() = Eigen::RowVector3d(1, 2, 3);
        CHECK(avg_pairwise_cosine(EmbeddingMatrix(m)) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("alternating signs") {
        Matrix m(4, 3);
        for (int i = 0; i < 4; ++i) m.row(i) = (i % 2 == 0 ? 1.0 : -1.0) * Eigen::RowVector3d(1, 2, 3);
        const double expected = brute_avg_cosine(m);
        CHECK(expected == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
        CHECK(avg_pairwise_cosine(EmbeddingMatrix(m)) == doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("matches brute force when exhaustive") {
        const auto e = test::gaussian(30, 5, 8);
        CHECK(avg_pairwise_cosine(e) == doctest::Approx(brute_avg_cosine(e.values())).epsilon(1e-12));
    }
    SUBCASE("sampled Gaussian") {
        CHECK(std::abs(avg_pairwise_cosine(test::gaussian(2000, 8, 2), 20000, 1)) <= 0.03);
    }
    SUBCASE("shared offset is detected") {
        Matrix m = test::gaussian_matrix(200, 8, 5);
        m.rowwise() += Eigen::RowVectorXd::Constant(8, 3.0);
        CHECK(avg_pairwise_cosine(EmbeddingMatrix(m)) > 0.8);
    }
    SUBCASE("zero row") {
        Matrix m = test::gaussian_matrix(5, 3, 1);
        m.row(2).setZero();
        CHECK(kind_of([&] { avg_pairwise_cosine(EmbeddingMatrix(m)); }) == ErrorKind::ZeroVector);
    }
}

TEST_CASE("spearman") {
    CHECK(average_ranks({10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));

    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> small(0, 5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(30), b(30);
        for (std::size_t i = 0; i < 30; ++i) {
            a[i] = small(rng);
            b[i] = small(rng) + 0.5 * a[i];
        }
        CHECK(spearman(a, b) == doctest::Approx(brute_spearman(a, b)).epsilon(1e-12));
    }
    CHECK(kind_of([] { spearman({1, 1, 1}, {1, 2, 3}); }) == ErrorKind::DegenerateInput);
    CHECK(kind_of([] { spearman({1, 2}, {1, 2, 3}); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("similarity_preservation") {
    const auto e = test::gaussian(60, 8, 1);
    CHECK(similarity_preservation(e, e) == doctest::Approx(1.0).epsilon(1e-12));

    const Matrix q = test::random_orthonormal(8, 8, 4);
    CHECK(similarity_preservation(e, EmbeddingMatrix(e.values() * q)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(similarity_preservation(e, e.scaled(0.2)) == doctest::Approx(1.0).epsilon(1e-12));

    const double unrelated = similarity_preservation(test::gaussian(300, 8, 2), test::gaussian(300, 8, 3), 20000, 5);
    CHECK(std::abs(unrelated) <= 0.1);

    CHECK(kind_of([&] { similarity_preservation(e, test::gaussian(59, 8, 1)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("cosine_neighbors") {
    Matrix m(4, 2);
    m << 1, 0, 0, 1, 1, 0, -1, 0;
    const Matrix unit = m.rowwise().normalized();
    CHECK(cosine_neighbors(unit, 0, 1) == std::vector<std::size_t>{2});
    // rows 0 and 2 tie from the viewpoint of row 1; the lower index wins
    CHECK(cosine_neighbors(unit, 1, 1) == std::vector<std::size_t>{0});
    CHECK(cosine_neighbors(unit, 1, 2) == std::vector<std::size_t>{0, 2});

    const auto e = test::gaussian(40, 5, 6);
    const Matrix u = e.values().rowwise().normalized();
    for (std::size_t query : {0u, 17u, 39u}) {
        std::vector<std::size_t> order;
        for (std::size_t j = 0; j < 40; ++j)
            if (j != query) order.push_back(j);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return test::naive_cosine(e.values(), static_cast<Eigen::Index>(query), static_cast<Eigen::Index>(a)) >
                   test::naive_cosine(e.values(), static_cast<Eigen::Index>(query), static_cast<Eigen::Index>(b));
        });
        auto got = cosine_neighbors(u, query, 5);
        std::sort(got.begin(), got.end());
        std::vector<std::size_t> want(order.begin(), order.begin() + 5);
        std::sort(want.begin(), want.end());
        CHECK(got == want);
    }
}

TEST_CASE("nn_overlap") {
    const auto e = test::gaussian(80, 6, 2);
    CHECK(nn_overlap(e, e, 5, 80) == 1.0);
    CHECK(nn_overlap(e, e.scaled(3.0), 5, 80) == 1.0);
    const double unrelated = nn_overlap(e, test::gaussian(80, 6, 3), 5, 80);
    CHECK(unrelated >= 0.0);
    CHECK(unrelated < 0.5);

    CHECK(kind_of([&] { nn_overlap(e, e, 0, 10); }) == ErrorKind::InvalidK);
    CHECK(kind_of([&] { nn_overlap(e, e, 80, 10); }) == ErrorKind::InvalidK);
    CHECK(kind_of([&] { nn_overlap(e, test::gaussian(79, 6, 1), 5, 10); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("top3_projection") {
    const auto e = test::gaussian(50, 7, 4);
    const auto p = top3_projection(e);
    const Vector sigma = test::reference_singular_values(e.values());
    CHECK(p.coords.rows() == 50);
    CHECK(p.coords.cols() == 3);
    for (Eigen::Index c = 0; c < 3; ++c) {
        CHECK(std::abs(p.singular_values[static_cast<std::size_t>(c)] - sigma(c)) <= 1e-10);
        // uncentered second moment of each coordinate is sigma^2 / n
        CHECK(p.coords.col(c).squaredNorm() / 50.0 == doctest::Approx(sigma(c) * sigma(c) / 50.0).epsilon(1e-10));
    }

    const Matrix rank3 = test::gaussian_matrix(30, 3, 1) * test::gaussian_matrix(3, 9, 2);
    const auto q = top3_projection(EmbeddingMatrix(rank3));
    CHECK(test::max_abs(test::pairwise_distances(q.coords) - test::pairwise_distances(rank3)) <= 1e-9);

    const Matrix rank2 = test::gaussian_matrix(30, 2, 1) * test::gaussian_matrix(2, 9, 2);
    CHECK(kind_of([&] { top3_projection(EmbeddingMatrix(rank2)); }) == ErrorKind::RankTooLow);
}

TEST_CASE("ACE diagnostics properties") {
    const auto e = test::planted(200, test::power_law(32, 1.0), 7);
    const auto f = exact_svd(e);

    SUBCASE("gamma does not change shape diagnostics") {
        SpectrumOptions opts;
        opts.with_cosine = true;
        const auto base = spectrum_report(ace_embedding(f, ace_config(0.5, 32, 1.0)), opts);
        for (double gamma : {0.1, 0.5}) {
            const auto r = spectrum_report(ace_embedding(f, ace_config(0.5, 32, gamma)), opts);
            for (std::size_t i = 0; i < 32; ++i) CHECK(std::abs(r.normalized[i] - base.normalized[i]) <= 1e-10);
            CHECK(std::abs(r.spectral_flatness - base.spectral_flatness) <= 1e-10);
            CHECK(std::abs(*r.avg_cosine - *base.avg_cosine) <= 1e-10);
        }
    }

    SUBCASE("lambda = 0 is isotropic") {
        const auto r = spectrum_report(ace_embedding(f, ace_config(0.0, 32)));
        for (double v : r.normalized) CHECK(std::abs(v - 1.0) <= 1e-8);
        CHECK(r.spectral_flatness == doctest::Approx(1.0).epsilon(1e-8));
    }

    SUBCASE("flatness falls and preservation rises along the lambda grid") {
        double flatness = 2.0;
        double preservation = -2.0;
        for (double lambda : default_lambda_grid) {
            const auto out = ace_embedding(f, ace_config(lambda * 1e-3, 32));
            const double flat = spectrum_report(out).spectral_flatness;
            const double pres = similarity_preservation(e, out, 5000, 1);
            CHECK(flat <= flatness + 1e-12);
            CHECK(pres >= preservation - 1e-3);
            flatness = flat;
            preservation = pres;
        }
    }
}

TEST_CASE("ACE keeps more neighbourhood structure than whitening") {
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
        const auto sample = clusters(seed, 400, 32);
        const auto& e = sample.embeddings;
        const auto f = exact_svd(e);
        std::vector<double> sq(static_cast<std::size_t>(f.S.size()));
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = f.S(static_cast<Eigen::Index>(i)) * f.S(static_cast<Eigen::Index>(i));
        std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(sq.size() / 2), sq.end());
        const double lambda = sq[sq.size() / 2];
        const auto ace = ace_embedding(f, ace_config(lambda, 32));
        const auto white = whiten(e);
        CHECK(nn_overlap(e, ace, 10, 400, seed) >= nn_overlap(e, white, 10, 400, seed));
    }
}
