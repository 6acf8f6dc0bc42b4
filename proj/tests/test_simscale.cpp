#include "support.hpp"

#include "ctpath/simscale.hpp"
#include "ctpath/stats.hpp"
#include "ctpath/svd.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace ctpath;
using ctpath::testing::comment;

namespace {

double pmi_entry(const PmiMatrix& p, const std::string& a, const std::string& b)
{
    auto idx = [&](const std::string& c) {
        return static_cast<Index>(std::find(p.communities.begin(), p.communities.end(), c) - p.communities.begin());
    };
    return p.values.coeff(idx(a), idx(b));
}

}  // namespace

TEST_CASE("ppmi fixtures")
{
    SECTION("ln 2")
    {
        const std::vector<std::set<std::string>> users{{"A", "B"}, {"A", "B"}, {"C"}, {"C"}};
        const auto p = compute_pmi(cooccurrence(users));
        CHECK(pmi_entry(p, "A", "B") == std::log(2.0));
        CHECK(pmi_entry(p, "B", "A") == std::log(2.0));
        CHECK(pmi_entry(p, "A", "C") == 0.0);
    }
    SECTION("negative association clips to zero")
    {
        const std::vector<std::set<std::string>> users{{"A", "B"}, {"A"}, {"B"}, {"A", "B", "C"}};
        const auto p = compute_pmi(cooccurrence(users));
        CHECK(std::log((2.0 / 4.0) / (0.75 * 0.75)) < 0.0);
        CHECK(pmi_entry(p, "A", "B") == 0.0);
    }
    SECTION("independence gives zero")
    {
        // p(A) = p(B) = 1/2, p(A, B) = 1/4.
        const std::vector<std::set<std::string>> users{{"A", "B"}, {"A"}, {"B"}, {"C"}};
        const auto p = compute_pmi(cooccurrence(users));
        CHECK(pmi_entry(p, "A", "B") == 0.0);
    }
    SECTION("zero-count communities are omitted")
    {
        const std::vector<std::set<std::string>> users{{"A", "B"}, {"A"}};
        const auto p = compute_pmi(cooccurrence(users, {"A", "B", "Z"}));
        CHECK(p.communities == std::vector<std::string>{"A", "B"});
    }
}

TEST_CASE("embedding cohort thresholds")
{
    std::vector<Contribution> v;
    int id = 0;
    auto add = [&](const std::string& user, const std::string& c, int n) {
        for (int i = 0; i < n; ++i, ++id) v.push_back(comment(std::to_string(id), user, c, 100 + id));
    };
    add("ten_anchor", "anchor", 10);
    add("nine_anchor", "anchor", 9);
    add("contrast_only", "contrast", 15);
    Corpus corpus(std::move(v));
    const auto users = embedding_cohort(corpus, "anchor", "contrast", 10);
    CHECK(users == std::vector<std::string>{"contrast_only", "ten_anchor"});
    CHECK_THROWS_AS(embedding_cohort(corpus, "anchor", "anchor", 10), Error);
}

TEST_CASE("truncated svd fixtures")
{
    SECTION("diagonal")
    {
        Matrix<double> a = Vector<double>::LinSpaced(3, 3.0, 1.0).asDiagonal();
        const auto svd = truncated_svd(a, 2);
        CHECK(std::abs(svd.singular_values(0) - 3.0) < 1e-8);
        CHECK(std::abs(svd.singular_values(1) - 2.0) < 1e-8);
    }
    SECTION("rank one")
    {
        Vector<double> x(5);
        x << 1, -2, 0.5, 3, 1;
        const Matrix<double> a = x * x.transpose();
        CHECK(reconstruction_error(a, truncated_svd(a, 1)) <= 1e-8);
    }
    SECTION("rank outside range")
    {
        const Matrix<double> a = Matrix<double>::Identity(3, 3);
        CHECK_THROWS_AS(truncated_svd(a, 4), Error);
        CHECK_THROWS_AS(truncated_svd(a, 0), Error);
    }
}

TEST_CASE("truncated svd matches a dense decomposition")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix<double> a = Matrix<double>::NullaryExpr(20, 20, [&] { return u(rng); });
        a = (a + a.transpose()).eval();
        a = a.cwiseMax(0.5) - Matrix<double>::Constant(20, 20, 0.5);  // PPMI-like: sparse, non-negative
        const Index k = 5;

        Eigen::JacobiSVD<Matrix<double>> dense(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Matrix<double> best = dense.matrixU().leftCols(k) * dense.singularValues().head(k).asDiagonal() *
                                    dense.matrixV().leftCols(k).transpose();
        const auto svd = truncated_svd(a, k);
        const Matrix<double> approx = svd.u * svd.singular_values.asDiagonal() * svd.v.transpose();
        CHECK((approx - best).norm() <= 1e-6);
        CHECK((svd.singular_values - dense.singularValues().head(k)).cwiseAbs().maxCoeff() <= 1e-8);

        // Symmetric input: the truncation error equals the tail of the
        // eigenvalue magnitudes.
        Eigen::SelfAdjointEigenSolver<Matrix<double>> eig(a);
        Vector<double> mags = eig.eigenvalues().cwiseAbs();
        std::sort(mags.data(), mags.data() + mags.size(), std::greater<>());
        CHECK(std::abs(reconstruction_error(a, svd) - mags.tail(20 - k).norm()) <= 1e-6);
    }
}

TEST_CASE("truncated svd works on sparse input")
{
    Eigen::SparseMatrix<double> s(6, 6);
    for (int i = 0; i < 6; ++i) s.insert(i, i) = 6.0 - i;
    s.insert(0, 1) = 0.5;
    s.insert(1, 0) = 0.5;
    s.makeCompressed();
    const auto svd = truncated_svd(s, 3);
    const Matrix<double> dense = Matrix<double>(s);
    Eigen::JacobiSVD<Matrix<double>> ref(dense);
    CHECK((svd.singular_values - ref.singularValues().head(3)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("cosine scale fixtures")
{
    SubredditEmbedding emb;
    emb.communities = {"anchor", "ortho", "anti", "zero", "same"};
    emb.vectors.resize(5, 2);
    emb.vectors << 1, 1, 1, -1, -2, -2, 0, 0, 3, 3;
    const auto s = similarity_scale(emb, "anchor");
    CHECK(s.score("anchor") == 1.0);
    CHECK(std::abs(*s.score("ortho")) < 1e-15);
    CHECK(*s.score("anti") == Catch::Approx(-1.0).margin(1e-15));
    CHECK(*s.score("same") == Catch::Approx(1.0).margin(1e-15));
    CHECK_FALSE(s.contains("zero"));
    CHECK_THROWS_AS(similarity_scale(emb, "missing"), Error);
}

TEST_CASE("embedding is deterministic and row-weighted")
{
    const std::vector<std::set<std::string>> users{{"A", "B"}, {"A", "B"}, {"B", "C"}, {"C", "D"}, {"D"}, {"A", "D"}};
    const auto pmi = compute_pmi(cooccurrence(users));
    const auto e1 = embed(pmi, 3, RowWeighting::u_sqrt_sigma);
    const auto e2 = embed(pmi, 3, RowWeighting::u_sqrt_sigma);
    CHECK(e1.vectors == e2.vectors);
    const auto eu = embed(pmi, 3, RowWeighting::u);
    const auto es = embed(pmi, 3, RowWeighting::u_sigma);
    // Column j of U * S^(1/2) squared equals U * S column-wise times U.
    for (Index j = 0; j < 3; ++j)
        CHECK((e1.vectors.col(j).cwiseProduct(e1.vectors.col(j)) - es.vectors.col(j).cwiseProduct(eu.vectors.col(j)))
                  .norm() < 1e-10);
}

namespace {

SubredditScale scale_from(const std::vector<double>& v)
{
    SubredditScale s;
    for (std::size_t i = 0; i < v.size(); ++i) s.values["c" + std::to_string(i)] = v[i];
    return s;
}

// Spearman via the squared rank-difference formula (no ties).
double formula_rho(const std::vector<double>& a, const std::vector<double>& b)
{
    const auto n = a.size();
    auto ranks = [&](const std::vector<double>& v) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = 1.0 + static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x < v[i]; }));
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    const double nn = static_cast<double>(n);
    return 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
}

}  // namespace

TEST_CASE("rank correlation fixtures")
{
    std::vector<double> id{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> rev(id.rbegin(), id.rend());
    CHECK(rank_correlation(scale_from(id), scale_from(id)).rho == 1.0);
    CHECK(rank_correlation(scale_from(id), scale_from(rev)).rho == Catch::Approx(-1.0).margin(1e-15));
    const auto r = rank_correlation(scale_from({1, 2, 3, 4, 5}), scale_from({1, 3, 2, 5, 4}));
    CHECK(r.rho == Catch::Approx(0.8).margin(1e-12));
    CHECK(r.n == 5);
    CHECK_THROWS_AS(rank_correlation(scale_from({1, 2}), scale_from({2, 1})), Error);
}

TEST_CASE("rank correlation agrees with the rank-difference formula")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial % 30);
        std::vector<double> a(n), b(n);
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        CHECK(rank_correlation(scale_from(a), scale_from(b)).rho == Catch::Approx(formula_rho(a, b)).margin(1e-12));
    }
}

TEST_CASE("ties get average ranks")
{
    const Vector<double> v = (Vector<double>(5) << 3, 1, 3, 2, 3).finished();
    const Vector<double> r = average_ranks(v);
    CHECK(r(1) == 1.0);
    CHECK(r(3) == 2.0);
    CHECK(r(0) == 4.0);
    CHECK(r(2) == 4.0);
}

TEST_CASE("scale csv round trip")
{
    testing::TempDir dir("scale");
    auto s = scale_from({0.1, -0.7, 1.0 / 3.0});
    write_scale_csv(dir / "s.csv", s, "similarity");
    const auto back = read_scale_csv(dir / "s.csv");
    CHECK(back.values == s.values);
    CHECK(top_n(s, 2).size() == 2);
    CHECK(top_n(s, 2).contains("c2"));
}
