#include "ctpath/cluster.hpp"
#include "ctpath/dtw.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <random>

using namespace ctpath;

namespace {

// Minimum squared cost over every monotone warping path, by exhaustive
// recursion from (0, 0) to (n-1, m-1).
double brute_force_cost(const Series& x, const Series& y)
{
    const Index n = x.size();
    const Index m = y.size();
    double best = std::numeric_limits<double>::infinity();
    std::function<void(Index, Index, double)> walk = [&](Index i, Index j, double acc) {
        const double d = x(i) - y(j);
        acc += d * d;
        if (i == n - 1 && j == m - 1) {
            best = std::min(best, acc);
            return;
        }
        if (i + 1 < n) walk(i + 1, j, acc);
        if (j + 1 < m) walk(i, j + 1, acc);
        if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
    };
    walk(0, 0, 0.0);
    return best;
}

Series series(std::initializer_list<double> v)
{
    Series s(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) s(i++) = x;
    return s;
}

}  // namespace

TEST_CASE("dtw fixtures")
{
    const Series x = series({0.3, 0.1, 0.7});
    CHECK(dtw_distance(x, x) == 0.0);
    CHECK(dtw_distance(series({0, 0, 0}), series({1, 1, 1})) == Catch::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(dtw_distance(series({1, 2, 3}), series({1, 2, 2, 3})) == 0.0);
}

TEST_CASE("dtw agrees with exhaustive path enumeration")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> len(1, 6);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        Series a(len(rng));
        Series b(len(rng));
        for (Index i = 0; i < a.size(); ++i) a(i) = val(rng);
        for (Index i = 0; i < b.size(); ++i) b(i) = val(rng);
        const double oracle = brute_force_cost(a, b);
        REQUIRE(std::abs(dtw_cost(a, b) - oracle) <= 1e-12);
        const auto aligned = dtw_align(a, b);
        REQUIRE(std::abs(aligned.cost - oracle) <= 1e-12);
        double along = 0.0;
        for (auto [i, j] : aligned.path) along += (a(i) - b(j)) * (a(i) - b(j));
        REQUIRE(std::abs(along - oracle) <= 1e-12);
        REQUIRE(aligned.path.front() == std::pair<Index, Index>{0, 0});
        REQUIRE(aligned.path.back() == std::pair<Index, Index>{a.size() - 1, b.size() - 1});
    }
}

TEST_CASE("dtw window")
{
    const Series a = series({0, 1, 2, 3});
    const Series b = series({0, 0, 1, 2, 3});
    CHECK_THROWS_AS(dtw_cost(a, b, Index(0)), Error);
    // A window covering the whole grid is unconstrained.
    CHECK(dtw_cost(a, b, Index(5)) == dtw_cost(a, b));
    // Window zero on equal lengths is the Euclidean distance.
    const Series c = series({1, 1, 3, 3});
    CHECK(dtw_cost(a, c, Index(0)) == Catch::Approx((a - c).squaredNorm()));
}

TEST_CASE("dtw is symmetric and works in float")
{
    Eigen::VectorXf a(3), b(4);
    a << 0.f, 1.f, 2.f;
    b << 0.f, 0.5f, 1.f, 2.f;
    CHECK(dtw_cost(a, b) == Catch::Approx(dtw_cost(b, a)));
    CHECK(dtw_cost(a, b) == Catch::Approx(0.25f));
}

TEST_CASE("dba barycenter fixtures")
{
    const std::vector<Series> one{series({0.1, 0.4, 0.2})};
    CHECK(dba_barycenter<double>(one, one[0], 5).isApprox(one[0]));

    const std::vector<Series> dup{one[0], one[0]};
    CHECK(dba_barycenter<double>(dup, one[0], 5).isApprox(one[0]));

    const std::vector<Series> flat{Series::Zero(10), Series::Ones(10)};
    const Series center = dba_barycenter<double>(flat, Series::Constant(10, 0.2), 5);
    CHECK((center.array() - 0.5).abs().maxCoeff() < 1e-12);
}

TEST_CASE("dba does not increase the summed cost")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.1);
    std::vector<Series> s;
    for (int i = 0; i < 12; ++i) {
        Series x(10);
        for (Index j = 0; j < 10; ++j) x(j) = std::sin(0.6 * static_cast<double>(j + i % 3)) + noise(rng);
        s.push_back(x);
    }
    std::vector<double> trace;
    dba_barycenter<double>(s, s[0], 20, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
}
