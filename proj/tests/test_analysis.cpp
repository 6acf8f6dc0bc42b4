#include "support.hpp"

#include "ctpath/analysis.hpp"
#include "ctpath/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <fstream>
#include <random>

using namespace ctpath;

TEST_CASE("ols fixtures")
{
    const Vector<double> x = (Vector<double>(3) << 1, 2, 3).finished();
    const Vector<double> y = (Vector<double>(3) << 1, 3, 2).finished();
    CHECK(std::abs(ols(x, y).slope - 0.5) <= 1e-12);

    const Series d = Series::LinSpaced(10, 1.0, 10.0);
    const auto exact = ols(d, d);
    CHECK(exact.slope == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(exact.p_value < 1e-12);

    const auto flat = ols(d, Series::Constant(10, 0.3));
    CHECK(std::abs(flat.slope) < 1e-15);
    CHECK(flat.p_value == 1.0);

    CHECK_THROWS_AS(ols(x.head(2), y.head(2)), Error);
    CHECK_THROWS_AS(ols(Series::Constant(4, 1.0), Series::LinSpaced(4, 0.0, 1.0)), Error);
}

TEST_CASE("ols p-value agrees with the t distribution")
{
    // Known value: two-sided p for t = 2.262 with 9 df is about 0.05.
    CHECK(t_test_p_value(2.2621571628, 9.0) == Catch::Approx(0.05).margin(1e-8));
}

TEST_CASE("ols standard errors are calibrated")
{
    CHECK(testing::ols_coverage(300, 77) >= 0.98);
}

namespace {

FeatureMatrix matrix_with(const std::vector<std::vector<double>>& rows, Feature f, Region r)
{
    std::vector<std::string> users;
    for (std::size_t i = 0; i < rows.size(); ++i) users.push_back("u" + std::to_string(i));
    FeatureMatrix m(users);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int d = 0; d < kDeciles; ++d) m.set(i, d, f, r, rows[i][static_cast<std::size_t>(d)]);
    return m;
}

std::vector<double> line(double a, double b)
{
    std::vector<double> v;
    for (int d = 1; d <= kDeciles; ++d) v.push_back(a + b * d);
    return v;
}

}  // namespace

TEST_CASE("pooled and per-user trends")
{
    const auto m = matrix_with({line(0.0, 0.1), line(1.0, 0.1), line(0.5, 0.1)}, Feature::anger, Region::inside_ct);
    std::map<std::string, Pathway> labels{{"u0", Pathway::increasing}, {"u1", Pathway::increasing},
                                          {"u2", Pathway::steady_low}};
    const auto pooled = fit_trend(m, labels, Pathway::increasing, Feature::anger, Region::inside_ct);
    CHECK(pooled.beta == Catch::Approx(0.1).epsilon(1e-12));
    CHECK(pooled.n == 20);
    const auto per_user = fit_trend(m, labels, Pathway::increasing, Feature::anger, Region::inside_ct, TrendMode::per_user);
    CHECK(per_user.beta == Catch::Approx(0.1).epsilon(1e-12));
    CHECK(per_user.n == 2);
    CHECK_THROWS_AS(fit_trend(m, labels, Pathway::decreasing, Feature::anger, Region::inside_ct), Error);
    CHECK(fit_all_trends(m, labels).size() == 2);
}

TEST_CASE("peak decile")
{
    DecileValues v{};
    CHECK_FALSE(peak_decile(v));
    for (int d = 0; d < kDeciles; ++d) v[static_cast<std::size_t>(d)] = 0.1;
    CHECK(peak_decile(v) == 1);
    v[1] = 0.9;
    CHECK(peak_decile(v) == 2);
    DecileValues w{0.1, 0.5, 0.5, 0.3, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0};
    CHECK(peak_decile(w) == 2);
    DecileValues gaps{};
    gaps[6] = -1.0;
    CHECK(peak_decile(gaps) == 7);
}

TEST_CASE("peak histograms are densities")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> rows(40, std::vector<double>(kDeciles));
    for (auto& r : rows)
        for (auto& x : r) x = u(rng);
    const auto m = matrix_with(rows, Feature::generalist, Region::outside_ct);
    std::map<std::string, Pathway> labels;
    for (std::size_t i = 0; i < rows.size(); ++i) labels["u" + std::to_string(i)] = kPathways[i % 4];
    const auto dist = peak_distribution(m, labels);
    const auto& [hist, users] = dist.histograms.at({Pathway::steady_high, Feature::generalist, Region::outside_ct});
    CHECK(users == 10);
    double total = 0.0;
    for (double h : hist) total += h;
    CHECK(total == Catch::Approx(1.0));
}

TEST_CASE("phase progression")
{
    SECTION("planted ordering")
    {
        std::vector<std::string> users{"a", "b", "c"};
        FeatureMatrix m(users);
        for (std::size_t u = 0; u < users.size(); ++u)
            for (int d = 0; d < kDeciles; ++d)
                for (Feature f : kFeatures) {
                    const Phase p = phase_of(f);
                    int peak = p == Phase::reflection ? 1 : (p == Phase::exploration ? 5 : 8);
                    peak += static_cast<int>(u % 2);
                    m.set(u, d, f, Region::inside_ct, d == peak ? 1.0 : 0.0);
                }
        std::map<std::string, Pathway> labels{{"a", Pathway::increasing}, {"b", Pathway::increasing}, {"c", Pathway::increasing}};
        const auto s = phase_progression(m, labels);
        auto mean_decile = [&](Phase p) {
            const auto& [h, n] = s.densities.at({Pathway::increasing, p, Region::inside_ct});
            double mean = 0.0;
            for (int d = 0; d < kDeciles; ++d) mean += (d + 1) * h[static_cast<std::size_t>(d)];
            return mean;
        };
        CHECK(mean_decile(Phase::reflection) < mean_decile(Phase::exploration));
        CHECK(mean_decile(Phase::exploration) < mean_decile(Phase::connection));
    }
    SECTION("single user")
    {
        FeatureMatrix m({"solo"});
        for (int d = 0; d < kDeciles; ++d) m.set(0, d, Feature::generalist, Region::inside_ct, d == 3 ? 1.0 : 0.0);
        const auto s = phase_progression(m, {{"solo", Pathway::steady_high}});
        const auto& [h, n] = s.densities.at({Pathway::steady_high, Phase::exploration, Region::inside_ct});
        CHECK(n == 1);
        CHECK(h[3] == 1.0);
    }
    SECTION("uniform noise gives near-uniform densities")
    {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const std::size_t n = 2000;
        std::vector<std::string> users;
        for (std::size_t i = 0; i < n; ++i) users.push_back("u" + std::to_string(i));
        FeatureMatrix m(users);
        std::map<std::string, Pathway> labels;
        for (std::size_t i = 0; i < n; ++i) {
            labels[users[i]] = Pathway::steady_low;
            for (int d = 0; d < kDeciles; ++d) m.set(i, d, Feature::generalist, Region::inside_ct, u(rng));
        }
        const auto s = phase_progression(m, labels);
        const auto& [h, count] = s.densities.at({Pathway::steady_low, Phase::exploration, Region::inside_ct});
        double chi2 = 0.0;
        const double expected = static_cast<double>(count) / kDeciles;
        for (double p : h) {
            const double observed = p * static_cast<double>(count);
            chi2 += (observed - expected) * (observed - expected) / expected;
        }
        // 99.9th percentile of chi-square with 9 df.
        CHECK(chi2 < 27.88);
    }
}

TEST_CASE("scale correlation check")
{
    SubredditScale sim;
    SubredditScale gen;
    for (int i = 0; i < 50; ++i) {
        const double x = i * 0.02 - 0.5;
        sim.values["c" + std::to_string(i)] = x;
        gen.values["c" + std::to_string(i)] = std::exp(3.0 * x);
    }
    CHECK(scale_correlation_check(sim, gen).rho == 1.0);
    CHECK(testing::independent_scale_rate(20, 1000, 5) >= 0.9);
}

TEST_CASE("banned volume")
{
    std::vector<Contribution> v;
    for (int i = 0; i < 1000; ++i) v.push_back(testing::comment(std::to_string(i), "u", i < 10 ? "banned" : "ok", i + 1));
    CHECK(banned_volume_report(v, std::vector<std::string>{}).total == 0.0);
    const auto r = banned_volume_report(v, std::vector<std::string>{"banned"});
    CHECK(r.fractions.at("banned") == 0.01);
    CHECK(r.total == 0.01);
}

TEST_CASE("trend and phase files round trip")
{
    testing::TempDir dir("analysis");
    TrendFit f;
    f.pathway = Pathway::decreasing;
    f.feature = Feature::comment_rank;
    f.region = Region::outside_ct;
    f.beta = -0.125;
    f.std_error = 0.01;
    f.p_value = 0.003;
    f.n = 42;
    const std::vector<TrendFit> fits{f};
    write_trends_csv(dir / "t.csv", fits);
    const auto back = read_trends_csv(dir / "t.csv");
    REQUIRE(back.size() == 1);
    CHECK(back[0].pathway == f.pathway);
    CHECK(back[0].feature == f.feature);
    CHECK(back[0].beta == f.beta);
    CHECK(back[0].n == 42);

    PhaseSummary s;
    Histogram h{};
    h[2] = 1.0;
    s.densities[{Pathway::steady_high, Phase::connection, Region::inside_ct}] = {h, 3};
    write_phase_csv(dir / "p.csv", s);
    const auto sb = read_phase_csv(dir / "p.csv");
    CHECK(sb.densities.at({Pathway::steady_high, Phase::connection, Region::inside_ct}).first == h);
}

TEST_CASE("plot specifications are valid and deterministic")
{
    testing::TempDir a("plots");
    testing::TempDir b("plots");
    TrajectorySet set;
    set.users = {"u0", "u1"};
    set.series = {Series::LinSpaced(10, 0, 1), Series::Constant(10, 0.5)};
    std::map<std::string, Pathway> labels{{"u0", Pathway::increasing}, {"u1", Pathway::steady_high}};
    TrendFit f;
    const std::vector<TrendFit> trends{f};
    PhaseSummary phases;
    const auto files = write_plot_specs(a.path(), set, labels, trends, phases);
    write_plot_specs(b.path(), set, labels, trends, phases);
    REQUIRE(files.size() == 3);
    for (const auto& p : files) {
        std::ifstream in(p);
        const auto j = nlohmann::json::parse(in);
        CHECK(j.contains("$schema"));
        std::ifstream x(p), y(b.path() / p.filename());
        std::string sx((std::istreambuf_iterator<char>(x)), {}), sy((std::istreambuf_iterator<char>(y)), {});
        CHECK(sx == sy);
    }
}
