#ifndef CTPATH_TESTS_SUPPORT_HPP
#define CTPATH_TESTS_SUPPORT_HPP

#include "ctpath/analysis.hpp"
#include "ctpath/corpus.hpp"
#include "ctpath/features.hpp"
#include "ctpath/pathways.hpp"
#include "ctpath/sage.hpp"
#include "ctpath/simscale.hpp"
#include "ctpath/stats.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

namespace ctpath::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("ctpath_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Contribution comment(std::string id, std::string author, std::string community, std::int64_t t,
                            std::string thread = "t3_x", std::string body = "")
{
    Contribution c;
    c.id = std::move(id);
    c.author = std::move(author);
    c.community = std::move(community);
    c.created_at = t;
    c.kind = ContributionKind::comment;
    c.thread_id = std::move(thread);
    c.parent_id = c.thread_id;
    c.body = std::move(body);
    return c;
}

inline Contribution submission(std::string id, std::string author, std::string community, std::int64_t t,
                               std::string title, std::int64_t score)
{
    Contribution c;
    c.id = std::move(id);
    c.author = std::move(author);
    c.community = std::move(community);
    c.created_at = t;
    c.kind = ContributionKind::submission;
    c.thread_id = "t3_" + c.id;
    c.body = std::move(title);
    c.score = score;
    return c;
}

/// Ten-point archetype trajectory: steady high 0.5, steady low 0.03,
/// linear 0.05 -> 0.6 and linear 0.6 -> 0.05.
inline double archetype_value(Pathway p, int decile)
{
    const double f = static_cast<double>(decile) / static_cast<double>(kDeciles - 1);
    switch (p) {
    case Pathway::steady_high: return 0.5;
    case Pathway::steady_low: return 0.03;
    case Pathway::increasing: return 0.05 + 0.55 * f;
    case Pathway::decreasing: return 0.6 - 0.55 * f;
    }
    return 0.0;
}

struct PlantedSet {
    std::vector<Series> series;
    std::vector<Pathway> truth;
};

/// `per_archetype` noisy copies of each archetype, interleaved.
inline PlantedSet planted_trajectories(int per_archetype, double sigma, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    PlantedSet out;
    for (int u = 0; u < per_archetype; ++u)
        for (Pathway p : kPathways) {
            Series s(kDeciles);
            for (int d = 0; d < kDeciles; ++d) s(d) = archetype_value(p, d) + noise(rng);
            out.series.push_back(s);
            out.truth.push_back(p);
        }
    return out;
}

/// Five communities over a shared vocabulary of 300 common tokens with
/// random counts; "target" additionally holds 10 planted tokens 50 times
/// each, which every other community holds once.
struct PlantedLexicon {
    std::map<std::string, TokenCounts> corpora;
    std::vector<std::string> planted;
};

inline PlantedLexicon planted_lexicon_corpus(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> common(20, 80);
    PlantedLexicon out;
    for (int i = 0; i < 10; ++i) out.planted.push_back("planted" + std::to_string(i));
    for (const char* name : {"target", "other1", "other2", "other3", "other4"}) {
        auto& c = out.corpora[name];
        for (int w = 0; w < 300; ++w) c["common" + std::to_string(w)] = common(rng);
        for (const auto& t : out.planted) c[t] = std::string(name) == "target" ? 50 : 1;
    }
    return out;
}

/// Share of `sims` simulated pathways whose pooled trend recovers the true
/// slope within 3 standard errors. Each simulation draws `users` series
/// y = a + b * decile + N(0, sigma) and fits them in one regression.
inline double ols_coverage(int sims, std::uint64_t seed, int users = 20)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> scale(0.05, 0.5);
    std::vector<std::string> names;
    std::map<std::string, Pathway> labels;
    for (int u = 0; u < users; ++u) {
        names.push_back("u" + std::to_string(u));
        labels[names.back()] = Pathway::increasing;
    }
    int covered = 0;
    for (int s = 0; s < sims; ++s) {
        const double a = coef(rng);
        const double b = coef(rng) * 0.1;
        std::normal_distribution<double> noise(0.0, scale(rng));
        FeatureMatrix m(names);
        for (std::size_t u = 0; u < names.size(); ++u)
            for (int d = 0; d < kDeciles; ++d)
                m.set(u, d, Feature::anger, Region::inside_ct, a + b * (d + 1) + noise(rng));
        const auto fit = fit_trend(m, labels, Pathway::increasing, Feature::anger, Region::inside_ct);
        covered += std::abs(fit.beta - b) <= 3.0 * fit.std_error;
    }
    return static_cast<double>(covered) / static_cast<double>(sims);
}

/// Share of `trials` pairs of independent uniform scales over `n`
/// communities whose Spearman |rho| stays below 0.1.
inline double independent_scale_rate(int trials, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int below = 0;
    for (int t = 0; t < trials; ++t) {
        SubredditScale a;
        SubredditScale b;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string name = "c" + std::to_string(i);
            a.values[name] = u(rng);
            b.values[name] = u(rng);
        }
        below += std::abs(rank_correlation(a, b).rho) < 0.1;
    }
    return static_cast<double>(below) / static_cast<double>(trials);
}

}  // namespace ctpath::testing

#endif  // CTPATH_TESTS_SUPPORT_HPP
