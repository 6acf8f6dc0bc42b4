#ifndef CTPATH_ANALYSIS_HPP
#define CTPATH_ANALYSIS_HPP

#include "ctpath/features.hpp"
#include "ctpath/pathways.hpp"
#include "ctpath/simscale.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace ctpath {

enum class TrendMode { pooled, per_user };

struct TrendFit {
    Pathway pathway = Pathway::steady_low;
    Feature feature = Feature::anger;
    Region region = Region::inside_ct;
    double beta = 0.0;
    double std_error = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;

    bool significant(double alpha = 0.05) const { return p_value < alpha; }
};

/// Slope of feature value on decile (1..10) for the users of `pathway`.
/// Pooled mode regresses every present (decile, value) point at once;
/// per-user mode averages per-user slopes (users with at least 3 points)
/// and tests the mean against 0. Throws when there is too little data.
TrendFit fit_trend(const FeatureMatrix& m, const std::map<std::string, Pathway>& labels, Pathway pathway,
                   Feature feature, Region region, TrendMode mode = TrendMode::pooled);

/// Every pathway x feature x region fit that has enough data.
std::vector<TrendFit> fit_all_trends(const FeatureMatrix& m, const std::map<std::string, Pathway>& labels,
                                     TrendMode mode = TrendMode::pooled);

using DecileValues = std::array<std::optional<double>, kDeciles>;

DecileValues decile_values(const FeatureMatrix& m, std::size_t user, Feature f, Region r);

/// 1-based decile of the maximum present value, earliest on ties; nullopt
/// if every value is absent.
std::optional<int> peak_decile(const DecileValues& values);

using Histogram = std::array<double, kDeciles>;

struct PeakKey {
    Pathway pathway;
    Feature feature;
    Region region;
    auto operator<=>(const PeakKey&) const = default;
};

struct PeakDistribution {
    /// Density over deciles 1..10 (sums to 1) and number of users behind it.
    std::map<PeakKey, std::pair<Histogram, std::size_t>> histograms;
};

PeakDistribution peak_distribution(const FeatureMatrix& m, const std::map<std::string, Pathway>& labels);

enum class Phase { reflection, exploration, connection };

inline constexpr std::array<Phase, 3> kPhases{Phase::reflection, Phase::exploration, Phase::connection};

std::string_view to_string(Phase p);
Phase phase_of(Feature f);

struct PhaseKey {
    Pathway pathway;
    Phase phase;
    Region region;
    auto operator<=>(const PhaseKey&) const = default;
};

struct PhaseSummary {
    /// Pooled peak density over user-feature pairs, and the pair count.
    std::map<PhaseKey, std::pair<Histogram, std::size_t>> densities;
};

PhaseSummary phase_progression(const FeatureMatrix& m, const std::map<std::string, Pathway>& labels);

/// Spearman correlation of the two scales over shared communities.
SpearmanResult scale_correlation_check(const SubredditScale& similarity, const SubredditScale& generality);

struct BannedVolume {
    std::map<std::string, double> fractions;
    double total = 0.0;
    std::size_t contributions = 0;
};

BannedVolume banned_volume_report(std::span<const Contribution> contribs, std::span<const std::string> banned);

/// First column of a CSV (header "community" optional).
std::vector<std::string> read_community_list(const std::filesystem::path& path);

void write_trends_csv(const std::filesystem::path& path, std::span<const TrendFit> fits, double alpha = 0.05);
std::vector<TrendFit> read_trends_csv(const std::filesystem::path& path);
void write_peaks_csv(const std::filesystem::path& path, const PeakDistribution& peaks);
void write_phase_csv(const std::filesystem::path& path, const PhaseSummary& summary);
PhaseSummary read_phase_csv(const std::filesystem::path& path);

/// Mean trajectory per pathway over the labelled users.
std::map<Pathway, std::pair<Series, std::size_t>> mean_trajectories(const TrajectorySet& set,
                                                                    const std::map<std::string, Pathway>& labels);

/// Declarative Vega-Lite documents: pathway trajectories, trend panel and
/// phase densities. Returns the files written.
std::vector<std::filesystem::path> write_plot_specs(const std::filesystem::path& dir, const TrajectorySet& set,
                                                    const std::map<std::string, Pathway>& labels,
                                                    std::span<const TrendFit> trends, const PhaseSummary& phases,
                                                    double alpha = 0.05);

}  // namespace ctpath

#endif  // CTPATH_ANALYSIS_HPP
