#ifndef CTPATH_PATHWAYS_HPP
#define CTPATH_PATHWAYS_HPP

#include "ctpath/cluster.hpp"
#include "ctpath/corpus.hpp"
#include "ctpath/scale.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctpath {

/// Contribution-weighted mean of community scores over `batch`. Unscored
/// communities weigh 0 but still count in the denominator. Empty batches
/// score 0.
double weighted_engagement(std::span<const Contribution* const> batch, const SubredditScale& scale,
                           bool clip_at_zero = false);

/// Engagement of decile `decile` (0-based) of a timeline.
double engagement_score(const UserTimeline& timeline, int decile, const SubredditScale& scale,
                        bool clip_at_zero = false);

Series engagement_trajectory(const UserTimeline& timeline, const SubredditScale& scale, bool clip_at_zero = false);

/// Per-user ten-point trajectories, aligned by index.
struct TrajectorySet {
    std::vector<std::string> users;
    std::vector<Series> series;
};

/// CSV: user,c1..c10.
void write_trajectories(const std::filesystem::path& path, const TrajectorySet& set);
TrajectorySet read_trajectories(const std::filesystem::path& path);

enum class Pathway { steady_high, increasing, decreasing, steady_low };

inline constexpr std::array<Pathway, 4> kPathways{Pathway::steady_high, Pathway::increasing, Pathway::decreasing,
                                                  Pathway::steady_low};

std::string_view to_string(Pathway p);
std::optional<Pathway> parse_pathway(std::string_view s);

struct LabelOptions {
    /// Barycenters with |OLS slope per decile| below this are steady.
    double slope_tol = 0.01;
    /// Steady barycenters at or above this mean level are steady high.
    double level_split = 0.2;
};

/// OLS slope and mean level of a barycenter over deciles 1..n.
struct BarycenterShape {
    double slope = 0.0;
    double level = 0.0;
};

BarycenterShape barycenter_shape(const Series& barycenter);

Pathway classify_barycenter(const Series& barycenter, const LabelOptions& opt = {});

struct PathwayAssignment {
    std::vector<Pathway> cluster_labels;
    /// Per-series label, aligned with the clustered TrajectorySet.
    std::vector<Pathway> labels;
    std::vector<int> clusters;
};

PathwayAssignment label_pathways(const ClusterModel<double>& model, const LabelOptions& opt = {});

/// JSON model file: k, seed, inertia, barycenters, cluster labels and the
/// per-user cluster and pathway.
void write_model_json(const std::filesystem::path& path, const ClusterModel<double>& model,
                      const PathwayAssignment& labels, const TrajectorySet& set, const KSelection* selection);

/// user -> pathway, read back from a model file.
std::map<std::string, Pathway> read_pathway_labels(const std::filesystem::path& path);

}  // namespace ctpath

#endif  // CTPATH_PATHWAYS_HPP
