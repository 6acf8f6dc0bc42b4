#ifndef CTPATH_FEATURES_HPP
#define CTPATH_FEATURES_HPP

#include "ctpath/corpus.hpp"
#include "ctpath/lexicon.hpp"
#include "ctpath/scale.hpp"
#include "ctpath/sentiment.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ctpath {

enum class Feature { anger, anxiety, emotionality, generalist, conformity, thread_diversity, comment_rank, affiliation };

inline constexpr std::array<Feature, 8> kFeatures{Feature::anger,      Feature::anxiety,
                                                  Feature::emotionality, Feature::generalist,
                                                  Feature::conformity, Feature::thread_diversity,
                                                  Feature::comment_rank, Feature::affiliation};

enum class Region { inside_ct, outside_ct };

inline constexpr std::array<Region, 2> kRegions{Region::inside_ct, Region::outside_ct};

std::string_view to_string(Feature f);
std::string_view to_string(Region r);
std::optional<Feature> parse_feature(std::string_view s);
std::optional<Region> parse_region(std::string_view s);

/// (user, decile, feature, region) -> value or absent. Deciles are 0-based
/// here and 1-based in files.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(std::vector<std::string> users);

    const std::vector<std::string>& users() const noexcept { return users_; }
    std::size_t user_count() const noexcept { return users_.size(); }

    std::optional<double> get(std::size_t user, int decile, Feature f, Region r) const
    {
        return cells_[offset(user, decile, f, r)];
    }
    void set(std::size_t user, int decile, Feature f, Region r, std::optional<double> v)
    {
        cells_[offset(user, decile, f, r)] = v;
    }

    /// Row index of `user`, if present.
    std::optional<std::size_t> find(const std::string& user) const;

private:
    std::size_t offset(std::size_t user, int decile, Feature f, Region r) const;

    std::vector<std::string> users_;
    std::vector<std::optional<double>> cells_;
};

/// Long-form CSV: user,decile,region,feature,value with "NA" for absent cells.
void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix read_feature_csv(const std::filesystem::path& path);

/// Unique non-subject authors over non-subject comments; absent when only
/// the subject commented.
std::optional<double> thread_diversity(std::span<const Contribution* const> thread_comments,
                                       const std::string& subject);

/// Number of comments by `user` among `thread_comments`.
std::size_t comment_rank(const std::string& user, std::span<const Contribution* const> thread_comments);

/// Communities in the top `n` of `scale` scoring at least `floor`. Throws if
/// the anchor falls below the floor.
std::set<std::string> ct_membership(const SubredditScale& scale, std::size_t n, double floor);

/// Token-count-weighted mean of per-community conformities over the
/// contributions of communities that have a lexicon; absent if those
/// contributions carry no tokens.
std::optional<double> weighted_conformity(std::span<const Contribution* const> batch,
                                          const std::map<std::string, std::unordered_set<std::string>>& lexicons);

struct FeatureInputs {
    const Corpus* corpus = nullptr;
    const std::set<std::string>* ct = nullptr;
    const SubredditScale* generality = nullptr;
    const std::map<std::string, std::unordered_set<std::string>>* sage_lexicons = nullptr;
    CategoryMatcher anger;
    CategoryMatcher anxiety;
    CategoryMatcher affiliation;
    SentimentRules sentiment;

    /// Throws ctpath::Error naming the first missing dependency.
    void validate() const;
};

/// Fills row `row` of `out` from one timeline.
void compute_user_features(const UserTimeline& timeline, const FeatureInputs& in, FeatureMatrix& out,
                           std::size_t row);

FeatureMatrix compute_feature_matrix(std::span<const UserTimeline> timelines, const FeatureInputs& in);

}  // namespace ctpath

#endif  // CTPATH_FEATURES_HPP
