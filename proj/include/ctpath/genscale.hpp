#ifndef CTPATH_GENSCALE_HPP
#define CTPATH_GENSCALE_HPP

#include "ctpath/corpus.hpp"
#include "ctpath/pathways.hpp"
#include "ctpath/scale.hpp"

#include <Eigen/SparseCore>

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ctpath {

/// The `per_community` highest-scored submissions of each community,
/// ties broken by id.
std::map<std::string, std::vector<const Contribution*>> top_submissions(const Corpus& corpus,
                                                                        std::size_t per_community = 200);

/// Lowercases, collapses whitespace and strips possessive endings.
std::string normalize_entity(std::string_view surface);

class EntityExtractor {
public:
    virtual ~EntityExtractor() = default;
    /// Normalized entity surfaces in order of appearance (may repeat).
    virtual std::vector<std::string> extract(std::string_view text) const = 0;
};

/// Maximal runs of capitalized tokens (a number may continue a run),
/// with leading stopwords trimmed and lone sentence-initial stopwords
/// ignored, plus gazetteer phrases matched case-insensitively.
class CapitalizedRunExtractor : public EntityExtractor {
public:
    CapitalizedRunExtractor() = default;
    explicit CapitalizedRunExtractor(std::vector<std::string> gazetteer);

    std::vector<std::string> extract(std::string_view text) const override;

private:
    std::vector<std::vector<std::string>> gazetteer_;
};

std::vector<std::string> extract_entities(std::string_view text);

struct EntityMention {
    std::string community;
    std::string entity;
    std::string submission_id;
};

std::vector<EntityMention> mentions_from_submissions(
    const std::map<std::string, std::vector<const Contribution*>>& top, const EntityExtractor& extractor);

/// CSV: community,entity,submission_id.
void write_mentions(const std::filesystem::path& path, std::span<const EntityMention> mentions);
std::vector<EntityMention> read_mentions(const std::filesystem::path& path);

struct SubredditEntityGraph {
    std::vector<std::string> nodes;
    /// Symmetric, zero diagonal.
    Eigen::SparseMatrix<double> weights;
    /// entity -> ln(S / df).
    std::map<std::string, double> idf;

    double edge(const std::string& a, const std::string& b) const;
};

/// Nodes are the mentioning communities; edge(a, b) sums ln(S / df(e))
/// over the entities both mention.
SubredditEntityGraph build_entity_graph(std::span<const EntityMention> mentions);

struct CentralityOptions {
    double tol = 1e-10;
    int max_iter = 10000;
};

struct CentralityResult {
    SubredditScale scale;
    int iterations = 0;
    std::size_t component_size = 0;
    std::size_t excluded = 0;
};

/// Connected components of a symmetric sparse graph; label per node.
std::vector<int> connected_components(const Eigen::SparseMatrix<double>& adjacency);

/// Dominant eigenvector of a non-negative symmetric matrix by power
/// iteration on (A + I), L2-normalized and non-negative. Throws
/// ConvergenceError with the change trace on failure.
Vector<double> power_iteration(const Eigen::SparseMatrix<double>& adjacency, const CentralityOptions& opt,
                               int* iterations = nullptr);

/// Eigenvector centrality on the largest connected component; other nodes
/// score 0.
CentralityResult eigen_centrality(const SubredditEntityGraph& graph, const CentralityOptions& opt = {});

/// Engagement of decile `decile` (0-based) weighted by generality scores.
inline double generalist_engagement(const UserTimeline& timeline, int decile, const SubredditScale& generality)
{
    return engagement_score(timeline, decile, generality);
}

struct PairRankResult {
    double fraction = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

/// Share of (general, specialist) pairs with score(general) > score(specialist).
PairRankResult pair_rank_eval(const SubredditScale& scale,
                              std::span<const std::pair<std::string, std::string>> pairs);

}  // namespace ctpath

#endif  // CTPATH_GENSCALE_HPP
