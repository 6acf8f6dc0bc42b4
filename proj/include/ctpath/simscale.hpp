#ifndef CTPATH_SIMSCALE_HPP
#define CTPATH_SIMSCALE_HPP

#include "ctpath/corpus.hpp"
#include "ctpath/scale.hpp"
#include "ctpath/svd.hpp"

#include <Eigen/SparseCore>

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ctpath {

/// Users with at least `min_comments` comments in `anchor` or in `contrast`.
/// Throws ctpath::Error if anchor == contrast or the cohort is empty.
std::vector<std::string> embedding_cohort(const Corpus& corpus, const std::string& anchor,
                                          const std::string& contrast, std::size_t min_comments = 10);

/// Per-community user counts and per-pair joint user counts.
struct CooccurrenceStats {
    std::size_t n_users = 0;
    std::vector<std::string> communities;
    std::vector<std::size_t> counts;
    /// (i, j) with i < j -> joint user count.
    std::map<std::pair<Index, Index>, std::size_t> joint;

    std::size_t joint_count(Index a, Index b) const;
};

/// Counts co-membership from each user's set of communities. When
/// `restrict` is non-empty only those communities are counted.
CooccurrenceStats cooccurrence(std::span<const std::set<std::string>> user_communities,
                               const std::set<std::string>& restrict = {});

CooccurrenceStats cooccurrence(const Corpus& corpus, std::span<const std::string> users,
                               const std::set<std::string>& restrict = {});

struct PmiMatrix {
    std::vector<std::string> communities;
    Eigen::SparseMatrix<double> values;
};

/// Positive PMI, max(0, ln(p(a,b) / (p(a) p(b)))), with joint(a,a) = count(a).
/// Communities with zero count are omitted.
PmiMatrix compute_pmi(const CooccurrenceStats& stats);

enum class RowWeighting { u, u_sqrt_sigma, u_sigma };

struct SubredditEmbedding {
    std::vector<std::string> communities;
    /// One row per community.
    Matrix<double> vectors;

    Index dimension() const noexcept { return vectors.cols(); }
};

SubredditEmbedding embed(const PmiMatrix& pmi, Index rank, RowWeighting weighting = RowWeighting::u_sqrt_sigma,
                         const SvdOptions& opt = {});

/// Cosine similarity of every community vector to the anchor's. Zero-norm
/// vectors are dropped with a warning. Throws if the anchor is missing or
/// has a zero vector.
SubredditScale similarity_scale(const SubredditEmbedding& emb, const std::string& anchor);

struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// Spearman rank correlation over the communities scored by both scales,
/// ties averaged. Throws if fewer than three communities are shared.
SpearmanResult rank_correlation(const SubredditScale& a, const SubredditScale& b);

/// Restricts a scale to its top `n` entries (used for the convergent
/// validity comparison on the head of the ranking).
SubredditScale top_n(const SubredditScale& scale, std::size_t n);

}  // namespace ctpath

#endif  // CTPATH_SIMSCALE_HPP
