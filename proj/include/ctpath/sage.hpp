#ifndef CTPATH_SAGE_HPP
#define CTPATH_SAGE_HPP

#include "ctpath/common.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ctpath {

using TokenCounts = std::map<std::string, std::int64_t>;

TokenCounts count_tokens(std::span<const std::string> tokens);

struct Vocabulary {
    /// Sorted.
    std::vector<std::string> tokens;
    std::unordered_map<std::string, Index> index;

    Index size() const noexcept { return static_cast<Index>(tokens.size()); }
};

/// Tokens whose pooled count across `corpora` is at least `min_count`.
Vocabulary build_vocabulary(std::span<const TokenCounts> corpora, std::int64_t min_count);

/// Counts of `counts` over `vocab`; out-of-vocabulary tokens are ignored.
Vector<double> count_vector(const TokenCounts& counts, const Vocabulary& vocab);

struct BackgroundModel {
    std::vector<std::string> vocabulary;
    /// Log probabilities; exp sums to 1.
    Vector<double> log_probs;
};

/// Add-`epsilon` smoothed log distribution of `counts`.
BackgroundModel background_from_counts(const Vocabulary& vocab, const Vector<double>& counts, double epsilon = 1.0);

/// Pooled background over `corpora` (at least two) after the vocabulary
/// cutoff. Throws if the pooled corpus is empty.
BackgroundModel build_background(std::span<const TokenCounts> corpora, std::int64_t vocab_min_count = 10,
                                 double epsilon = 1.0);

struct SageOptions {
    double lambda = 1.0;
    /// Relative objective change below which the fit is stationary.
    double tol = 1e-10;
    int max_iter = 1000;
};

struct SageWeights {
    std::string community;
    Vector<double> eta;
    double lambda = 0.0;
    /// Objective after every accepted iteration, starting at eta = 0.
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
};

/// L1-penalized log-likelihood sum_w c_w (m_w + eta_w) - C log sum_w exp(m_w + eta_w) - lambda |eta|_1.
double sage_objective(const Vector<double>& counts, const Vector<double>& log_background, const Vector<double>& eta,
                      double lambda);

/// Proximal Newton ascent with backtracking; every
/// accepted step does not decrease the objective. Throws ConvergenceError
/// with the step-size trace if the objective becomes NaN.
SageWeights fit_sage(const Vector<double>& target_counts, const BackgroundModel& background,
                     const SageOptions& opt = {});

struct SageLexicon {
    std::string community;
    /// (token, eta), eta descending, ties by token.
    std::vector<std::pair<std::string, double>> entries;

    std::unordered_set<std::string> token_set() const;
};

/// The k tokens with the largest strictly positive eta.
SageLexicon top_k_lexicon(const SageWeights& weights, const std::vector<std::string>& vocabulary,
                          std::size_t k = 1000);

/// Share of token occurrences in `tokens` that belong to `lexicon`; 0 for
/// no tokens.
double language_conformity(std::span<const std::string> tokens, const std::unordered_set<std::string>& lexicon);

struct SageConfig {
    std::int64_t vocab_min_count = 10;
    double epsilon = 1.0;
    std::size_t lexicon_size = 1000;
    SageOptions fit;
};

/// One fit per community against the pooled counts of all other
/// communities, over a shared vocabulary.
std::map<std::string, SageLexicon> community_lexicons(const std::map<std::string, TokenCounts>& corpora,
                                                      const SageConfig& cfg = {});

/// CSV: community,rank,token,eta.
void write_lexicons(const std::filesystem::path& path, const std::map<std::string, SageLexicon>& lexicons);
std::map<std::string, SageLexicon> read_lexicons(const std::filesystem::path& path);

}  // namespace ctpath

#endif  // CTPATH_SAGE_HPP
