#ifndef CTPATH_CORPUS_HPP
#define CTPATH_CORPUS_HPP

#include "ctpath/common.hpp"
#include "ctpath/scale.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ctpath {

enum class ContributionKind { comment, submission };

/// One comment or submission from a dump file.
struct Contribution {
    std::string id;
    std::string author;
    std::string community;
    std::int64_t created_at = 0;
    ContributionKind kind = ContributionKind::comment;
    std::string thread_id;
    std::optional<std::string> parent_id;
    std::string body;
    std::int64_t score = 0;

    bool is_comment() const noexcept { return kind == ContributionKind::comment; }
};

/// Ordering used everywhere a time order is needed: (created_at, id).
inline bool time_order(const Contribution& a, const Contribution& b)
{
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.id < b.id;
}

struct IngestStats {
    std::size_t lines = 0;
    std::size_t accepted = 0;
    std::size_t malformed = 0;
    std::size_t deleted_authors = 0;
    std::size_t blank = 0;
};

/// Parses one newline-delimited record. Returns nullopt for malformed
/// records. Deleted authors are reported through `deleted`.
std::optional<Contribution> parse_contribution(std::string_view line, bool* deleted = nullptr);

/// Streams every record of `paths` (plain or gzip) in file order.
/// Throws ctpath::Error if a file cannot be opened.
void for_each_contribution(std::span<const std::filesystem::path> paths,
                           const std::function<void(Contribution&&)>& sink,
                           IngestStats* stats = nullptr);

std::vector<Contribution> load_contributions(std::span<const std::filesystem::path> paths,
                                             IngestStats* stats = nullptr);

/// Writes contributions as newline-delimited records readable by
/// load_contributions.
void write_contributions(const std::filesystem::path& path, std::span<const Contribution> contribs);

/// Immutable, time-ordered contribution store with author and thread indices.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Contribution> contribs);
    Corpus(const Corpus&) = delete;
    Corpus& operator=(const Corpus&) = delete;
    Corpus(Corpus&&) noexcept = default;
    Corpus& operator=(Corpus&&) noexcept = default;

    std::span<const Contribution> contributions() const noexcept { return contribs_; }
    std::size_t size() const noexcept { return contribs_.size(); }

    const std::vector<std::string>& users() const noexcept { return users_; }
    const std::vector<std::string>& communities() const noexcept { return communities_; }

    /// Time-ordered contributions of `user`; empty span for unknown users.
    std::span<const Contribution* const> by_user(const std::string& user) const;
    /// Comments of a thread in time order; empty span for unknown threads.
    std::span<const Contribution* const> by_thread(const std::string& thread_id) const;

    std::int64_t last_timestamp() const noexcept;

private:
    std::vector<Contribution> contribs_;
    std::vector<std::string> users_;
    std::vector<std::string> communities_;
    std::unordered_map<std::string, std::vector<const Contribution*>> user_index_;
    std::unordered_map<std::string, std::vector<const Contribution*>> thread_index_;
};

/// Communities with at least `min_contribs` contributions from at least
/// `min_authors` distinct authors.
std::set<std::string> filter_subreddits(std::span<const Contribution> contribs,
                                        std::size_t min_contribs = 10,
                                        std::size_t min_authors = 5);

/// Drops contributions outside `keep`.
std::vector<Contribution> restrict_to(std::vector<Contribution> contribs,
                                      const std::set<std::string>& keep);

enum class TenureMode { last_focal, data_end };

struct CohortFilter {
    std::string focal_community;
    std::size_t min_focal_comments = 20;
    std::int64_t min_tenure_seconds = 365 * 24 * 3600;
    TenureMode tenure_mode = TenureMode::last_focal;
    double prior_activity_cap = 0.10;
    /// Communities ranked within the top `prior_rank_cutoff` of the
    /// similarity scale (focal excluded) count as prior anchor-like activity.
    std::size_t prior_rank_cutoff = 500;
    double coverage_floor = 0.80;
    std::size_t min_subreddit_contribs = 10;
    std::size_t min_subreddit_authors = 5;
    std::size_t min_post_anchor = kDeciles;

    void validate() const;
};

enum class RejectReason {
    few_focal_comments,
    short_tenure,
    prior_activity,
    low_coverage,
    few_post_anchor,
};

std::string_view to_string(RejectReason r);

struct CohortSelection {
    std::vector<std::string> users;
    std::map<std::string, RejectReason> rejected;

    std::size_t count(RejectReason r) const;
};

/// Applies the focal-activity, tenure, prior-activity and coverage gates.
/// The last two are skipped when `similarity` is null.
CohortSelection select_cohort(const Corpus& corpus, const CohortFilter& filter,
                              const SubredditScale* similarity = nullptr);

/// Fraction of a user's pre-anchor contributions that fall in `anchor_like`.
double prior_activity_fraction(std::span<const Contribution* const> history, std::int64_t anchor_at,
                               const std::set<std::string>& anchor_like);

/// Fraction of post-anchor contributions in communities scored by `scale`.
double scale_coverage(std::span<const Contribution* const> history, std::int64_t anchor_at,
                      const SubredditScale& scale);

/// Index bounds splitting n items into ten contiguous batches whose sizes
/// differ by at most one; the first n % 10 batches take the extra item.
std::array<std::size_t, kDeciles + 1> decile_bounds(std::size_t n);

class TimelineError : public Error {
public:
    using Error::Error;
};

struct UserTimeline {
    std::string user;
    std::int64_t anchor_at = 0;
    std::vector<const Contribution*> contributions;
    std::array<std::size_t, kDeciles + 1> bounds{};

    /// Contributions of decile `d` in [0, 10).
    std::span<const Contribution* const> decile(int d) const
    {
        return std::span<const Contribution* const>(contributions).subspan(
            bounds[d], bounds[d + 1] - bounds[d]);
    }
};

/// Earliest focal-community comment of `user`, if any.
std::optional<std::int64_t> anchor_time(std::span<const Contribution* const> history,
                                        const std::string& focal);

/// Builds the post-anchor decile timeline. Throws TimelineError when the
/// user has no focal comment or fewer than ten post-anchor contributions.
UserTimeline build_timeline(const std::string& user, const Corpus& corpus, const std::string& focal);

void write_cohort_manifest(const std::filesystem::path& path, std::span<const UserTimeline> timelines);
void write_timeline_index(const std::filesystem::path& path, std::span<const UserTimeline> timelines);

/// Users listed in a cohort manifest, in file order.
std::vector<std::string> read_cohort_users(const std::filesystem::path& path);

}  // namespace ctpath

#endif  // CTPATH_CORPUS_HPP
