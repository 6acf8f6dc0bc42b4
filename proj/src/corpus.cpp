#include "ctpath/corpus.hpp"

#include "ctpath/csv.hpp"

#include <json.hpp>
#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <unordered_set>

namespace ctpath {

using nlohmann::json;

namespace {

std::optional<std::string> string_field(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

std::optional<std::int64_t> int_field(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    if (it->is_number_integer()) return it->get<std::int64_t>();
    if (it->is_number_float()) return static_cast<std::int64_t>(it->get<double>());
    if (it->is_string()) {
        const auto& s = it->get_ref<const std::string&>();
        std::size_t used = 0;
        try {
            auto v = std::stoll(s, &used);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

bool is_deleted_author(const std::string& author)
{
    return author == "[deleted]" || author == "[removed]";
}

struct GzFile {
    gzFile handle = nullptr;
    explicit GzFile(const std::filesystem::path& p) : handle(gzopen(p.c_str(), "rb")) {}
    ~GzFile()
    {
        if (handle) gzclose(handle);
    }
    GzFile(const GzFile&) = delete;
    GzFile& operator=(const GzFile&) = delete;

    // Reads one line without its terminator. Returns false at EOF.
    bool getline(std::string& line)
    {
        line.clear();
        char buf[1 << 16];
        bool any = false;
        while (gzgets(handle, buf, sizeof(buf)) != nullptr) {
            any = true;
            std::size_t len = std::char_traits<char>::length(buf);
            if (len > 0 && buf[len - 1] == '\n') {
                line.append(buf, len - 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return true;
            }
            line.append(buf, len);
        }
        return any;
    }
};

}  // namespace

std::optional<Contribution> parse_contribution(std::string_view line, bool* deleted)
{
    if (deleted) *deleted = false;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;

    auto id = string_field(j, "id");
    auto author = string_field(j, "author");
    auto community = string_field(j, "subreddit");
    auto created = int_field(j, "created_utc");
    if (!id || id->empty() || !author || !community || community->empty() || !created || *created <= 0)
        return std::nullopt;
    if (is_deleted_author(*author) || author->empty()) {
        if (deleted) *deleted = true;
        return std::nullopt;
    }

    Contribution c;
    c.id = std::move(*id);
    c.author = std::move(*author);
    c.community = std::move(*community);
    c.created_at = *created;
    c.score = int_field(j, "score").value_or(0);
    c.parent_id = string_field(j, "parent_id");

    const bool submission = j.contains("title") || string_field(j, "kind") == std::optional<std::string>("submission");
    if (submission) {
        c.kind = ContributionKind::submission;
        c.thread_id = c.id.rfind("t3_", 0) == 0 ? c.id : "t3_" + c.id;
        std::string text = string_field(j, "title").value_or("");
        auto body = string_field(j, "selftext");
        if (!body) body = string_field(j, "body");
        if (body && !body->empty()) {
            if (!text.empty()) text += '\n';
            text += *body;
        }
        c.body = std::move(text);
    } else {
        auto body = string_field(j, "body");
        auto link = string_field(j, "link_id");
        if (!body || !link || link->empty()) return std::nullopt;
        c.kind = ContributionKind::comment;
        c.thread_id = std::move(*link);
        c.body = std::move(*body);
    }
    return c;
}

void for_each_contribution(std::span<const std::filesystem::path> paths,
                           const std::function<void(Contribution&&)>& sink, IngestStats* stats)
{
    IngestStats local;
    for (const auto& path : paths) {
        GzFile file(path);
        if (!file.handle) throw Error("cannot open input file " + path.string());
        std::string line;
        while (file.getline(line)) {
            ++local.lines;
            if (line.find_first_not_of(" \t") == std::string::npos) {
                ++local.blank;
                continue;
            }
            bool deleted = false;
            auto c = parse_contribution(line, &deleted);
            if (c) {
                ++local.accepted;
                sink(std::move(*c));
            } else if (deleted) {
                ++local.deleted_authors;
            } else {
                ++local.malformed;
            }
        }
        int err = 0;
        gzerror(file.handle, &err);
        if (err != Z_OK && err != Z_STREAM_END) throw Error("read error in " + path.string());
    }
    if (stats) *stats = local;
}

std::vector<Contribution> load_contributions(std::span<const std::filesystem::path> paths,
                                             IngestStats* stats)
{
    std::vector<Contribution> out;
    for_each_contribution(paths, [&](Contribution&& c) { out.push_back(std::move(c)); }, stats);
    return out;
}

void write_contributions(const std::filesystem::path& path, std::span<const Contribution> contribs)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& c : contribs) {
        json j;
        j["id"] = c.id;
        j["author"] = c.author;
        j["subreddit"] = c.community;
        j["created_utc"] = c.created_at;
        j["score"] = c.score;
        if (c.is_comment()) {
            j["body"] = c.body;
            j["link_id"] = c.thread_id;
        } else {
            // Title and selftext were merged on ingest; keep the merged text.
            j["kind"] = "submission";
            j["title"] = "";
            j["selftext"] = c.body;
        }
        if (c.parent_id) j["parent_id"] = *c.parent_id;
        out << j.dump() << '\n';
    }
}

Corpus::Corpus(std::vector<Contribution> contribs) : contribs_(std::move(contribs))
{
    std::stable_sort(contribs_.begin(), contribs_.end(), time_order);
    std::set<std::string> communities;
    for (const auto& c : contribs_) {
        user_index_[c.author].push_back(&c);
        if (c.is_comment()) thread_index_[c.thread_id].push_back(&c);
        communities.insert(c.community);
    }
    users_.reserve(user_index_.size());
    for (const auto& [u, _] : user_index_) users_.push_back(u);
    std::sort(users_.begin(), users_.end());
    communities_.assign(communities.begin(), communities.end());
}

std::span<const Contribution* const> Corpus::by_user(const std::string& user) const
{
    auto it = user_index_.find(user);
    if (it == user_index_.end()) return {};
    return it->second;
}

std::span<const Contribution* const> Corpus::by_thread(const std::string& thread_id) const
{
    auto it = thread_index_.find(thread_id);
    if (it == thread_index_.end()) return {};
    return it->second;
}

std::int64_t Corpus::last_timestamp() const noexcept
{
    return contribs_.empty() ? 0 : contribs_.back().created_at;
}

std::set<std::string> filter_subreddits(std::span<const Contribution> contribs, std::size_t min_contribs,
                                        std::size_t min_authors)
{
    std::unordered_map<std::string, std::pair<std::size_t, std::unordered_set<std::string>>> tally;
    for (const auto& c : contribs) {
        auto& t = tally[c.community];
        ++t.first;
        t.second.insert(c.author);
    }
    std::set<std::string> keep;
    for (const auto& [name, t] : tally)
        if (t.first >= min_contribs && t.second.size() >= min_authors) keep.insert(name);
    return keep;
}

std::vector<Contribution> restrict_to(std::vector<Contribution> contribs, const std::set<std::string>& keep)
{
    std::erase_if(contribs, [&](const Contribution& c) { return keep.count(c.community) == 0; });
    return contribs;
}

void CohortFilter::validate() const
{
    auto fraction = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!fraction(prior_activity_cap) || !fraction(coverage_floor))
        throw Error("cohort filter fractions must lie in [0, 1]");
    if (min_focal_comments < 1 || min_subreddit_contribs < 1 || min_subreddit_authors < 1)
        throw Error("cohort filter counts must be at least 1");
    if (min_post_anchor < static_cast<std::size_t>(kDeciles))
        throw Error("timelines need at least 10 post-anchor contributions");
    if (focal_community.empty()) throw Error("cohort filter needs a focal community");
}

std::string_view to_string(RejectReason r)
{
    switch (r) {
    case RejectReason::few_focal_comments: return "few_focal_comments";
    case RejectReason::short_tenure: return "short_tenure";
    case RejectReason::prior_activity: return "prior_activity";
    case RejectReason::low_coverage: return "low_coverage";
    case RejectReason::few_post_anchor: return "few_post_anchor";
    }
    return "unknown";
}

std::size_t CohortSelection::count(RejectReason r) const
{
    return static_cast<std::size_t>(
        std::count_if(rejected.begin(), rejected.end(), [r](const auto& kv) { return kv.second == r; }));
}

std::optional<std::int64_t> anchor_time(std::span<const Contribution* const> history, const std::string& focal)
{
    for (const auto* c : history)
        if (c->is_comment() && c->community == focal) return c->created_at;
    return std::nullopt;
}

double prior_activity_fraction(std::span<const Contribution* const> history, std::int64_t anchor_at,
                               const std::set<std::string>& anchor_like)
{
    std::size_t prior = 0;
    std::size_t hits = 0;
    for (const auto* c : history) {
        if (c->created_at >= anchor_at) break;
        ++prior;
        if (anchor_like.count(c->community)) ++hits;
    }
    return prior == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(prior);
}

double scale_coverage(std::span<const Contribution* const> history, std::int64_t anchor_at,
                      const SubredditScale& scale)
{
    std::size_t post = 0;
    std::size_t scored = 0;
    for (const auto* c : history) {
        if (c->created_at < anchor_at) continue;
        ++post;
        if (scale.contains(c->community)) ++scored;
    }
    return post == 0 ? 0.0 : static_cast<double>(scored) / static_cast<double>(post);
}

CohortSelection select_cohort(const Corpus& corpus, const CohortFilter& filter, const SubredditScale* similarity)
{
    filter.validate();

    std::set<std::string> anchor_like;
    if (similarity) {
        for (const auto& [name, _] : similarity->ranked()) {
            if (anchor_like.size() >= filter.prior_rank_cutoff) break;
            if (name != filter.focal_community) anchor_like.insert(name);
        }
    }

    CohortSelection out;
    const std::int64_t data_end = corpus.last_timestamp();
    for (const auto& user : corpus.users()) {
        auto history = corpus.by_user(user);
        std::size_t focal = 0;
        std::int64_t first = 0;
        std::int64_t last = 0;
        for (const auto* c : history) {
            if (!c->is_comment() || c->community != filter.focal_community) continue;
            if (focal == 0) first = c->created_at;
            last = c->created_at;
            ++focal;
        }
        if (focal == 0) continue;  // never anchored; not a candidate
        if (focal < filter.min_focal_comments) {
            out.rejected[user] = RejectReason::few_focal_comments;
            continue;
        }
        const std::int64_t end = filter.tenure_mode == TenureMode::last_focal ? last : data_end;
        if (end - first < filter.min_tenure_seconds) {
            out.rejected[user] = RejectReason::short_tenure;
            continue;
        }
        if (similarity) {
            if (prior_activity_fraction(history, first, anchor_like) > filter.prior_activity_cap) {
                out.rejected[user] = RejectReason::prior_activity;
                continue;
            }
            if (scale_coverage(history, first, *similarity) < filter.coverage_floor) {
                out.rejected[user] = RejectReason::low_coverage;
                continue;
            }
        }
        auto post = std::count_if(history.begin(), history.end(),
                                  [first](const Contribution* c) { return c->created_at >= first; });
        if (static_cast<std::size_t>(post) < filter.min_post_anchor) {
            out.rejected[user] = RejectReason::few_post_anchor;
            continue;
        }
        out.users.push_back(user);
    }
    if (out.users.empty()) log_warning("cohort selection retained no users");
    return out;
}

std::array<std::size_t, kDeciles + 1> decile_bounds(std::size_t n)
{
    std::array<std::size_t, kDeciles + 1> b{};
    const std::size_t base = n / kDeciles;
    const std::size_t extra = n % kDeciles;
    for (std::size_t d = 0; d < static_cast<std::size_t>(kDeciles); ++d)
        b[d + 1] = b[d] + base + (d < extra ? 1 : 0);
    return b;
}

UserTimeline build_timeline(const std::string& user, const Corpus& corpus, const std::string& focal)
{
    auto history = corpus.by_user(user);
    auto anchor = anchor_time(history, focal);
    if (!anchor) throw TimelineError("user " + user + " has no comment in " + focal);

    UserTimeline t;
    t.user = user;
    t.anchor_at = *anchor;
    for (const auto* c : history)
        if (c->created_at >= *anchor) t.contributions.push_back(c);
    if (t.contributions.size() < static_cast<std::size_t>(kDeciles))
        throw TimelineError("user " + user + " has " + std::to_string(t.contributions.size()) +
                            " post-anchor contributions; at least 10 are required");
    t.bounds = decile_bounds(t.contributions.size());
    return t;
}

void write_cohort_manifest(const std::filesystem::path& path, std::span<const UserTimeline> timelines)
{
    csv::Writer w(path);
    w.row({"user", "anchor_at", "n_contribs"});
    for (const auto& t : timelines)
        w.row({t.user, std::to_string(t.anchor_at), std::to_string(t.contributions.size())});
}

void write_timeline_index(const std::filesystem::path& path, std::span<const UserTimeline> timelines)
{
    csv::Writer w(path);
    w.row({"user", "decile", "first_id", "last_id", "count", "start_at", "end_at"});
    for (const auto& t : timelines) {
        for (int d = 0; d < kDeciles; ++d) {
            auto batch = t.decile(d);
            w.row({t.user, std::to_string(d + 1), batch.front()->id, batch.back()->id,
                   std::to_string(batch.size()), std::to_string(batch.front()->created_at),
                   std::to_string(batch.back()->created_at)});
        }
    }
}

std::vector<std::string> read_cohort_users(const std::filesystem::path& path)
{
    csv::Row header;
    std::vector<std::string> users;
    for (const auto& r : csv::read_file(path, &header))
        if (!r.empty()) users.push_back(r[0]);
    return users;
}

}  // namespace ctpath
