#include "ctpath/features.hpp"

#include "ctpath/csv.hpp"
#include "ctpath/pathways.hpp"
#include "ctpath/sage.hpp"
#include "ctpath/text.hpp"

#include <algorithm>
#include <unordered_map>

namespace ctpath {

namespace {

constexpr std::array<std::string_view, 8> kFeatureNames{"anger",      "anxiety",          "emotionality", "generalist",
                                                        "conformity", "thread_diversity", "comment_rank", "affiliation"};
constexpr std::array<std::string_view, 2> kRegionNames{"inside_ct", "outside_ct"};

}  // namespace

std::string_view to_string(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }
std::string_view to_string(Region r) { return kRegionNames[static_cast<std::size_t>(r)]; }

std::optional<Feature> parse_feature(std::string_view s)
{
    for (std::size_t i = 0; i < kFeatureNames.size(); ++i)
        if (kFeatureNames[i] == s) return static_cast<Feature>(i);
    return std::nullopt;
}

std::optional<Region> parse_region(std::string_view s)
{
    for (std::size_t i = 0; i < kRegionNames.size(); ++i)
        if (kRegionNames[i] == s) return static_cast<Region>(i);
    return std::nullopt;
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> users)
    : users_(std::move(users)), cells_(users_.size() * kDeciles * kFeatures.size() * kRegions.size())
{
}

std::size_t FeatureMatrix::offset(std::size_t user, int decile, Feature f, Region r) const
{
    return ((user * kDeciles + static_cast<std::size_t>(decile)) * kFeatures.size() + static_cast<std::size_t>(f)) *
               kRegions.size() +
           static_cast<std::size_t>(r);
}

std::optional<std::size_t> FeatureMatrix::find(const std::string& user) const
{
    auto it = std::find(users_.begin(), users_.end(), user);
    if (it == users_.end()) return std::nullopt;
    return static_cast<std::size_t>(std::distance(users_.begin(), it));
}

void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& m)
{
    csv::Writer w(path);
    w.row({"user", "decile", "region", "feature", "value"});
    for (std::size_t u = 0; u < m.user_count(); ++u)
        for (int d = 0; d < kDeciles; ++d)
            for (Region r : kRegions)
                for (Feature f : kFeatures) {
                    const auto v = m.get(u, d, f, r);
                    w.row({m.users()[u], std::to_string(d + 1), to_string(r), to_string(f),
                           v ? csv::format_double(*v) : std::string("NA")});
                }
}

FeatureMatrix read_feature_csv(const std::filesystem::path& path)
{
    csv::Row header;
    const auto rows = csv::read_file(path, &header);
    std::vector<std::string> users;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& r : rows) {
        if (r.size() != 5) throw Error("malformed feature row in " + path.string());
        if (index.emplace(r[0], users.size()).second) users.push_back(r[0]);
    }
    FeatureMatrix m(users);
    for (const auto& r : rows) {
        const int d = std::stoi(r[1]) - 1;
        const auto region = parse_region(r[2]);
        const auto feature = parse_feature(r[3]);
        if (d < 0 || d >= kDeciles || !region || !feature) throw Error("malformed feature row in " + path.string());
        if (r[4] != "NA") m.set(index.at(r[0]), d, *feature, *region, std::stod(r[4]));
    }
    return m;
}

std::optional<double> thread_diversity(std::span<const Contribution* const> thread_comments, const std::string& subject)
{
    std::set<std::string_view> authors;
    std::size_t comments = 0;
    for (const auto* c : thread_comments) {
        if (c->author == subject) continue;
        authors.insert(c->author);
        ++comments;
    }
    if (comments == 0) return std::nullopt;
    return static_cast<double>(authors.size()) / static_cast<double>(comments);
}

std::size_t comment_rank(const std::string& user, std::span<const Contribution* const> thread_comments)
{
    return static_cast<std::size_t>(std::count_if(thread_comments.begin(), thread_comments.end(), [&](const Contribution* c) {
        return c->is_comment() && c->author == user;
    }));
}

std::set<std::string> ct_membership(const SubredditScale& scale, std::size_t n, double floor)
{
    const auto anchor = scale.score(scale.anchor);
    if (!anchor) throw Error("ct_membership: anchor '" + scale.anchor + "' is not scored");
    if (*anchor < floor) throw Error("ct_membership: anchor scores below the floor; the scale looks mis-scaled");
    std::set<std::string> out;
    for (const auto& [community, score] : scale.ranked()) {
        if (out.size() >= n || score < floor) break;
        out.insert(community);
    }
    out.insert(scale.anchor);
    return out;
}

std::optional<double> weighted_conformity(std::span<const Contribution* const> batch,
                                          const std::map<std::string, std::unordered_set<std::string>>& lexicons)
{
    std::map<std::string, std::vector<std::string>> tokens;
    for (const auto* c : batch) {
        if (!lexicons.count(c->community)) continue;
        tokenize_into(c->body, tokens[c->community]);
    }
    double weighted = 0.0;
    std::size_t total = 0;
    for (const auto& [community, toks] : tokens) {
        if (toks.empty()) continue;
        weighted += language_conformity(toks, lexicons.at(community)) * static_cast<double>(toks.size());
        total += toks.size();
    }
    if (total == 0) return std::nullopt;
    return weighted / static_cast<double>(total);
}

void FeatureInputs::validate() const
{
    if (!corpus) throw Error("features: missing dependency 'corpus'");
    if (!ct) throw Error("features: missing dependency 'ct set'");
    if (!generality) throw Error("features: missing dependency 'generality scale'");
    if (!sage_lexicons) throw Error("features: missing dependency 'sage lexicons'");
}

namespace {

void region_features(const std::string& user, std::span<const Contribution* const> batch, const FeatureInputs& in,
                     FeatureMatrix& out, std::size_t row, int decile, Region region)
{
    auto put = [&](Feature f, std::optional<double> v) { out.set(row, decile, f, region, v); };
    if (batch.empty()) {
        for (Feature f : kFeatures) put(f, std::nullopt);
        return;
    }

    std::vector<std::string> tokens;
    double sentiment = 0.0;
    std::size_t texts = 0;
    for (const auto* c : batch) {
        tokenize_into(c->body, tokens);
        if (c->body.empty()) continue;
        sentiment += compound_sentiment(c->body, in.sentiment);
        ++texts;
    }
    put(Feature::anger, lexicon_rate(tokens, in.anger));
    put(Feature::anxiety, lexicon_rate(tokens, in.anxiety));
    put(Feature::affiliation, lexicon_rate(tokens, in.affiliation));
    put(Feature::emotionality, texts ? std::optional<double>(sentiment / static_cast<double>(texts)) : std::nullopt);
    put(Feature::generalist, weighted_engagement(batch, *in.generality));
    put(Feature::conformity, weighted_conformity(batch, *in.sage_lexicons));

    // Threads touched in this decile-region, first-touch order.
    std::vector<std::string_view> threads;
    std::map<std::string_view, std::size_t> own_comments;
    for (const auto* c : batch) {
        if (!own_comments.count(c->thread_id)) threads.push_back(c->thread_id);
        own_comments[c->thread_id] += c->is_comment() ? 1 : 0;
    }
    double diversity = 0.0;
    std::size_t defined = 0;
    double rank = 0.0;
    std::size_t commented = 0;
    for (auto tid : threads) {
        if (auto d = thread_diversity(in.corpus->by_thread(std::string(tid)), user)) {
            diversity += *d;
            ++defined;
        }
        if (const auto n = own_comments[tid]) {
            rank += static_cast<double>(n);
            ++commented;
        }
    }
    put(Feature::thread_diversity, defined ? std::optional<double>(diversity / static_cast<double>(defined)) : std::nullopt);
    put(Feature::comment_rank, commented ? std::optional<double>(rank / static_cast<double>(commented)) : std::nullopt);
}

}  // namespace

void compute_user_features(const UserTimeline& timeline, const FeatureInputs& in, FeatureMatrix& out, std::size_t row)
{
    in.validate();
    for (int d = 0; d < kDeciles; ++d) {
        std::vector<const Contribution*> inside;
        std::vector<const Contribution*> outside;
        for (const auto* c : timeline.decile(d)) (in.ct->count(c->community) ? inside : outside).push_back(c);
        region_features(timeline.user, inside, in, out, row, d, Region::inside_ct);
        region_features(timeline.user, outside, in, out, row, d, Region::outside_ct);
    }
}

FeatureMatrix compute_feature_matrix(std::span<const UserTimeline> timelines, const FeatureInputs& in)
{
    in.validate();
    std::vector<std::string> users;
    users.reserve(timelines.size());
    for (const auto& t : timelines) users.push_back(t.user);
    FeatureMatrix out(std::move(users));
    // Rows are disjoint, so workers never touch the same cell.
    parallel_for(timelines.size(), [&](std::size_t i) { compute_user_features(timelines[i], in, out, i); });
    return out;
}

}  // namespace ctpath
