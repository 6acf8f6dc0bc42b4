#include "support.hpp"

#include "ctpath/corpus.hpp"
#include "ctpath/csv.hpp"
#include "ctpath/pathways.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <zlib.h>

using namespace ctpath;
using ctpath::testing::comment;
using ctpath::testing::TempDir;

namespace {

constexpr std::int64_t kDay = 24 * 3600;

void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("well-formed lines become contributions")
{
    TempDir dir("ingest");
    write_text(dir / "a.jsonl",
               R"({"id":"c1","author":"u1","subreddit":"A","created_utc":100,"body":"hi","link_id":"t3_s1"})" "\n"
               R"({"id":"c2","author":"u2","subreddit":"A","created_utc":101,"body":"yo","link_id":"t3_s1","parent_id":"t1_c1"})" "\n"
               R"({"id":"s1","author":"u3","subreddit":"A","created_utc":99,"title":"Post","selftext":"text","score":5})" "\n");
    IngestStats stats;
    const std::vector<std::filesystem::path> paths{dir / "a.jsonl"};
    auto v = load_contributions(paths, &stats);
    REQUIRE(v.size() == 3);
    CHECK(stats.malformed == 0);
    CHECK(v[1].parent_id == std::optional<std::string>("t1_c1"));
    CHECK(v[2].kind == ContributionKind::submission);
    CHECK(v[2].thread_id == "t3_s1");
    CHECK(v[2].body == "Post\ntext");
    CHECK(v[2].score == 5);
}

TEST_CASE("malformed lines are skipped and counted")
{
    TempDir dir("ingest");
    write_text(dir / "a.jsonl",
               R"({"id":"c1","author":"u1","subreddit":"A","created_utc":100,"body":"hi","link_id":"t3_s1"})" "\n"
               "{broken\n"
               R"({"id":"c3","author":"u1","subreddit":"A","created_utc":102,"body":"hi","link_id":"t3_s1"})" "\n");
    IngestStats stats;
    const std::vector<std::filesystem::path> paths{dir / "a.jsonl"};
    CHECK(load_contributions(paths, &stats).size() == 2);
    CHECK(stats.malformed == 1);
}

TEST_CASE("comments without a thread are rejected")
{
    CHECK_FALSE(parse_contribution(R"({"id":"c1","author":"u1","subreddit":"A","created_utc":100,"body":"x"})"));
}

TEST_CASE("deleted authors are flagged, not parsed")
{
    bool deleted = false;
    CHECK_FALSE(parse_contribution(
        R"({"id":"c1","author":"[deleted]","subreddit":"A","created_utc":100,"body":"x","link_id":"t3_a"})", &deleted));
    CHECK(deleted);
}

TEST_CASE("gzip input reads like plain input")
{
    TempDir dir("gz");
    const std::string line =
        R"({"id":"c1","author":"u1","subreddit":"A","created_utc":100,"body":"hi","link_id":"t3_s1"})" "\n";
    gzFile f = gzopen((dir / "a.jsonl.gz").c_str(), "wb");
    REQUIRE(f);
    gzwrite(f, line.data(), static_cast<unsigned>(line.size()));
    gzclose(f);
    const std::vector<std::filesystem::path> paths{dir / "a.jsonl.gz"};
    auto v = load_contributions(paths);
    REQUIRE(v.size() == 1);
    CHECK(v[0].author == "u1");
}

TEST_CASE("unreadable inputs are fatal")
{
    const std::vector<std::filesystem::path> paths{"/nonexistent/ctpath/input.jsonl"};
    CHECK_THROWS_AS(load_contributions(paths), Error);
}

TEST_CASE("contributions survive a write/read round trip")
{
    TempDir dir("roundtrip");
    std::vector<Contribution> in{comment("c1", "u1", "A", 10, "t3_a", "he said \"hi\"\nthen left"),
                                 testing::submission("s1", "u2", "B", 5, "Title", 7)};
    write_contributions(dir / "c.jsonl", in);
    const std::vector<std::filesystem::path> paths{dir / "c.jsonl"};
    auto out = load_contributions(paths);
    REQUIRE(out.size() == 2);
    CHECK(out[0].body == in[0].body);
    CHECK(out[1].kind == ContributionKind::submission);
    CHECK(out[1].score == 7);
}

TEST_CASE("community filter applies both thresholds")
{
    std::vector<Contribution> v;
    int id = 0;
    auto add = [&](const std::string& community, int contribs, int authors) {
        for (int i = 0; i < contribs; ++i)
            v.push_back(comment(std::to_string(id++), "u" + std::to_string(i % authors), community, 100 + i));
    };
    add("keep", 12, 6);
    add("few_authors", 12, 4);
    add("few_contribs", 9, 9);
    const auto kept = filter_subreddits(v, 10, 5);
    CHECK(kept == std::set<std::string>{"keep"});
    CHECK(restrict_to(v, kept).size() == 12);
}

TEST_CASE("decile bounds follow the remainder rule")
{
    const auto b100 = decile_bounds(100);
    for (int d = 0; d < kDeciles; ++d) CHECK(b100[d + 1] - b100[d] == 10);

    const auto b23 = decile_bounds(23);
    const std::array<std::size_t, 10> sizes{3, 3, 3, 2, 2, 2, 2, 2, 2, 2};
    for (int d = 0; d < kDeciles; ++d) CHECK(b23[d + 1] - b23[d] == sizes[static_cast<std::size_t>(d)]);
    CHECK(b23.back() == 23);
}

namespace {

// 25 focal comments spread over `span_days`, with `prior` pre-anchor
// contributions of which `prior_ct` fall in "ct".
Corpus cohort_corpus(int span_days, int prior, int prior_ct, int unscored_after = 0)
{
    std::vector<Contribution> v;
    int id = 0;
    const std::int64_t anchor = 1'000'000'000;
    for (int i = 0; i < prior; ++i)
        v.push_back(comment("p" + std::to_string(id++), "u", i < prior_ct ? "ct" : "main", anchor - 1000 + i));
    for (int i = 0; i < 25; ++i)
        v.push_back(comment("f" + std::to_string(id++), "u", "focal", anchor + i * span_days * kDay / 24));
    for (int i = 0; i < unscored_after; ++i)
        v.push_back(comment("x" + std::to_string(id++), "u", "unscored", anchor + 5 + i));
    return Corpus(std::move(v));
}

SubredditScale cohort_scale()
{
    SubredditScale s;
    s.anchor = "focal";
    s.values = {{"focal", 1.0}, {"ct", 0.8}, {"main", 0.1}};
    return s;
}

CohortFilter cohort_gates()
{
    CohortFilter f;
    f.focal_community = "focal";
    f.prior_rank_cutoff = 1;
    return f;
}

}  // namespace

TEST_CASE("cohort gates")
{
    const auto scale = cohort_scale();
    const auto filter = cohort_gates();

    SECTION("all gates pass")
    {
        // 1 of 50 prior contributions in ct (2%), one unscored post-anchor
        // contribution out of 26 (96% coverage).
        auto corpus = cohort_corpus(400, 50, 1, 1);
        auto sel = select_cohort(corpus, filter, &scale);
        CHECK(sel.users == std::vector<std::string>{"u"});
    }
    SECTION("short tenure")
    {
        auto corpus = cohort_corpus(200, 50, 1);
        auto sel = select_cohort(corpus, filter, &scale);
        CHECK(sel.rejected.at("u") == RejectReason::short_tenure);
    }
    SECTION("prior anchor-like activity above the cap")
    {
        auto corpus = cohort_corpus(400, 50, 6);  // 12%
        auto sel = select_cohort(corpus, filter, &scale);
        CHECK(sel.rejected.at("u") == RejectReason::prior_activity);
    }
    SECTION("low scale coverage")
    {
        auto corpus = cohort_corpus(400, 0, 0, 10);
        auto sel = select_cohort(corpus, filter, &scale);
        CHECK(sel.rejected.at("u") == RejectReason::low_coverage);
    }
    SECTION("too few focal comments")
    {
        std::vector<Contribution> v;
        for (int i = 0; i < 19; ++i) v.push_back(comment(std::to_string(i), "u", "focal", 100 + i * 40 * kDay));
        Corpus corpus(std::move(v));
        auto sel = select_cohort(corpus, filter, &scale);
        CHECK(sel.rejected.at("u") == RejectReason::few_focal_comments);
    }
}

TEST_CASE("timeline starts at the first focal comment")
{
    std::vector<Contribution> v;
    v.push_back(comment("a", "u", "other", 10));
    for (int i = 0; i < 23; ++i) v.push_back(comment("c" + std::to_string(100 + i), "u", i % 2 ? "other" : "focal", 100 + i));
    Corpus corpus(std::move(v));
    const auto t = build_timeline("u", corpus, "focal");
    CHECK(t.anchor_at == 100);
    CHECK(t.contributions.size() == 23);
    CHECK(t.decile(0).size() == 3);
    CHECK(t.decile(9).size() == 2);
    CHECK(t.decile(0)[0]->community == "focal");
}

TEST_CASE("timelines need ten post-anchor contributions")
{
    std::vector<Contribution> v;
    for (int i = 0; i < 9; ++i) v.push_back(comment(std::to_string(i), "u", "focal", 100 + i));
    Corpus corpus(std::move(v));
    CHECK_THROWS_AS(build_timeline("u", corpus, "focal"), TimelineError);
    CHECK_THROWS_AS(build_timeline("nobody", corpus, "focal"), TimelineError);
}

TEST_CASE("engagement score fixtures")
{
    SubredditScale s;
    s.values = {{"anchor", 1.0}, {"half", 0.5}, {"neg", -0.25}, {"zero", 0.0}};
    std::vector<Contribution> v;
    for (int i = 0; i < 6; ++i) v.push_back(comment("h" + std::to_string(i), "u", "half", i));
    for (int i = 0; i < 4; ++i) v.push_back(comment("n" + std::to_string(i), "u", "neg", 10 + i));
    std::vector<const Contribution*> batch;
    for (const auto& c : v) batch.push_back(&c);
    CHECK(weighted_engagement(batch, s) == Catch::Approx(0.2).margin(1e-15));
    // Clipping removes the negative contribution only.
    CHECK(weighted_engagement(batch, s, true) == Catch::Approx(0.3).margin(1e-15));

    std::vector<Contribution> anchor_only{comment("a", "u", "anchor", 1), comment("b", "u", "anchor", 2)};
    std::vector<const Contribution*> b2{&anchor_only[0], &anchor_only[1]};
    CHECK(weighted_engagement(b2, s) == 1.0);

    std::vector<Contribution> zero{comment("z", "u", "zero", 1), comment("y", "u", "unscored", 2)};
    std::vector<const Contribution*> b3{&zero[0], &zero[1]};
    CHECK(weighted_engagement(b3, s) == 0.0);
}

TEST_CASE("cohort manifest round trip")
{
    TempDir dir("cohort");
    std::vector<Contribution> v;
    for (int i = 0; i < 10; ++i) v.push_back(comment(std::to_string(i), "solo", "focal", 100 + i));
    Corpus corpus(std::move(v));
    const std::vector<UserTimeline> tl{build_timeline("solo", corpus, "focal")};
    write_cohort_manifest(dir / "cohort.csv", tl);
    CHECK(read_cohort_users(dir / "cohort.csv") == std::vector<std::string>{"solo"});
}
