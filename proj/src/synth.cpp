#include "ctpath/synth.hpp"

#include "ctpath/config.hpp"

#include <json.hpp>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

namespace ctpath {

using nlohmann::json;

namespace {

constexpr std::int64_t kDay = 86400;
constexpr std::int64_t kYear = 365 * kDay;
constexpr std::int64_t kEpoch = 1'400'000'000;
constexpr std::int64_t kSpan = 4 * kYear;

const std::array<const char*, 16> kCtNames{"chemtrails", "flatearth",  "ufos",         "illuminati",
                                           "nwo",        "truthers",   "fluoride",     "moonhoax",
                                           "hollowearth", "reptilians", "deepstate",   "vaxxhoax",
                                           "crisisactors", "bilderberg", "areafiftyone", "mkultra"};

const std::array<const char*, 50> kMainNames{
    "news",      "worldnews", "politics",  "askreddit",   "history",       "pics",        "funny",
    "gaming",    "movies",    "music",     "books",       "sports",        "nba",         "soccer",
    "cooking",   "food",      "fitness",   "travel",      "photography",   "diy",         "gardening",
    "space",     "technology", "programming", "linux",    "cars",          "bikes",       "personalfinance",
    "jobs",      "relationships", "parenting", "pets",    "aww",           "art",         "design",
    "writing",   "television", "anime",    "boardgames",  "chess",         "running",     "hiking",
    "fishing",   "camping",   "economics", "philosophy",  "psychology",    "biology",     "physics",
    "math"};

// Communities whose submissions mention entities from the whole pool.
const std::array<const char*, 5> kGeneralists{"news", "worldnews", "politics", "askreddit", "history"};

const std::array<const char*, 24> kFunctionWords{"the", "and", "is",  "that", "of",   "to",   "it",  "this",
                                                 "in",  "for", "you", "was",  "with", "they", "are", "not",
                                                 "be",  "have", "but", "what", "so",  "just", "on",  "about"};

const std::array<const char*, 8> kAnger{"angry", "furious", "hate", "outrage", "rage", "annoyed", "resent", "livid"};
const std::array<const char*, 8> kAnxiety{"worried", "afraid", "scared", "nervous", "panic", "fear", "dread", "uneasy"};
const std::array<const char*, 7> kAffiliation{"we", "us", "our", "together", "friends", "community", "team"};
const std::array<const char*, 6> kPositive{"good", "great", "love", "happy", "nice", "excellent"};
const std::array<const char*, 6> kNegative{"bad", "terrible", "wrong", "evil", "lies", "fake"};

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    std::int64_t range(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_); }
    bool chance(double p) { return uniform() < p; }
    std::mt19937_64& engine() { return rng_; }

    template <typename C>
    const auto& pick(const C& c) { return c[index(c.size())]; }

    std::string pseudo_word(std::set<std::string>& used, int syllables)
    {
        static const char* onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "st", "gl", "kr"};
        static const char* vowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
        static const char* codas[] = {"", "", "n", "r", "s", "l", "x", "nt"};
        for (;;) {
            std::string w;
            for (int s = 0; s < syllables; ++s) w += std::string(onsets[index(19)]) + vowels[index(7)];
            w += codas[index(8)];
            if (used.insert(w).second) return w;
        }
    }

private:
    std::mt19937_64 rng_;
};

struct World {
    std::string anchor;
    std::string contrast;
    std::vector<std::string> ct;
    std::vector<std::string> main;
    std::vector<std::string> common_words;
    std::map<std::string, std::vector<std::string>> distinctive;
    std::vector<std::string> entities;
    std::map<std::string, std::vector<std::string>> favourite_entities;
    // community -> submissions as (created_at, id), time ordered
    std::map<std::string, std::vector<std::pair<std::int64_t, std::string>>> submissions;
};

std::string capitalize(std::string w)
{
    if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    return w;
}

bool is_ct(const World& w, const std::string& community)
{
    return community == w.anchor || std::find(w.ct.begin(), w.ct.end(), community) != w.ct.end();
}

std::string sentence(Gen& g, const World& w, const std::string& community)
{
    const bool ct = is_ct(w, community);
    const double p_anger = ct ? 0.05 : 0.01;
    const double p_anxiety = ct ? 0.05 : 0.01;
    const double p_affil = community == w.anchor ? 0.05 : 0.02;
    const auto& own = w.distinctive.at(community);
    const auto len = g.range(6, 18);
    std::string out;
    for (std::int64_t i = 0; i < len; ++i) {
        const double u = g.uniform();
        std::string word;
        if (u < p_anger) word = g.pick(kAnger);
        else if (u < p_anger + p_anxiety) word = g.pick(kAnxiety);
        else if (u < p_anger + p_anxiety + p_affil) word = g.pick(kAffiliation);
        else if (u < p_anger + p_anxiety + p_affil + 0.03) word = g.pick(kPositive);
        else if (u < p_anger + p_anxiety + p_affil + 0.06) word = ct ? g.pick(kNegative) : g.pick(kPositive);
        else if (u < 0.35) word = g.pick(own);
        else if (u < 0.6) word = g.pick(kFunctionWords);
        else word = g.pick(w.common_words);
        if (i == 0) word = capitalize(word);
        out += (i ? " " : "") + word;
    }
    out += g.chance(0.1) ? "!" : ".";
    return out;
}

std::string body(Gen& g, const World& w, const std::string& community)
{
    std::string out = sentence(g, w, community);
    if (g.chance(0.4)) out += " " + sentence(g, w, community);
    if (g.chance(0.02)) out += " see https://example.org/" + g.pick(w.common_words);
    return out;
}

struct Emitter {
    std::vector<std::string> lines;
    std::size_t next_id = 1;

    std::string id()
    {
        // base-36 ids, unique and sortable only within equal lengths.
        std::size_t n = next_id++;
        std::string s;
        do {
            s += "0123456789abcdefghijklmnopqrstuvwxyz"[n % 36];
            n /= 36;
        } while (n);
        std::reverse(s.begin(), s.end());
        return s;
    }
};

void emit_comment(Gen& g, const World& w, Emitter& e, std::map<std::string, std::string>& last_thread,
                  const std::string& author, const std::string& community, std::int64_t t)
{
    const auto& subs = w.submissions.at(community);
    std::string thread;
    auto last = last_thread.find(community);
    if (last != last_thread.end() && g.chance(0.35)) {
        thread = last->second;
    } else {
        auto it = std::upper_bound(subs.begin(), subs.end(), std::make_pair(t, std::string("~")));
        const std::size_t avail = static_cast<std::size_t>(std::distance(subs.begin(), it));
        thread = "t3_" + (avail ? subs[avail - 1 - g.index(std::min<std::size_t>(avail, 8))].second : subs.front().second);
        last_thread[community] = thread;
    }
    json j;
    j["id"] = e.id();
    j["author"] = author;
    j["subreddit"] = community;
    j["created_utc"] = t;
    j["body"] = body(g, w, community);
    j["link_id"] = thread;
    j["parent_id"] = thread;
    j["score"] = g.range(-3, 40);
    e.lines.push_back(j.dump());
}

std::vector<std::int64_t> sorted_times(Gen& g, std::size_t n, std::int64_t lo, std::int64_t hi)
{
    std::vector<std::int64_t> t(n);
    for (auto& x : t) x = g.range(lo, hi);
    std::sort(t.begin(), t.end());
    return t;
}

double archetype_share(Pathway p, double f)
{
    switch (p) {
    case Pathway::steady_high: return 0.6;
    case Pathway::steady_low: return 0.0;
    case Pathway::increasing: return 0.05 + 0.6 * f;
    case Pathway::decreasing: return 0.65 - 0.6 * f;
    }
    return 0.0;
}

}  // namespace

SynthCorpus generate_synthetic_corpus(const SynthOptions& opt)
{
    Gen g(opt.seed);
    World w;
    w.anchor = opt.anchor;
    w.contrast = opt.contrast;
    w.ct.assign(kCtNames.begin(), kCtNames.end());
    w.main.assign(kMainNames.begin(), kMainNames.end());

    std::set<std::string> used(kFunctionWords.begin(), kFunctionWords.end());
    for (int i = 0; i < 300; ++i) w.common_words.push_back(g.pseudo_word(used, 2));
    std::vector<std::string> all = w.ct;
    all.insert(all.end(), w.main.begin(), w.main.end());
    all.push_back(w.anchor);
    all.push_back(w.contrast);
    for (const auto& c : all)
        for (int i = 0; i < 20; ++i) w.distinctive[c].push_back(g.pseudo_word(used, 3));
    for (int i = 0; i < 80; ++i) {
        std::string name = capitalize(g.pseudo_word(used, 2));
        if (g.chance(0.5)) name += " " + capitalize(g.pseudo_word(used, 2));
        else if (g.chance(0.3)) name += " " + std::to_string(g.range(2, 99));
        w.entities.push_back(name);
    }
    for (const auto& c : all) {
        auto& fav = w.favourite_entities[c];
        // CT communities share a small entity core; others pick at random.
        if (is_ct(w, c))
            for (int i = 0; i < 3; ++i) fav.push_back(w.entities[static_cast<std::size_t>(i)]);
        while (fav.size() < 7) fav.push_back(g.pick(w.entities));
    }

    Emitter e;
    SynthCorpus out;
    out.ct_communities = w.ct;
    out.mainstream_communities = w.main;

    // Submissions first so comments can attach to them.
    for (const auto& c : all) {
        const bool generalist = std::find(kGeneralists.begin(), kGeneralists.end(), c) != kGeneralists.end();
        for (int s = 0; s < opt.submissions_per_community; ++s) {
            const std::string id = e.id();
            const std::int64_t t = kEpoch + g.range(0, kSpan);
            std::string title = capitalize(g.pick(std::array<const char*, 5>{"the", "why", "how", "what", "when"}));
            const auto mentions = g.range(1, 3);
            for (std::int64_t m = 0; m < mentions; ++m) {
                title += " " + g.pick(w.common_words) + " " + g.pick(kFunctionWords);
                title += " " + (generalist ? g.pick(w.entities) : g.pick(w.favourite_entities.at(c)));
            }
            title += g.chance(0.5) ? "?" : ".";
            json j;
            j["id"] = id;
            j["author"] = "u_poster" + std::to_string(g.index(80));
            j["subreddit"] = c;
            j["created_utc"] = t;
            j["title"] = title;
            j["selftext"] = g.chance(0.5) ? body(g, w, c) : "";
            j["score"] = static_cast<std::int64_t>(std::floor(std::exp(g.uniform() * 7.0)));
            j["num_comments"] = 0;
            e.lines.push_back(j.dump());
            w.submissions[c].emplace_back(t, id);
        }
        std::sort(w.submissions[c].begin(), w.submissions[c].end());
    }

    auto pick_n = [&](const std::vector<std::string>& from, std::size_t n) {
        std::vector<std::string> v = from;
        std::shuffle(v.begin(), v.end(), g.engine());
        v.resize(std::min(n, v.size()));
        return v;
    };

    // Planted cohort users.
    int user_no = 0;
    for (Pathway p : kPathways) {
        for (int u = 0; u < opt.users_per_pathway; ++u) {
            const std::string name = "u_c" + std::to_string(user_no++);
            out.planted[name] = p;
            std::map<std::string, std::string> threads;
            const auto main_fav = pick_n(w.main, 4);
            const auto ct_fav = pick_n(w.ct, 3);
            const std::int64_t anchor_at = kEpoch + g.range(kYear / 3, 3 * kYear / 2);
            const std::int64_t end = anchor_at + g.range(13 * kYear / 10, 24 * kYear / 10);

            for (auto t : sorted_times(g, static_cast<std::size_t>(g.range(10, 20)), anchor_at - kYear / 2, anchor_at - 1))
                emit_comment(g, w, e, threads, name, g.pick(main_fav), t);

            const std::size_t n_post = p == Pathway::steady_low ? 250 : 180;
            auto times = sorted_times(g, n_post - 1, anchor_at + 1, end);
            times.insert(times.begin(), anchor_at);
            std::vector<std::string> where(n_post);
            std::size_t focal = 0;
            for (std::size_t i = 0; i < n_post; ++i) {
                const double f = static_cast<double>(i) / static_cast<double>(n_post);
                if (i == 0 || g.chance(archetype_share(p, f))) {
                    where[i] = (i == 0 || g.chance(0.7)) ? w.anchor : g.pick(ct_fav);
                } else {
                    where[i] = g.pick(main_fav);
                }
                focal += where[i] == w.anchor;
            }
            // Top up to 22 focal comments, spread evenly for the low archetype.
            if (p == Pathway::steady_low) {
                for (std::size_t i = n_post / 22; i < n_post && focal < 22; i += n_post / 22)
                    if (where[i] != w.anchor) {
                        where[i] = w.anchor;
                        ++focal;
                    }
            }
            for (std::size_t i = 0; i < n_post && focal < 22; ++i)
                if (where[i] != w.anchor && is_ct(w, where[i])) {
                    where[i] = w.anchor;
                    ++focal;
                }
            where.back() = w.anchor;
            for (std::size_t i = 0; i < n_post; ++i) emit_comment(g, w, e, threads, name, where[i], times[i]);
        }
    }

    // Near-cohort users that fail one gate each.
    for (int u = 0; u < 20; ++u) {
        const std::string name = "u_x" + std::to_string(u);
        std::map<std::string, std::string> threads;
        const auto ct_fav = pick_n(w.ct, 3);
        const auto main_fav = pick_n(w.main, 3);
        const std::int64_t anchor_at = kEpoch + g.range(kYear / 2, kYear);
        const bool heavy_prior = u % 2 == 0;
        for (auto t : sorted_times(g, 20, anchor_at - kYear / 2, anchor_at - 1))
            emit_comment(g, w, e, threads, name, heavy_prior && g.chance(0.5) ? g.pick(ct_fav) : g.pick(main_fav), t);
        // Odd users post for only ~200 days.
        const std::int64_t end = anchor_at + (heavy_prior ? 2 * kYear : 200 * kDay);
        auto times = sorted_times(g, 60, anchor_at + 1, end);
        emit_comment(g, w, e, threads, name, w.anchor, anchor_at);
        for (std::size_t i = 0; i < times.size(); ++i)
            emit_comment(g, w, e, threads, name, i % 2 ? w.anchor : g.pick(main_fav), times[i]);
    }

    // Background populations.
    for (int u = 0; u < opt.ct_background_users; ++u) {
        const std::string name = "u_t" + std::to_string(u);
        std::map<std::string, std::string> threads;
        const auto ct_fav = pick_n(w.ct, 4);
        const auto main_fav = pick_n(w.main, 2);
        for (auto t : sorted_times(g, 25, kEpoch, kEpoch + kSpan)) {
            const double r = g.uniform();
            emit_comment(g, w, e, threads, name, r < 0.45 ? w.anchor : (r < 0.85 ? g.pick(ct_fav) : g.pick(main_fav)), t);
        }
    }
    const std::vector<std::string> sciency{"space", "technology", "biology", "physics", "math", "programming", "history"};
    for (int u = 0; u < opt.contrast_users; ++u) {
        const std::string name = "u_s" + std::to_string(u);
        std::map<std::string, std::string> threads;
        // Contrast users also frequent mainstream communities, which pulls
        // those away from the anchor in the embedding.
        const auto fav = pick_n(sciency, 2);
        const auto main_fav = pick_n(w.main, 6);
        for (auto t : sorted_times(g, 25, kEpoch, kEpoch + kSpan)) {
            const double r = g.uniform();
            emit_comment(g, w, e, threads, name, r < 0.4 ? w.contrast : (r < 0.6 ? g.pick(fav) : g.pick(main_fav)), t);
        }
    }
    for (int u = 0; u < opt.mainstream_users; ++u) {
        const std::string name = "u_m" + std::to_string(u);
        std::map<std::string, std::string> threads;
        const auto fav = pick_n(w.main, static_cast<std::size_t>(g.range(3, 6)));
        for (auto t : sorted_times(g, 25, kEpoch, kEpoch + kSpan))
            emit_comment(g, w, e, threads, name, g.pick(fav), t);
    }

    // Communities too small to survive the subreddit filter.
    for (int c = 0; c < 3; ++c) {
        json j;
        j["id"] = e.id();
        j["author"] = "u_m" + std::to_string(c);
        j["subreddit"] = "tinyclub" + std::to_string(c);
        j["created_utc"] = kEpoch + g.range(0, kSpan);
        j["body"] = "hello there";
        j["link_id"] = "t3_tiny" + std::to_string(c);
        e.lines.push_back(j.dump());
    }
    // Deleted authors and malformed records.
    for (int d = 0; d < 20; ++d) {
        json j;
        j["id"] = e.id();
        j["author"] = d % 2 ? "[deleted]" : "[removed]";
        j["subreddit"] = w.anchor;
        j["created_utc"] = kEpoch + g.range(0, kSpan);
        j["body"] = "[removed]";
        j["link_id"] = "t3_" + w.submissions.at(w.anchor).front().second;
        e.lines.push_back(j.dump());
    }
    e.lines.push_back(R"({"id": "broken1", "author": "u_m1", "subreddit": "news", "created_utc": 1400000001, "body": "no thread"})");
    e.lines.push_back("{not json at all");
    e.lines.push_back(R"({"id": "broken2", "author": "u_m2", "subreddit": "news", "created_utc": -5, "body": "x", "link_id": "t3_a"})");

    // Dumps are grouped by month in the wild; here, shuffle deterministically.
    std::shuffle(e.lines.begin(), e.lines.end(), g.engine());
    out.lines = std::move(e.lines);
    return out;
}

void write_synthetic_corpus(const std::filesystem::path& path, const SynthCorpus& corpus)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    if (path.extension() == ".gz") {
        gzFile f = gzopen(path.string().c_str(), "wb");
        if (!f) throw Error("cannot write " + path.string());
        for (const auto& l : corpus.lines) {
            const std::string line = l + "\n";
            if (gzwrite(f, line.data(), static_cast<unsigned>(line.size())) != static_cast<int>(line.size())) {
                gzclose(f);
                throw Error("write failed on " + path.string());
            }
        }
        if (gzclose(f) != Z_OK) throw Error("write failed on " + path.string());
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& l : corpus.lines) out << l << '\n';
}

std::string synthetic_config_text(const std::filesystem::path& corpus_path, const std::filesystem::path& output_dir,
                                  const SynthOptions& opt)
{
    PipelineConfig cfg;
    cfg.inputs = {corpus_path.string()};
    cfg.output_dir = output_dir.string();
    cfg.anchor = opt.anchor;
    cfg.contrast = opt.contrast;
    cfg.seed = opt.seed;
    // About 70 communities survive; scale the rank-based knobs to match.
    cfg.embedding_rank = 20;
    cfg.prior_rank_cutoff = 16;
    cfg.ct_size = 17;
    cfg.sage_lexicon_size = 200;
    return "# synthetic corpus settings\n" + to_text(cfg);
}

}  // namespace ctpath
