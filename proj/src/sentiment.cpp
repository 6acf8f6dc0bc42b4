#include "ctpath/sentiment.hpp"

#include "ctpath/common.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace ctpath {

SentimentRules default_sentiment_rules()
{
    SentimentRules r;
    constexpr double inc = 0.293;
    constexpr double dec = -0.293;
    for (const char* w : {"absolutely", "amazingly", "awfully", "completely", "considerably", "decidedly", "deeply",
                          "enormously", "entirely", "especially", "exceptionally", "extremely", "fabulously",
                          "flipping", "fully", "greatly", "hella", "highly", "hugely", "incredibly", "intensely",
                          "majorly", "more", "most", "particularly", "purely", "quite", "really", "remarkably", "so",
                          "substantially", "thoroughly", "totally", "tremendously", "uber", "unbelievably",
                          "unusually", "utterly", "very"})
        r.boosters[w] = inc;
    for (const char* w : {"almost", "barely", "hardly", "less", "little", "marginally", "occasionally", "partly",
                          "scarcely", "slightly", "somewhat", "sort", "sorta", "kinda"})
        r.boosters[w] = dec;
    for (const char* w : {"aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt", "dont", "hadnt",
                          "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither", "never", "none", "nope", "nor",
                          "not", "nothing", "nowhere", "oughtnt", "shant", "shouldnt", "wasnt", "werent", "without",
                          "wont", "wouldnt", "rarely", "seldom", "despite"})
        r.negations.insert(w);
    // Stand-in valences on the usual -4..4 scale.
    const std::pair<const char*, double> valence[] = {
        {"good", 1.9},      {"great", 3.1},      {"excellent", 2.7}, {"nice", 1.8},     {"love", 3.2},
        {"happy", 2.7},     {"glad", 2.0},       {"like", 1.5},      {"best", 3.2},     {"better", 1.9},
        {"true", 1.6},      {"truth", 1.3},      {"trust", 2.3},     {"agree", 1.5},    {"thanks", 1.9},
        {"interesting", 1.7}, {"hope", 1.9},     {"safe", 1.9},      {"win", 2.8},      {"wonderful", 2.7},
        {"bad", -2.5},      {"terrible", -2.1},  {"horrible", -2.5}, {"awful", -2.0},   {"hate", -2.7},
        {"sad", -2.1},      {"angry", -2.3},     {"fear", -2.2},     {"afraid", -2.0},  {"scared", -1.9},
        {"wrong", -2.1},    {"evil", -3.4},      {"lie", -1.6},      {"lies", -1.8},    {"liar", -2.6},
        {"fake", -2.1},     {"corrupt", -2.3},   {"stupid", -2.4},   {"worst", -3.1},   {"worse", -2.1},
        {"kill", -3.7},     {"dead", -3.3},      {"danger", -2.4},   {"dangerous", -2.1}, {"problem", -1.7},
        {"crazy", -1.4},    {"sick", -2.3},      {"threat", -2.4},   {"poison", -2.5},  {"fraud", -2.8},
    };
    for (const auto& [w, v] : valence) r.valence[w] = v;
    return r;
}

void load_valence_lexicon(const std::filesystem::path& path, SentimentRules& rules)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open valence lexicon " + path.string());
    std::unordered_map<std::string, double> lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string token;
        double mean = 0.0;
        if (!std::getline(fields, token, '\t') || !(fields >> mean))
            throw Error(path.string() + ":" + std::to_string(lineno) + ": malformed valence entry");
        for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        lex[token] = mean;
    }
    if (lex.empty()) throw Error("valence lexicon " + path.string() + " is empty");
    rules.valence = std::move(lex);
}

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool all_caps(std::string_view s)
{
    bool alpha = false;
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalpha(u)) {
            alpha = true;
            if (!std::isupper(u)) return false;
        }
    }
    return alpha;
}

// Whitespace split with surrounding punctuation removed, unless that would
// leave two or fewer characters (emoticons survive). Apostrophes are
// dropped so "don't" meets the "dont" negation entry.
std::vector<std::string> words_of(std::string_view text)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (in >> raw) {
        std::size_t b = 0;
        std::size_t e = raw.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(raw[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(raw[e - 1]))) --e;
        std::string w = e - b <= 2 ? raw : raw.substr(b, e - b);
        if (w.size() > 2) w.erase(std::remove(w.begin(), w.end(), '\''), w.end());
        if (!w.empty()) out.push_back(std::move(w));
    }
    return out;
}

}  // namespace

double compound_sentiment(std::string_view text, const SentimentRules& rules)
{
    const auto words = words_of(text);
    if (words.empty()) return 0.0;
    std::vector<std::string> low;
    low.reserve(words.size());
    for (const auto& w : words) low.push_back(lower(w));

    const auto caps = std::count_if(words.begin(), words.end(), [](const std::string& w) { return all_caps(w); });
    const bool cap_diff = caps > 0 && static_cast<std::size_t>(caps) < words.size();

    auto negated = [&](const std::string& w) { return rules.negations.count(w) > 0; };

    std::vector<double> sentiments(words.size(), 0.0);
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (rules.boosters.count(low[i])) continue;
        if (low[i] == "kind" && i + 1 < words.size() && low[i + 1] == "of") continue;
        auto it = rules.valence.find(low[i]);
        if (it == rules.valence.end()) continue;
        double v = it->second;
        if (all_caps(words[i]) && cap_diff) v += v > 0 ? rules.caps_increment : -rules.caps_increment;
        for (int back = 1; back <= rules.negation_window; ++back) {
            if (i < static_cast<std::size_t>(back)) break;
            const std::size_t j = i - static_cast<std::size_t>(back);
            if (!rules.valence.count(low[j])) {
                auto boost = rules.boosters.find(low[j]);
                if (boost != rules.boosters.end()) {
                    double s = v < 0 ? -boost->second : boost->second;
                    if (all_caps(words[j]) && cap_diff) s += v > 0 ? rules.caps_increment : -rules.caps_increment;
                    if (back == 2) s *= 0.95;
                    if (back >= 3) s *= 0.9;
                    v += s;
                }
            }
            // "never so good" intensifies rather than negates.
            const bool never_so = low[j] == "never" && back > 1 && (low[j + 1] == "so" || low[j + 1] == "this");
            if (never_so) v *= 1.25;
            else if (negated(low[j])) v *= rules.negation_scalar;
        }
        sentiments[i] = v;
    }

    auto but = std::find(low.begin(), low.end(), "but");
    if (but != low.end()) {
        const auto at = static_cast<std::size_t>(std::distance(low.begin(), but));
        for (std::size_t i = 0; i < sentiments.size(); ++i) {
            if (i < at) sentiments[i] *= rules.but_before;
            else if (i > at) sentiments[i] *= rules.but_after;
        }
    }

    double sum = 0.0;
    for (double s : sentiments) sum += s;
    if (sum == 0.0) return 0.0;

    const auto bangs = std::min<std::ptrdiff_t>(std::count(text.begin(), text.end(), '!'), rules.max_exclamations);
    const auto qmarks = std::count(text.begin(), text.end(), '?');
    double emphasis = static_cast<double>(bangs) * rules.exclamation_increment;
    if (qmarks > 1)
        emphasis += qmarks <= 3 ? static_cast<double>(qmarks) * rules.question_increment : rules.question_cap;
    sum += sum > 0 ? emphasis : -emphasis;

    const double c = sum / std::sqrt(sum * sum + rules.alpha);
    return std::clamp(c, -1.0, 1.0);
}

}  // namespace ctpath
