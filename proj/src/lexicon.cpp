#include "ctpath/lexicon.hpp"

#include "ctpath/common.hpp"
#include "ctpath/csv.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ctpath {

CategoryMatcher::CategoryMatcher(std::span<const std::string> patterns)
{
    for (const auto& p : patterns) {
        if (!p.empty() && p.back() == '*') prefixes_.insert(p.substr(0, p.size() - 1));
        else literals_.insert(p);
    }
}

bool CategoryMatcher::matches(std::string_view token) const
{
    const std::string t(token);
    if (literals_.count(t)) return true;
    for (std::size_t len = 1; len <= t.size(); ++len)
        if (prefixes_.count(t.substr(0, len))) return true;
    return false;
}

std::string normalize_pattern(std::string_view pattern)
{
    std::string out;
    for (char c : pattern) {
        if (c == '\'') continue;
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (out.empty() || out == "*") throw Error("lexicon: empty pattern");
    const auto star = out.find('*');
    if (star != std::string::npos && star + 1 != out.size())
        throw Error("lexicon: wildcard must be terminal in pattern '" + std::string(pattern) + "'");
    return out;
}

CategoryMatcher LexiconSet::matcher(const std::string& category) const
{
    auto it = categories.find(category);
    if (it == categories.end()) throw Error("lexicon: category '" + category + "' is not defined");
    return CategoryMatcher(it->second);
}

void LexiconSet::validate() const
{
    for (const auto& [name, patterns] : categories) {
        if (patterns.empty()) throw Error("lexicon: category '" + name + "' has no patterns");
        for (const auto& p : patterns)
            if (normalize_pattern(p) != p) throw Error("lexicon: pattern '" + p + "' is not normalized");
    }
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

void dedupe(LexiconSet& set)
{
    for (auto& [_, patterns] : set.categories) {
        std::sort(patterns.begin(), patterns.end());
        patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
    }
}

}  // namespace

LexiconSet parse_category_dictionary(std::string_view text)
{
    LexiconSet out;
    std::map<std::string, std::string> ids;
    int section = 0;  // 0 before header, 1 in header, 2 in entries
    std::size_t skipped = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() == 1 && fields[0] == "%") {
            if (section == 2) throw Error("category dictionary: unexpected third '%' line");
            ++section;
            continue;
        }
        if (section == 1) {
            if (fields.size() < 2) throw Error("category dictionary: malformed header line '" + line + "'");
            ids[std::string(fields[0])] = std::string(fields[1]);
            out.categories[std::string(fields[1])];
        } else if (section == 2) {
            // A pattern is followed only by numeric category ids; anything
            // else is a multi-word or annotated entry.
            std::size_t first_id = 1;
            while (first_id < fields.size() && !std::all_of(fields[first_id].begin(), fields[first_id].end(), [](char c) {
                       return std::isdigit(static_cast<unsigned char>(c));
                   }))
                ++first_id;
            if (first_id != 1 || fields.size() < 2) {
                ++skipped;
                continue;
            }
            const auto pattern = normalize_pattern(fields[0]);
            for (std::size_t k = 1; k < fields.size(); ++k) {
                auto id = ids.find(std::string(fields[k]));
                if (id == ids.end()) throw Error("category dictionary: unknown category id " + std::string(fields[k]));
                out.categories[id->second].push_back(pattern);
            }
        } else {
            throw Error("category dictionary: content before the first '%' line");
        }
    }
    if (section != 2) throw Error("category dictionary: missing '%' delimited header");
    if (skipped) log_info("category dictionary: skipped " + std::to_string(skipped) + " multi-word entries");
    dedupe(out);
    return out;
}

LexiconSet parse_lexicon_csv(std::string_view text)
{
    LexiconSet out;
    std::istringstream in{std::string(text)};
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto row = csv::parse_line(line);
        if (first && row.size() == 2 && row[0] == "category" && row[1] == "pattern") {
            first = false;
            continue;
        }
        first = false;
        if (row.size() != 2) throw Error("lexicon csv: expected 2 fields in '" + line + "'");
        out.categories[row[0]].push_back(normalize_pattern(row[1]));
    }
    dedupe(out);
    return out;
}

LexiconSet load_lexicon(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open lexicon file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto set = path.extension() == ".csv" ? parse_lexicon_csv(buf.str()) : parse_category_dictionary(buf.str());
    set.validate();
    return set;
}

LexiconSet standin_lexicon()
{
    LexiconSet set;
    set.categories["anger"] = {"angr*",  "annoy*",   "bitter*", "disgust*", "enrag*", "frustrat*", "furious",
                               "fury",   "hate*",    "hatred",  "hostil*",  "irritat*", "livid",   "mad",
                               "outrag*", "pissed",  "rage*",   "resent*",  "hostile", "despis*", "fuming"};
    set.categories["anxiety"] = {"afraid", "alarm*", "anxi*",   "apprehens*", "dread*", "fear*",    "frighten*",
                                 "insecur*", "nervous*", "panic*", "scared", "tense", "terrif*", "threat*",
                                 "uneas*",  "uncertain*", "worr*", "paranoi*"};
    set.categories["affiliation"] = {"ally",   "allies",  "bro",     "buddies", "buddy",  "communit*", "companion*",
                                     "family", "friend*", "group*",  "join*",   "member*", "our",      "ours",
                                     "ourselves", "partner*", "team*", "together", "us",   "we"};
    for (auto& [_, patterns] : set.categories) std::sort(patterns.begin(), patterns.end());
    dedupe(set);
    return set;
}

double lexicon_rate(std::span<const std::string> tokens, const CategoryMatcher& category)
{
    if (tokens.empty()) return 0.0;
    const auto hits = std::count_if(tokens.begin(), tokens.end(), [&](const std::string& t) { return category.matches(t); });
    return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

}  // namespace ctpath
