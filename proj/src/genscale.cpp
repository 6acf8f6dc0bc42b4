#include "ctpath/genscale.hpp"

#include "ctpath/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace ctpath {

std::map<std::string, std::vector<const Contribution*>> top_submissions(const Corpus& corpus,
                                                                        std::size_t per_community)
{
    std::map<std::string, std::vector<const Contribution*>> out;
    for (const auto& c : corpus.contributions())
        if (!c.is_comment()) out[c.community].push_back(&c);
    for (auto& [_, subs] : out) {
        std::sort(subs.begin(), subs.end(), [](const Contribution* a, const Contribution* b) {
            if (a->score != b->score) return a->score > b->score;
            return a->id < b->id;
        });
        if (subs.size() > per_community) subs.resize(per_community);
    }
    return out;
}

namespace {

const std::unordered_set<std::string>& stopwords()
{
    static const std::unordered_set<std::string> words{
        "a",     "about", "after", "all",   "also",  "an",    "and",   "any",  "are",   "as",    "at",
        "be",    "because", "been", "before", "but",  "by",    "can",   "could", "did",  "do",    "does",
        "for",   "from",  "had",   "has",   "have",  "he",    "her",   "here", "his",   "how",   "i",
        "if",    "in",    "is",    "it",    "its",   "just",  "my",    "no",   "not",   "now",   "of",
        "on",    "or",    "our",   "she",   "so",    "some",  "than",  "that", "the",   "their", "then",
        "there", "these", "they",  "this",  "those", "to",    "was",   "we",   "were",  "what",  "when",
        "where", "which", "while", "who",   "why",   "will",  "with",  "would", "yes",  "you",   "your"};
    return words;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

struct RawToken {
    std::string text;
    bool sentence_start = false;
    bool breaks_before = false;  // punctuation between this token and the previous one
};

std::vector<RawToken> raw_tokens(std::string_view text)
{
    std::vector<RawToken> out;
    bool sentence_start = true;
    bool broken = true;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (word_char(c)) {
            std::size_t j = i;
            while (j < text.size()) {
                const auto d = static_cast<unsigned char>(text[j]);
                if (word_char(d)) {
                    ++j;
                } else if ((d == '\'' || d == '-') && j + 1 < text.size() &&
                           word_char(static_cast<unsigned char>(text[j + 1]))) {
                    j += 2;
                } else {
                    break;
                }
            }
            out.push_back({std::string(text.substr(i, j - i)), sentence_start, broken});
            sentence_start = false;
            broken = false;
            i = j;
        } else {
            if (c == '.' || c == '!' || c == '?' || c == '\n') sentence_start = true;
            if (!std::isspace(c)) broken = true;
            if (c == '\n') broken = true;
            ++i;
        }
    }
    return out;
}

bool is_capitalized(const std::string& t) { return !t.empty() && std::isupper(static_cast<unsigned char>(t[0])); }

bool is_number(const std::string& t)
{
    return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string normalize_entity(std::string_view surface)
{
    std::string out;
    bool space = false;
    for (char ch : surface) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    // Strip possessives word by word.
    std::string result;
    std::size_t start = 0;
    while (start <= out.size()) {
        std::size_t end = out.find(' ', start);
        if (end == std::string::npos) end = out.size();
        std::string word = out.substr(start, end - start);
        if (word.size() > 2 && word.compare(word.size() - 2, 2, "'s") == 0) word.resize(word.size() - 2);
        else if (word.size() > 4 && word.compare(word.size() - 4, 4, "\xE2\x80\x99s") == 0) word.resize(word.size() - 4);
        else if (word.size() > 1 && word.back() == '\'') word.pop_back();
        if (!word.empty()) {
            if (!result.empty()) result += ' ';
            result += word;
        }
        start = end + 1;
    }
    return result;
}

CapitalizedRunExtractor::CapitalizedRunExtractor(std::vector<std::string> gazetteer)
{
    for (const auto& g : gazetteer) {
        std::vector<std::string> words;
        for (auto& t : raw_tokens(g)) words.push_back(lower(t.text));
        if (!words.empty()) gazetteer_.push_back(std::move(words));
    }
}

std::vector<std::string> CapitalizedRunExtractor::extract(std::string_view text) const
{
    const auto tokens = raw_tokens(text);
    std::vector<std::string> out;

    auto flush = [&](std::size_t begin, std::size_t end) {
        // Trim leading stopwords, then drop runs that are only numbers.
        while (begin < end && stopwords().count(lower(tokens[begin].text))) ++begin;
        if (begin >= end || is_number(tokens[begin].text)) return;
        std::string surface;
        for (std::size_t k = begin; k < end; ++k) {
            if (k > begin) surface += ' ';
            surface += tokens[k].text;
        }
        auto norm = normalize_entity(surface);
        if (!norm.empty()) out.push_back(std::move(norm));
    };

    std::size_t run_begin = 0;
    bool in_run = false;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        const auto& t = tokens[k];
        const bool continues = in_run && !t.breaks_before && (is_capitalized(t.text) || is_number(t.text));
        if (continues) continue;
        if (in_run) flush(run_begin, k);
        in_run = is_capitalized(t.text);
        run_begin = k;
    }
    if (in_run) flush(run_begin, tokens.size());

    if (!gazetteer_.empty()) {
        std::vector<std::string> low;
        low.reserve(tokens.size());
        for (const auto& t : tokens) low.push_back(lower(t.text));
        for (const auto& phrase : gazetteer_) {
            for (std::size_t k = 0; k + phrase.size() <= low.size(); ++k) {
                if (std::equal(phrase.begin(), phrase.end(), low.begin() + static_cast<std::ptrdiff_t>(k))) {
                    std::string joined;
                    for (const auto& w : phrase) joined += (joined.empty() ? "" : " ") + w;
                    out.push_back(normalize_entity(joined));
                }
            }
        }
    }
    return out;
}

std::vector<std::string> extract_entities(std::string_view text)
{
    static const CapitalizedRunExtractor extractor;
    return extractor.extract(text);
}

std::vector<EntityMention> mentions_from_submissions(
    const std::map<std::string, std::vector<const Contribution*>>& top, const EntityExtractor& extractor)
{
    std::vector<std::pair<const std::string*, const Contribution*>> jobs;
    for (const auto& [community, subs] : top)
        for (const auto* s : subs) jobs.emplace_back(&community, s);
    std::vector<std::vector<std::string>> found(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) { found[i] = extractor.extract(jobs[i].second->body); });

    std::vector<EntityMention> out;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        std::set<std::string> unique(found[i].begin(), found[i].end());
        for (const auto& e : unique) out.push_back({*jobs[i].first, e, jobs[i].second->id});
    }
    return out;
}

void write_mentions(const std::filesystem::path& path, std::span<const EntityMention> mentions)
{
    csv::Writer w(path);
    w.row({"community", "entity", "submission_id"});
    for (const auto& m : mentions) w.row({m.community, m.entity, m.submission_id});
}

std::vector<EntityMention> read_mentions(const std::filesystem::path& path)
{
    csv::Row header;
    std::vector<EntityMention> out;
    for (const auto& r : csv::read_file(path, &header)) {
        if (r.size() < 2) throw Error("malformed entity row in " + path.string());
        auto entity = normalize_entity(r[1]);
        if (entity.empty()) continue;
        out.push_back({r[0], std::move(entity), r.size() > 2 ? r[2] : std::string()});
    }
    return out;
}

double SubredditEntityGraph::edge(const std::string& a, const std::string& b) const
{
    auto ia = std::lower_bound(nodes.begin(), nodes.end(), a);
    auto ib = std::lower_bound(nodes.begin(), nodes.end(), b);
    if (ia == nodes.end() || *ia != a || ib == nodes.end() || *ib != b) return 0.0;
    return weights.coeff(std::distance(nodes.begin(), ia), std::distance(nodes.begin(), ib));
}

SubredditEntityGraph build_entity_graph(std::span<const EntityMention> mentions)
{
    std::map<std::string, std::set<std::string>> communities_of;  // entity -> communities
    std::set<std::string> names;
    for (const auto& m : mentions) {
        if (m.entity.empty()) continue;
        communities_of[m.entity].insert(m.community);
        names.insert(m.community);
    }

    SubredditEntityGraph g;
    g.nodes.assign(names.begin(), names.end());
    const double s = static_cast<double>(g.nodes.size());
    std::unordered_map<std::string, Index> index;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) index[g.nodes[i]] = static_cast<Index>(i);

    std::map<std::pair<Index, Index>, double> acc;
    for (const auto& [entity, comms] : communities_of) {
        const double idf = std::log(s / static_cast<double>(comms.size()));
        g.idf[entity] = idf;
        if (idf <= 0.0 || comms.size() < 2) continue;
        std::vector<Index> ids;
        for (const auto& c : comms) ids.push_back(index.at(c));
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j) acc[{ids[i], ids[j]}] += idf;
    }
    std::vector<Eigen::Triplet<double>> entries;
    for (const auto& [key, w] : acc) {
        entries.emplace_back(key.first, key.second, w);
        entries.emplace_back(key.second, key.first, w);
    }
    const auto n = static_cast<Index>(g.nodes.size());
    g.weights.resize(n, n);
    g.weights.setFromTriplets(entries.begin(), entries.end());
    g.weights.makeCompressed();
    return g;
}

std::vector<int> connected_components(const Eigen::SparseMatrix<double>& adjacency)
{
    const Index n = adjacency.rows();
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    int next = 0;
    std::vector<Index> stack;
    for (Index start = 0; start < n; ++start) {
        if (label[static_cast<std::size_t>(start)] >= 0) continue;
        label[static_cast<std::size_t>(start)] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            Index v = stack.back();
            stack.pop_back();
            for (Eigen::SparseMatrix<double>::InnerIterator it(adjacency, v); it; ++it) {
                if (it.value() <= 0.0) continue;
                auto& l = label[static_cast<std::size_t>(it.index())];
                if (l < 0) {
                    l = next;
                    stack.push_back(it.index());
                }
            }
        }
        ++next;
    }
    return label;
}

Vector<double> power_iteration(const Eigen::SparseMatrix<double>& adjacency, const CentralityOptions& opt,
                               int* iterations)
{
    const Index n = adjacency.rows();
    if (n == 0) throw Error("power_iteration: empty graph");
    Vector<double> x = Vector<double>::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> trace;
    for (int it = 1; it <= opt.max_iter; ++it) {
        // The +I shift keeps bipartite graphs (e.g. stars) from oscillating.
        Vector<double> next = adjacency * x + x;
        const double norm = next.norm();
        if (norm == 0.0) throw Error("power_iteration: zero vector");
        next /= norm;
        const double change = (next - x).norm();
        trace.push_back(change);
        x = std::move(next);
        if (change < opt.tol) {
            if (iterations) *iterations = it;
            return x.cwiseMax(0.0);
        }
    }
    throw ConvergenceError("eigenvector centrality did not converge after " + std::to_string(opt.max_iter) +
                               " iterations",
                           trace.empty() ? 0.0 : trace.back(), std::move(trace));
}

CentralityResult eigen_centrality(const SubredditEntityGraph& graph, const CentralityOptions& opt)
{
    const auto n = static_cast<Index>(graph.nodes.size());
    if (n == 0) throw Error("eigen_centrality: empty graph");
    const auto label = connected_components(graph.weights);
    std::vector<std::size_t> sizes;
    for (int l : label) {
        if (static_cast<std::size_t>(l) >= sizes.size()) sizes.resize(static_cast<std::size_t>(l) + 1, 0);
        ++sizes[static_cast<std::size_t>(l)];
    }
    // Components are numbered in node order, so max_element breaks ties by
    // the smallest community name.
    const int giant = static_cast<int>(std::distance(sizes.begin(), std::max_element(sizes.begin(), sizes.end())));

    std::vector<Index> members;
    std::vector<Index> local(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; ++i)
        if (label[static_cast<std::size_t>(i)] == giant) {
            local[static_cast<std::size_t>(i)] = static_cast<Index>(members.size());
            members.push_back(i);
        }
    std::vector<Eigen::Triplet<double>> entries;
    for (Index col = 0; col < graph.weights.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(graph.weights, col); it; ++it) {
            const Index r = local[static_cast<std::size_t>(it.row())];
            const Index c = local[static_cast<std::size_t>(it.col())];
            if (r >= 0 && c >= 0) entries.emplace_back(r, c, it.value());
        }
    const auto m = static_cast<Index>(members.size());
    Eigen::SparseMatrix<double> sub(m, m);
    sub.setFromTriplets(entries.begin(), entries.end());

    CentralityResult out;
    const Vector<double> x = power_iteration(sub, opt, &out.iterations);
    out.component_size = members.size();
    out.excluded = static_cast<std::size_t>(n) - members.size();
    for (Index i = 0; i < n; ++i) {
        const Index l = local[static_cast<std::size_t>(i)];
        out.scale.values[graph.nodes[static_cast<std::size_t>(i)]] = l >= 0 ? x(l) : 0.0;
    }
    if (out.excluded)
        log_info("eigen_centrality: " + std::to_string(out.excluded) + " communities outside the largest component scored 0");
    auto ranked = out.scale.ranked();
    out.scale.anchor = ranked.front().first;
    return out;
}

PairRankResult pair_rank_eval(const SubredditScale& scale, std::span<const std::pair<std::string, std::string>> pairs)
{
    PairRankResult out;
    std::size_t correct = 0;
    for (const auto& [general, specialist] : pairs) {
        auto a = scale.score(general);
        auto b = scale.score(specialist);
        if (!a || !b) {
            ++out.skipped;
            continue;
        }
        ++out.evaluated;
        if (*a > *b) ++correct;
    }
    out.fraction = out.evaluated ? static_cast<double>(correct) / static_cast<double>(out.evaluated) : 0.0;
    return out;
}

}  // namespace ctpath
