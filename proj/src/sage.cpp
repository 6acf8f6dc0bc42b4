#include "ctpath/sage.hpp"

#include "ctpath/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctpath {

TokenCounts count_tokens(std::span<const std::string> tokens)
{
    TokenCounts out;
    for (const auto& t : tokens) ++out[t];
    return out;
}

Vocabulary build_vocabulary(std::span<const TokenCounts> corpora, std::int64_t min_count)
{
    TokenCounts pooled;
    for (const auto& c : corpora)
        for (const auto& [tok, n] : c) pooled[tok] += n;
    Vocabulary v;
    for (const auto& [tok, n] : pooled)
        if (n >= min_count) {
            v.index.emplace(tok, static_cast<Index>(v.tokens.size()));
            v.tokens.push_back(tok);
        }
    return v;
}

Vector<double> count_vector(const TokenCounts& counts, const Vocabulary& vocab)
{
    Vector<double> out = Vector<double>::Zero(vocab.size());
    for (const auto& [tok, n] : counts) {
        auto it = vocab.index.find(tok);
        if (it != vocab.index.end()) out(it->second) = static_cast<double>(n);
    }
    return out;
}

BackgroundModel background_from_counts(const Vocabulary& vocab, const Vector<double>& counts, double epsilon)
{
    if (counts.size() != vocab.size()) throw Error("background: count vector does not match vocabulary");
    if (vocab.size() < 2) throw Error("background: vocabulary needs at least two tokens");
    if (!(epsilon > 0.0)) throw Error("background: epsilon must be positive");
    const Vector<double> smoothed = counts.array() + epsilon;
    BackgroundModel bg;
    bg.vocabulary = vocab.tokens;
    bg.log_probs = (smoothed / smoothed.sum()).array().log();
    return bg;
}

BackgroundModel build_background(std::span<const TokenCounts> corpora, std::int64_t vocab_min_count, double epsilon)
{
    if (corpora.size() < 2) throw Error("build_background: need at least two corpora");
    const auto vocab = build_vocabulary(corpora, vocab_min_count);
    Vector<double> pooled = Vector<double>::Zero(vocab.size());
    for (const auto& c : corpora) pooled += count_vector(c, vocab);
    if (pooled.sum() <= 0.0) throw Error("build_background: pooled corpus is empty after the vocabulary cutoff");
    return background_from_counts(vocab, pooled, epsilon);
}

namespace {

double log_sum_exp(const Vector<double>& z)
{
    const double hi = z.maxCoeff();
    return hi + std::log((z.array() - hi).exp().sum());
}

}  // namespace

double sage_objective(const Vector<double>& counts, const Vector<double>& log_background, const Vector<double>& eta,
                      double lambda)
{
    const Vector<double> z = log_background + eta;
    return counts.dot(z) - counts.sum() * log_sum_exp(z) - lambda * eta.lpNorm<1>();
}

SageWeights fit_sage(const Vector<double>& target_counts, const BackgroundModel& background, const SageOptions& opt)
{
    const Vector<double>& m = background.log_probs;
    const Index n = m.size();
    if (target_counts.size() != n) throw Error("fit_sage: count vector does not match vocabulary");
    const double total = target_counts.sum();
    if (!(total > 0.0)) throw Error("fit_sage: target corpus is empty over the vocabulary");
    if (opt.lambda < 0.0) throw Error("fit_sage: lambda must be non-negative");

    // Proximal Newton: each outer step solves the L1-penalized quadratic
    // model with Hessian N (diag(q) - q q^T) by coordinate descent, then
    // backtracks. The rank-one term is tracked through s = q . d, so a sweep
    // is O(n). Per-coordinate moves are capped so tokens far more frequent
    // than the background predicts cannot overshoot.
    constexpr double kMaxStep = 1.0;
    constexpr int kMaxHalvings = 60;
    constexpr int kMaxSweeps = 25;

    SageWeights out;
    out.lambda = opt.lambda;
    out.eta = Vector<double>::Zero(n);
    double f = sage_objective(target_counts, m, out.eta, opt.lambda);
    out.objective_trace.push_back(f);
    std::vector<double> steps;

    Vector<double> d(n);
    Vector<double> candidate(n);
    for (int it = 1; it <= opt.max_iter; ++it) {
        const Vector<double> z = m + out.eta;
        const Vector<double> q = (z.array() - log_sum_exp(z)).exp();
        const Vector<double> grad = target_counts - total * q;

        d.setZero();
        double s = 0.0;
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
            double largest = 0.0;
            for (Index w = 0; w < n; ++w) {
                const double a = std::max(total * q(w) * (1.0 - q(w)), 1e-300);
                const double rest = s - q(w) * d(w);
                const double u = out.eta(w) + d(w) + (grad(w) + total * q(w) * rest - a * d(w)) / a;
                const double thr = opt.lambda / a;
                const double x = u > thr ? u - thr : (u < -thr ? u + thr : 0.0);
                const double dw = std::clamp(x - out.eta(w), -kMaxStep, kMaxStep);
                largest = std::max(largest, std::abs(dw - d(w)));
                s = rest + q(w) * dw;
                d(w) = dw;
            }
            if (largest < 1e-12) break;
        }

        double t = 1.0;
        bool accepted = false;
        double f_new = f;
        for (int h = 0; h < kMaxHalvings; ++h) {
            candidate = out.eta + t * d;
            f_new = sage_objective(target_counts, m, candidate, opt.lambda);
            if (std::isnan(f_new))
                throw ConvergenceError("fit_sage: objective became NaN", std::abs(f), steps);
            if (f_new >= f) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        steps.push_back(t);
        out.iterations = it;
        if (!accepted) {
            out.converged = true;
            break;
        }
        const double gain = f_new - f;
        const bool moved = candidate != out.eta;
        out.eta = candidate;
        f = f_new;
        out.objective_trace.push_back(f);
        if (!moved || gain <= opt.tol * std::max(1.0, std::abs(f))) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged)
        log_warning("fit_sage: reached " + std::to_string(opt.max_iter) + " iterations without stationarity");
    return out;
}

std::unordered_set<std::string> SageLexicon::token_set() const
{
    std::unordered_set<std::string> out;
    for (const auto& e : entries) out.insert(e.first);
    return out;
}

SageLexicon top_k_lexicon(const SageWeights& weights, const std::vector<std::string>& vocabulary, std::size_t k)
{
    if (static_cast<std::size_t>(weights.eta.size()) != vocabulary.size())
        throw Error("top_k_lexicon: weights do not match vocabulary");
    SageLexicon lex;
    lex.community = weights.community;
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
        const double e = weights.eta(static_cast<Index>(i));
        if (e > 0.0) lex.entries.emplace_back(vocabulary[i], e);
    }
    std::sort(lex.entries.begin(), lex.entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (lex.entries.size() > k) lex.entries.resize(k);
    return lex;
}

double language_conformity(std::span<const std::string> tokens, const std::unordered_set<std::string>& lexicon)
{
    if (tokens.empty()) return 0.0;
    const auto hits = std::count_if(tokens.begin(), tokens.end(), [&](const std::string& t) { return lexicon.count(t) > 0; });
    return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

std::map<std::string, SageLexicon> community_lexicons(const std::map<std::string, TokenCounts>& corpora,
                                                      const SageConfig& cfg)
{
    if (corpora.size() < 2) throw Error("community_lexicons: need at least two communities");
    std::vector<std::string> names;
    std::vector<TokenCounts> counts;
    for (const auto& [name, c] : corpora) {
        names.push_back(name);
        counts.push_back(c);
    }
    const auto vocab = build_vocabulary(counts, cfg.vocab_min_count);
    if (vocab.size() < 2) throw Error("community_lexicons: vocabulary has fewer than two tokens after the cutoff");
    std::vector<Vector<double>> vectors(counts.size());
    Vector<double> pooled = Vector<double>::Zero(vocab.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        vectors[i] = count_vector(counts[i], vocab);
        pooled += vectors[i];
    }

    std::vector<SageLexicon> lexicons(names.size());
    parallel_for(names.size(), [&](std::size_t i) {
        lexicons[i].community = names[i];
        if (vectors[i].sum() <= 0.0) return;
        const auto bg = background_from_counts(vocab, pooled - vectors[i], cfg.epsilon);
        auto weights = fit_sage(vectors[i], bg, cfg.fit);
        weights.community = names[i];
        lexicons[i] = top_k_lexicon(weights, vocab.tokens, cfg.lexicon_size);
    });

    std::map<std::string, SageLexicon> out;
    for (auto& l : lexicons) out.emplace(l.community, std::move(l));
    return out;
}

void write_lexicons(const std::filesystem::path& path, const std::map<std::string, SageLexicon>& lexicons)
{
    csv::Writer w(path);
    w.row({"community", "rank", "token", "eta"});
    for (const auto& [name, lex] : lexicons)
        for (std::size_t r = 0; r < lex.entries.size(); ++r)
            w.row({name, std::to_string(r + 1), lex.entries[r].first, csv::format_double(lex.entries[r].second)});
}

std::map<std::string, SageLexicon> read_lexicons(const std::filesystem::path& path)
{
    csv::Row header;
    std::map<std::string, SageLexicon> out;
    for (const auto& r : csv::read_file(path, &header)) {
        if (r.size() != 4) throw Error("malformed lexicon row in " + path.string());
        auto& lex = out[r[0]];
        lex.community = r[0];
        lex.entries.emplace_back(r[2], std::stod(r[3]));
    }
    return out;
}

}  // namespace ctpath
