#include "support.hpp"

#include "ctpath/sage.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace ctpath;

namespace {

BackgroundModel background_of(const std::vector<double>& probs)
{
    BackgroundModel b;
    b.log_probs.resize(static_cast<Index>(probs.size()));
    for (std::size_t i = 0; i < probs.size(); ++i) {
        b.vocabulary.push_back("t" + std::to_string(i));
        b.log_probs(static_cast<Index>(i)) = std::log(probs[i]);
    }
    return b;
}

}  // namespace

TEST_CASE("background normalization")
{
    const std::vector<TokenCounts> corpora{{{"a", 2}, {"b", 2}}, {{"a", 2}, {"b", 2}}};
    const auto bg = build_background(corpora, 1, 1.0);
    REQUIRE(bg.vocabulary == std::vector<std::string>{"a", "b"});
    CHECK(bg.log_probs(0) == Catch::Approx(std::log(0.5)).epsilon(1e-15));
    CHECK(bg.log_probs(1) == Catch::Approx(std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("vocabulary cutoff")
{
    const std::vector<TokenCounts> corpora{{{"rare", 4}, {"common", 8}}, {{"rare", 5}, {"common", 8}}};
    const auto v = build_vocabulary(corpora, 10);
    CHECK(v.tokens == std::vector<std::string>{"common"});
    const std::vector<TokenCounts> single{{{"a", 20}}};
    CHECK_THROWS_AS(build_background(single, 1), Error);
}

TEST_CASE("very large lambda keeps eta at zero")
{
    const auto bg = background_of({0.25, 0.25, 0.5});
    const Vector<double> counts = (Vector<double>(3) << 90, 5, 5).finished();
    SageOptions opt;
    opt.lambda = 1e6;
    const auto w = fit_sage(counts, bg, opt);
    CHECK(w.eta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a target matching the background keeps eta at zero")
{
    const auto bg = background_of({0.2, 0.3, 0.5});
    const Vector<double> counts = (Vector<double>(3) << 20, 30, 50).finished();
    SageOptions opt;
    opt.lambda = 0.5;
    CHECK(fit_sage(counts, bg, opt).eta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit agrees with a grid search on a small vocabulary")
{
    // Background from one count of every token; the first token is planted.
    const auto bg = background_of({0.25, 0.25, 0.25, 0.25});
    const Vector<double> counts = (Vector<double>(4) << 50, 10, 12, 8).finished();
    SageOptions opt;
    opt.lambda = 2.0;
    const auto fit = fit_sage(counts, bg, opt);
    const double f_fit = sage_objective(counts, bg.log_probs, fit.eta, opt.lambda);

    // Exhaustive grid over eta in [-2, 3]^4.
    const double step = 0.1;
    const int steps = 51;
    double best = -std::numeric_limits<double>::infinity();
    Vector<double> best_eta(4);
    Vector<double> eta(4);
    for (int a = 0; a < steps; ++a)
        for (int b = 0; b < steps; ++b)
            for (int c = 0; c < steps; ++c)
                for (int d = 0; d < steps; ++d) {
                    eta << -2 + a * step, -2 + b * step, -2 + c * step, -2 + d * step;
                    const double f = sage_objective(counts, bg.log_probs, eta, opt.lambda);
                    if (f > best) {
                        best = f;
                        best_eta = eta;
                    }
                }
    CHECK(f_fit >= best - 1e-9);
    CHECK((fit.eta - best_eta).cwiseAbs().maxCoeff() <= step);
    Index top = 0;
    fit.eta.maxCoeff(&top);
    CHECK(top == 0);
    CHECK(fit.eta(0) > 0.0);
}

TEST_CASE("objective never decreases across iterations")
{
    const auto planted = testing::planted_lexicon_corpus(2);
    std::vector<TokenCounts> others;
    for (const auto& [name, c] : planted.corpora)
        if (name != "target") others.push_back(c);
    TokenCounts pooled;
    for (const auto& c : others)
        for (const auto& [t, n] : c) pooled[t] += n;
    const std::vector<TokenCounts> both{planted.corpora.at("target"), pooled};
    const auto vocab = build_vocabulary(both, 1);
    const auto bg = background_from_counts(vocab, count_vector(pooled, vocab));
    for (double lambda : {0.1, 1.0, 10.0}) {
        SageOptions opt;
        opt.lambda = lambda;
        const auto w = fit_sage(count_vector(planted.corpora.at("target"), vocab), bg, opt);
        CHECK(w.converged);
        for (std::size_t i = 1; i < w.objective_trace.size(); ++i)
            CHECK(w.objective_trace[i] >= w.objective_trace[i - 1]);
    }
}

TEST_CASE("planted tokens lead the lexicon")
{
    const auto planted = testing::planted_lexicon_corpus(3);
    SageConfig cfg;
    cfg.vocab_min_count = 1;
    cfg.lexicon_size = 10;
    const auto lex = community_lexicons(planted.corpora, cfg);
    const auto& target = lex.at("target");
    REQUIRE(target.entries.size() <= 10);
    int hits = 0;
    for (const auto& [token, eta] : target.entries)
        hits += std::find(planted.planted.begin(), planted.planted.end(), token) != planted.planted.end();
    CHECK(hits >= 8);
}

TEST_CASE("lexicon truncation and ties")
{
    SageWeights w;
    w.eta = (Vector<double>(5) << 0.5, -1.0, 0.5, 0.0, 2.0).finished();
    const std::vector<std::string> vocab{"b", "x", "a", "z", "c"};
    const auto lex = top_k_lexicon(w, vocab, 1000);
    REQUIRE(lex.entries.size() == 3);
    CHECK(lex.entries[0].first == "c");
    CHECK(lex.entries[1].first == "a");
    CHECK(lex.entries[2].first == "b");
    CHECK(top_k_lexicon(w, vocab, 1).entries.size() == 1);
}

TEST_CASE("language conformity fixtures")
{
    std::vector<std::string> tokens;
    for (int i = 0; i < 20; ++i) tokens.push_back(i < 5 ? "in" + std::to_string(i) : "out" + std::to_string(i));
    const std::unordered_set<std::string> lex{"in0", "in1", "in2", "in3", "in4"};
    CHECK(language_conformity(tokens, lex) == 0.25);
    CHECK(language_conformity(tokens, {}) == 0.0);
    const std::vector<std::string> all{"in0", "in1"};
    CHECK(language_conformity(all, lex) == 1.0);
    CHECK(language_conformity(std::vector<std::string>{}, lex) == 0.0);
}

TEST_CASE("lexicon csv round trip")
{
    testing::TempDir dir("lex");
    std::map<std::string, SageLexicon> lex;
    lex["A"].community = "A";
    lex["A"].entries = {{"alpha", 1.5}, {"beta", 0.25}};
    write_lexicons(dir / "l.csv", lex);
    const auto back = read_lexicons(dir / "l.csv");
    REQUIRE(back.count("A"));
    CHECK(back.at("A").entries == lex.at("A").entries);
}
