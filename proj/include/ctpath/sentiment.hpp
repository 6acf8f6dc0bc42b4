#ifndef CTPATH_SENTIMENT_HPP
#define CTPATH_SENTIMENT_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace ctpath {

/// Rule set for the lexicon-based compound sentiment score. Lexicon keys
/// are lowercase.
struct SentimentRules {
    std::unordered_map<std::string, double> valence;
    /// Intensifiers and dampeners: word -> scalar added to the following
    /// sentiment word's magnitude.
    std::unordered_map<std::string, double> boosters;
    std::unordered_set<std::string> negations;
    int negation_window = 3;
    double negation_scalar = -0.74;
    double caps_increment = 0.733;
    double exclamation_increment = 0.292;
    int max_exclamations = 4;
    double question_increment = 0.18;
    double question_cap = 0.96;
    double but_before = 0.5;
    double but_after = 1.5;
    double alpha = 15.0;
};

/// Booster, negation and constant defaults with a small open valence list.
SentimentRules default_sentiment_rules();

/// Replaces `rules.valence` with a "token<TAB>mean[<TAB>...]" lexicon file.
void load_valence_lexicon(const std::filesystem::path& path, SentimentRules& rules);

/// Normalized compound score s / sqrt(s^2 + alpha) in [-1, 1]; 0 for text
/// without sentiment words.
double compound_sentiment(std::string_view text, const SentimentRules& rules);

}  // namespace ctpath

#endif  // CTPATH_SENTIMENT_HPP
