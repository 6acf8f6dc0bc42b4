#ifndef CTPATH_LEXICON_HPP
#define CTPATH_LEXICON_HPP

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ctpath {

/// Literal tokens plus prefix patterns ("angr*"), matched against
/// tokenize() output.
class CategoryMatcher {
public:
    CategoryMatcher() = default;
    explicit CategoryMatcher(std::span<const std::string> patterns);

    bool matches(std::string_view token) const;
    bool empty() const noexcept { return literals_.empty() && prefixes_.empty(); }

private:
    std::unordered_set<std::string> literals_;
    std::unordered_set<std::string> prefixes_;
};

/// category -> patterns. Patterns are lowercased with apostrophes removed,
/// and a wildcard may only appear in terminal position.
struct LexiconSet {
    std::map<std::string, std::vector<std::string>> categories;

    /// Throws ctpath::Error naming the category if it is absent.
    CategoryMatcher matcher(const std::string& category) const;
    void validate() const;
};

/// Canonical pattern form; throws on an empty pattern or a non-terminal '*'.
std::string normalize_pattern(std::string_view pattern);

/// "%"-delimited category dictionary: a header block of "id<TAB>name"
/// lines between two "%" lines, then "pattern<TAB>id..." lines.
/// Multi-word entries are skipped.
LexiconSet parse_category_dictionary(std::string_view text);

/// Two-column CSV: category,pattern (header optional).
LexiconSet parse_lexicon_csv(std::string_view text);

/// Dispatches on extension: ".csv" uses the CSV form, anything else the
/// dictionary form.
LexiconSet load_lexicon(const std::filesystem::path& path);

/// Small open word lists for anger, anxiety and affiliation, used when no
/// dictionary file is configured.
LexiconSet standin_lexicon();

/// Matched token occurrences over all tokens; 0 for no tokens.
double lexicon_rate(std::span<const std::string> tokens, const CategoryMatcher& category);

}  // namespace ctpath

#endif  // CTPATH_LEXICON_HPP
