#ifndef CTPATH_TEXT_HPP
#define CTPATH_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace ctpath {

/// Lowercased word tokens with URLs removed, split on whitespace and
/// punctuation. Apostrophes inside a word are dropped ("don't" -> "dont").
/// Tokens of length 1 and pure numbers are discarded.
std::vector<std::string> tokenize(std::string_view text);

/// Appends tokenize(text) to `out`.
void tokenize_into(std::string_view text, std::vector<std::string>& out);

}  // namespace ctpath

#endif  // CTPATH_TEXT_HPP
