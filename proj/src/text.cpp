#include "ctpath/text.hpp"

#include <algorithm>
#include <cctype>

namespace ctpath {

namespace {

bool starts_url(std::string_view s, std::size_t i)
{
    auto rest = s.substr(i);
    auto has = [&](std::string_view p) {
        if (rest.size() < p.size()) return false;
        for (std::size_t k = 0; k < p.size(); ++k)
            if (std::tolower(static_cast<unsigned char>(rest[k])) != p[k]) return false;
        return true;
    };
    return has("http://") || has("https://") || has("www.");
}

bool word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

void emit(std::string& tok, std::vector<std::string>& out)
{
    // Length counts bytes, so a lone multi-byte character survives.
    const bool numeric = std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (tok.size() > 1 && !numeric) out.push_back(tok);
    tok.clear();
}

}  // namespace

void tokenize_into(std::string_view text, std::vector<std::string>& out)
{
    std::string tok;
    std::size_t i = 0;
    while (i < text.size()) {
        if (tok.empty() && starts_url(text, i)) {
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
            continue;
        }
        const auto c = static_cast<unsigned char>(text[i]);
        if (word_byte(c)) {
            tok += static_cast<char>(std::tolower(c));
        } else if (c == '\'' && !tok.empty() && i + 1 < text.size() &&
                   word_byte(static_cast<unsigned char>(text[i + 1]))) {
            // internal apostrophe: join the halves
        } else if (!tok.empty()) {
            emit(tok, out);
        }
        ++i;
    }
    if (!tok.empty()) emit(tok, out);
}

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> out;
    tokenize_into(text, out);
    return out;
}

}  // namespace ctpath
