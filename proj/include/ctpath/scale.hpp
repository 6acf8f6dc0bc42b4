#ifndef CTPATH_SCALE_HPP
#define CTPATH_SCALE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ctpath {

/// Community -> scalar score. Backs both the similarity scale and the
/// generality scale.
struct SubredditScale {
    std::string anchor;
    std::unordered_map<std::string, double> values;

    std::optional<double> score(const std::string& community) const
    {
        auto it = values.find(community);
        if (it == values.end()) return std::nullopt;
        return it->second;
    }

    bool contains(const std::string& community) const { return values.count(community) != 0; }
    std::size_t size() const noexcept { return values.size(); }

    /// Entries sorted by descending score, ties by community name.
    std::vector<std::pair<std::string, double>> ranked() const;
};

/// CSV with header `community,<column>`, rows sorted descending.
void write_scale_csv(const std::filesystem::path& path, const SubredditScale& scale,
                     const std::string& column);
SubredditScale read_scale_csv(const std::filesystem::path& path);

}  // namespace ctpath

#endif  // CTPATH_SCALE_HPP
