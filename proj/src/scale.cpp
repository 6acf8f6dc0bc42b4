#include "ctpath/scale.hpp"

#include "ctpath/common.hpp"
#include "ctpath/csv.hpp"

#include <algorithm>

namespace ctpath {

std::vector<std::pair<std::string, double>> SubredditScale::ranked() const
{
    std::vector<std::pair<std::string, double>> out(values.begin(), values.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

void write_scale_csv(const std::filesystem::path& path, const SubredditScale& scale,
                     const std::string& column)
{
    csv::Writer w(path);
    w.row({"community", column});
    for (const auto& [name, v] : scale.ranked()) w.row({name, csv::format_double(v)});
}

SubredditScale read_scale_csv(const std::filesystem::path& path)
{
    csv::Row header;
    auto rows = csv::read_file(path, &header);
    SubredditScale scale;
    for (const auto& r : rows) {
        if (r.size() < 2) throw Error("malformed scale row in " + path.string());
        scale.values[r[0]] = std::stod(r[1]);
    }
    if (!rows.empty()) scale.anchor = rows.front()[0];
    return scale;
}

}  // namespace ctpath
