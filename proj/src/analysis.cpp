#include "ctpath/analysis.hpp"

#include "ctpath/csv.hpp"
#include "ctpath/stats.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>

namespace ctpath {

using nlohmann::json;

namespace {

bool in_pathway(const FeatureMatrix& m, std::size_t u, const std::map<std::string, Pathway>& labels, Pathway p)
{
    auto it = labels.find(m.users()[u]);
    return it != labels.end() && it->second == p;
}

}  // namespace

TrendFit fit_trend(const FeatureMatrix& m, const std::map<std::string, Pathway>& labels, Pathway pathway,
                   Feature feature, Region region, TrendMode mode)
{
    TrendFit fit;
    fit.pathway = pathway;
    fit.feature = feature;
    fit.region = region;

    if (mode == TrendMode::pooled) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t u = 0; u < m.user_count(); ++u) {
            if (!in_pathway(m, u, labels, pathway)) continue;
            for (int d = 0; d < kDeciles; ++d)
                if (auto v = m.get(u, d, feature, region)) {
                    xs.push_back(d + 1);
                    ys.push_back(*v);
                }
        }
        if (xs.size() < 3)
            throw Error("fit_trend: fewer than 3 points for " + std::string(to_string(pathway)) + "/" +
                        std::string(to_string(feature)) + "/" + std::string(to_string(region)));
        const auto o = ols(Eigen::Map<const Vector<double>>(xs.data(), static_cast<Index>(xs.size())),
                           Eigen::Map<const Vector<double>>(ys.data(), static_cast<Index>(ys.size())));
        fit.beta = o.slope;
        fit.std_error = o.stderr_slope;
        fit.p_value = o.p_value;
        fit.n = o.n;
        return fit;
    }

    std::vector<double> slopes;
    for (std::size_t u = 0; u < m.user_count(); ++u) {
        if (!in_pathway(m, u, labels, pathway)) continue;
        std::vector<double> xs;
        std::vector<double> ys;
        for (int d = 0; d < kDeciles; ++d)
            if (auto v = m.get(u, d, feature, region)) {
                xs.push_back(d + 1);
                ys.push_back(*v);
            }
        if (xs.size() < 3) continue;
        slopes.push_back(ols(Eigen::Map<const Vector<double>>(xs.data(), static_cast<Index>(xs.size())),
                             Eigen::Map<const Vector<double>>(ys.data(), static_cast<Index>(ys.size())))
                             .slope);
    }
    if (slopes.size() < 2) throw Error("fit_trend: fewer than 2 users with 3 or more points");
    const Eigen::Map<const Vector<double>> s(slopes.data(), static_cast<Index>(slopes.size()));
    const double n = static_cast<double>(slopes.size());
    const double mean = s.mean();
    const double sd = std::sqrt((s.array() - mean).square().sum() / (n - 1.0));
    fit.beta = mean;
    fit.std_error = sd / std::sqrt(n);
    fit.p_value = fit.std_error > 0.0 ? t_test_p_value(mean / fit.std_error, n - 1.0) : (mean == 0.0 ? 1.0 : 0.0);
    fit.n = slopes.size();
    return fit;
}

std::vector<TrendFit> fit_all_trends(const FeatureMatrix& m, const std::map<std::string, Pathway>& labels,
                                     TrendMode mode)
{
    std::vector<TrendFit> out;
    for (Pathway p : kPathways)
        for (Feature f : kFeatures)
            for (Region r : kRegions) {
                try {
                    out.push_back(fit_trend(m, labels, p, f, r, mode));
                } catch (const Error&) {
                    // Too little data for this cell; it is left out of the report.
                }
            }
    return out;
}

DecileValues decile_values(const FeatureMatrix& m, std::size_t user, Feature f, Region r)
{
    DecileValues v;
    for (int d = 0; d < kDeciles; ++d) v[static_cast<std::size_t>(d)] = m.get(user, d, f, r);
    return v;
}

std::optional<int> peak_decile(const DecileValues& values)
{
    std::optional<int> best;
    double best_value = 0.0;
    for (int d = 0; d < kDeciles; ++d) {
        const auto& v = values[static_cast<std::size_t>(d)];
        if (!v) continue;
        if (!best || *v > best_value) {
            best = d + 1;
            best_value = *v;
        }
    }
    return best;
}

namespace {

void normalize(std::pair<Histogram, std::size_t>& h)
{
    if (h.second == 0) return;
    for (double& b : h.first) b /= static_cast<double>(h.second);
}

}  // namespace

PeakDistribution peak_distribution(const FeatureMatrix& m, const std::map<std::string, Pathway>& labels)
{
    PeakDistribution out;
    for (std::size_t u = 0; u < m.user_count(); ++u) {
        auto label = labels.find(m.users()[u]);
        if (label == labels.end()) continue;
        for (Feature f : kFeatures)
            for (Region r : kRegions)
                if (auto peak = peak_decile(decile_values(m, u, f, r))) {
                    auto& h = out.histograms[{label->second, f, r}];
                    h.first[static_cast<std::size_t>(*peak - 1)] += 1.0;
                    ++h.second;
                }
    }
    for (auto& [_, h] : out.histograms) normalize(h);
    return out;
}

std::string_view to_string(Phase p)
{
    switch (p) {
    case Phase::reflection: return "reflection";
    case Phase::exploration: return "exploration";
    case Phase::connection: return "connection";
    }
    return "";
}

Phase phase_of(Feature f)
{
    switch (f) {
    case Feature::anger:
    case Feature::anxiety:
    case Feature::emotionality: return Phase::reflection;
    case Feature::generalist: return Phase::exploration;
    case Feature::conformity:
    case Feature::thread_diversity:
    case Feature::comment_rank:
    case Feature::affiliation: return Phase::connection;
    }
    return Phase::connection;
}

PhaseSummary phase_progression(const FeatureMatrix& m, const std::map<std::string, Pathway>& labels)
{
    PhaseSummary out;
    for (std::size_t u = 0; u < m.user_count(); ++u) {
        auto label = labels.find(m.users()[u]);
        if (label == labels.end()) continue;
        for (Feature f : kFeatures)
            for (Region r : kRegions)
                if (auto peak = peak_decile(decile_values(m, u, f, r))) {
                    auto& h = out.densities[{label->second, phase_of(f), r}];
                    h.first[static_cast<std::size_t>(*peak - 1)] += 1.0;
                    ++h.second;
                }
    }
    for (auto& [_, h] : out.densities) normalize(h);
    return out;
}

SpearmanResult scale_correlation_check(const SubredditScale& similarity, const SubredditScale& generality)
{
    return rank_correlation(similarity, generality);
}

BannedVolume banned_volume_report(std::span<const Contribution> contribs, std::span<const std::string> banned)
{
    BannedVolume out;
    out.contributions = contribs.size();
    std::map<std::string, std::size_t> counts;
    for (const auto& b : banned) counts[b] = 0;
    for (const auto& c : contribs) {
        auto it = counts.find(c.community);
        if (it != counts.end()) ++it->second;
    }
    for (const auto& [name, n] : counts) {
        const double f = contribs.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(contribs.size());
        out.fractions[name] = f;
        out.total += f;
    }
    return out;
}

std::vector<std::string> read_community_list(const std::filesystem::path& path)
{
    std::vector<std::string> out;
    for (const auto& r : csv::read_file(path)) {
        if (r.empty() || r[0].empty()) continue;
        if (out.empty() && r[0] == "community") continue;
        out.push_back(r[0]);
    }
    return out;
}

void write_trends_csv(const std::filesystem::path& path, std::span<const TrendFit> fits, double alpha)
{
    csv::Writer w(path);
    w.row({"pathway", "feature", "region", "beta", "stderr", "p", "n", "significant"});
    for (const auto& f : fits)
        w.row({to_string(f.pathway), to_string(f.feature), to_string(f.region), csv::format_double(f.beta),
               csv::format_double(f.std_error), csv::format_double(f.p_value), std::to_string(f.n),
               f.significant(alpha) ? "yes" : "NS"});
}

std::vector<TrendFit> read_trends_csv(const std::filesystem::path& path)
{
    csv::Row header;
    std::vector<TrendFit> out;
    for (const auto& r : csv::read_file(path, &header)) {
        const auto p = r.size() >= 7 ? parse_pathway(r[0]) : std::nullopt;
        const auto f = r.size() >= 7 ? parse_feature(r[1]) : std::nullopt;
        const auto g = r.size() >= 7 ? parse_region(r[2]) : std::nullopt;
        if (!p || !f || !g) throw Error("malformed trend row in " + path.string());
        TrendFit t;
        t.pathway = *p;
        t.feature = *f;
        t.region = *g;
        t.beta = std::stod(r[3]);
        t.std_error = std::stod(r[4]);
        t.p_value = std::stod(r[5]);
        t.n = std::stoul(r[6]);
        out.push_back(t);
    }
    return out;
}

void write_peaks_csv(const std::filesystem::path& path, const PeakDistribution& peaks)
{
    csv::Writer w(path);
    w.row({"pathway", "feature", "region", "decile", "density", "users"});
    for (const auto& [key, h] : peaks.histograms)
        for (int d = 0; d < kDeciles; ++d)
            w.row({to_string(key.pathway), to_string(key.feature), to_string(key.region), std::to_string(d + 1),
                   csv::format_double(h.first[static_cast<std::size_t>(d)]), std::to_string(h.second)});
}

void write_phase_csv(const std::filesystem::path& path, const PhaseSummary& summary)
{
    csv::Writer w(path);
    w.row({"pathway", "phase", "region", "decile", "density", "observations"});
    for (const auto& [key, h] : summary.densities)
        for (int d = 0; d < kDeciles; ++d)
            w.row({to_string(key.pathway), to_string(key.phase), to_string(key.region), std::to_string(d + 1),
                   csv::format_double(h.first[static_cast<std::size_t>(d)]), std::to_string(h.second)});
}

PhaseSummary read_phase_csv(const std::filesystem::path& path)
{
    csv::Row header;
    PhaseSummary out;
    for (const auto& r : csv::read_file(path, &header)) {
        if (r.size() != 6) throw Error("malformed phase row in " + path.string());
        const auto p = parse_pathway(r[0]);
        std::optional<Phase> phase;
        for (Phase ph : kPhases)
            if (to_string(ph) == r[1]) phase = ph;
        const auto g = parse_region(r[2]);
        const int d = std::stoi(r[3]);
        if (!p || !phase || !g || d < 1 || d > kDeciles) throw Error("malformed phase row in " + path.string());
        auto& h = out.densities[{*p, *phase, *g}];
        h.first[static_cast<std::size_t>(d - 1)] = std::stod(r[4]);
        h.second = std::stoul(r[5]);
    }
    return out;
}

std::map<Pathway, std::pair<Series, std::size_t>> mean_trajectories(const TrajectorySet& set,
                                                                    const std::map<std::string, Pathway>& labels)
{
    std::map<Pathway, std::pair<Series, std::size_t>> out;
    for (std::size_t i = 0; i < set.users.size(); ++i) {
        auto label = labels.find(set.users[i]);
        if (label == labels.end()) continue;
        auto [it, fresh] = out.try_emplace(label->second, Series::Zero(set.series[i].size()), 0);
        it->second.first += set.series[i];
        ++it->second.second;
    }
    for (auto& [_, acc] : out) acc.first /= static_cast<double>(acc.second);
    return out;
}

namespace {

void write_json(const std::filesystem::path& path, const json& doc)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

json vega_header(const std::string& title)
{
    return {{"$schema", "https://vega.github.io/schema/vega-lite/v5.json"}, {"title", title}};
}

}  // namespace

std::vector<std::filesystem::path> write_plot_specs(const std::filesystem::path& dir, const TrajectorySet& set,
                                                    const std::map<std::string, Pathway>& labels,
                                                    std::span<const TrendFit> trends, const PhaseSummary& phases,
                                                    double alpha)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;

    {
        json values = json::array();
        for (const auto& [p, acc] : mean_trajectories(set, labels))
            for (Index d = 0; d < acc.first.size(); ++d)
                values.push_back({{"pathway", to_string(p)}, {"decile", d + 1}, {"engagement", acc.first(d)},
                                  {"users", acc.second}});
        json doc = vega_header("Mean engagement trajectory per pathway");
        doc["data"] = {{"values", values}};
        doc["mark"] = {{"type", "line"}, {"point", true}};
        doc["encoding"] = {{"x", {{"field", "decile"}, {"type", "ordinal"}}},
                           {"y", {{"field", "engagement"}, {"type", "quantitative"}}},
                           {"color", {{"field", "pathway"}, {"type", "nominal"}}}};
        written.push_back(dir / "trajectories.vl.json");
        write_json(written.back(), doc);
    }
    {
        json values = json::array();
        for (const auto& f : trends)
            values.push_back({{"pathway", to_string(f.pathway)}, {"feature", to_string(f.feature)},
                              {"region", to_string(f.region)}, {"beta", f.beta}, {"stderr", f.std_error},
                              {"p", f.p_value}, {"label", f.significant(alpha) ? csv::format_double(f.beta) : "NS"}});
        json doc = vega_header("Feature trend over deciles");
        doc["data"] = {{"values", values}};
        doc["mark"] = "bar";
        doc["encoding"] = {{"x", {{"field", "pathway"}, {"type", "nominal"}}},
                           {"y", {{"field", "beta"}, {"type", "quantitative"}}},
                           {"color", {{"field", "region"}, {"type", "nominal"}}},
                           {"row", {{"field", "feature"}, {"type", "nominal"}}},
                           {"tooltip", {{{"field", "label"}, {"type", "nominal"}}}}};
        written.push_back(dir / "trends.vl.json");
        write_json(written.back(), doc);
    }
    {
        json values = json::array();
        for (const auto& [key, h] : phases.densities)
            for (int d = 0; d < kDeciles; ++d)
                values.push_back({{"pathway", to_string(key.pathway)}, {"phase", to_string(key.phase)},
                                  {"region", to_string(key.region)}, {"decile", d + 1},
                                  {"density", h.first[static_cast<std::size_t>(d)]}});
        json doc = vega_header("Peak-decile density per phase");
        doc["data"] = {{"values", values}};
        doc["mark"] = {{"type", "line"}, {"interpolate", "step"}};
        doc["encoding"] = {{"x", {{"field", "decile"}, {"type", "ordinal"}}},
                           {"y", {{"field", "density"}, {"type", "quantitative"}}},
                           {"color", {{"field", "phase"}, {"type", "nominal"}}},
                           {"row", {{"field", "pathway"}, {"type", "nominal"}}},
                           {"column", {{"field", "region"}, {"type", "nominal"}}}};
        written.push_back(dir / "phases.vl.json");
        write_json(written.back(), doc);
    }
    return written;
}

}  // namespace ctpath
