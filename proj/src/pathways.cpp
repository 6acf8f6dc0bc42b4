#include "ctpath/pathways.hpp"

#include "ctpath/csv.hpp"
#include "ctpath/stats.hpp"

#include <json.hpp>

#include <fstream>

namespace ctpath {

using nlohmann::json;

double weighted_engagement(std::span<const Contribution* const> batch, const SubredditScale& scale,
                           bool clip_at_zero)
{
    if (batch.empty()) return 0.0;
    double sum = 0.0;
    for (const auto* c : batch) {
        auto s = scale.score(c->community);
        if (!s) continue;
        sum += clip_at_zero ? std::max(0.0, *s) : *s;
    }
    return sum / static_cast<double>(batch.size());
}

double engagement_score(const UserTimeline& timeline, int decile, const SubredditScale& scale, bool clip_at_zero)
{
    if (decile < 0 || decile >= kDeciles) throw Error("engagement_score: decile out of range");
    return weighted_engagement(timeline.decile(decile), scale, clip_at_zero);
}

Series engagement_trajectory(const UserTimeline& timeline, const SubredditScale& scale, bool clip_at_zero)
{
    Series s(kDeciles);
    for (int d = 0; d < kDeciles; ++d) s(d) = engagement_score(timeline, d, scale, clip_at_zero);
    return s;
}

void write_trajectories(const std::filesystem::path& path, const TrajectorySet& set)
{
    csv::Writer w(path);
    csv::Row header{"user"};
    for (int d = 1; d <= kDeciles; ++d) header.push_back("c" + std::to_string(d));
    w.row(header);
    for (std::size_t i = 0; i < set.users.size(); ++i) {
        csv::Row r{set.users[i]};
        for (Index d = 0; d < set.series[i].size(); ++d) r.push_back(csv::format_double(set.series[i](d)));
        w.row(r);
    }
}

TrajectorySet read_trajectories(const std::filesystem::path& path)
{
    csv::Row header;
    TrajectorySet set;
    for (const auto& r : csv::read_file(path, &header)) {
        if (r.size() != header.size() || r.size() < 2) throw Error("malformed trajectory row in " + path.string());
        set.users.push_back(r[0]);
        Series s(static_cast<Index>(r.size() - 1));
        for (std::size_t j = 1; j < r.size(); ++j) s(static_cast<Index>(j - 1)) = std::stod(r[j]);
        set.series.push_back(std::move(s));
    }
    return set;
}

std::string_view to_string(Pathway p)
{
    switch (p) {
    case Pathway::steady_high: return "steady_high";
    case Pathway::increasing: return "increasing";
    case Pathway::decreasing: return "decreasing";
    case Pathway::steady_low: return "steady_low";
    }
    return "unknown";
}

std::optional<Pathway> parse_pathway(std::string_view s)
{
    for (auto p : kPathways)
        if (to_string(p) == s) return p;
    return std::nullopt;
}

BarycenterShape barycenter_shape(const Series& barycenter)
{
    const Index n = barycenter.size();
    if (n < 3) throw Error("barycenter_shape: at least 3 points are required");
    const Series x = Series::LinSpaced(n, 1.0, static_cast<double>(n));
    return {ols(x, barycenter).slope, barycenter.mean()};
}

Pathway classify_barycenter(const Series& barycenter, const LabelOptions& opt)
{
    const auto shape = barycenter_shape(barycenter);
    if (std::abs(shape.slope) < opt.slope_tol)
        return shape.level >= opt.level_split ? Pathway::steady_high : Pathway::steady_low;
    return shape.slope > 0.0 ? Pathway::increasing : Pathway::decreasing;
}

PathwayAssignment label_pathways(const ClusterModel<double>& model, const LabelOptions& opt)
{
    PathwayAssignment out;
    for (const auto& b : model.barycenters) out.cluster_labels.push_back(classify_barycenter(b, opt));
    out.clusters = model.assignments;
    out.labels.reserve(model.assignments.size());
    for (int c : model.assignments) out.labels.push_back(out.cluster_labels[static_cast<std::size_t>(c)]);
    return out;
}

void write_model_json(const std::filesystem::path& path, const ClusterModel<double>& model,
                      const PathwayAssignment& labels, const TrajectorySet& set, const KSelection* selection)
{
    json j;
    j["k"] = model.k;
    j["seed"] = model.seed;
    j["inertia"] = model.inertia;
    j["iterations"] = model.iterations;
    j["converged"] = model.converged;
    json bary = json::array();
    for (std::size_t c = 0; c < model.barycenters.size(); ++c) {
        const auto& b = model.barycenters[c];
        const auto shape = barycenter_shape(b);
        bary.push_back({{"cluster", c},
                        {"values", std::vector<double>(b.data(), b.data() + b.size())},
                        {"slope", shape.slope},
                        {"level", shape.level},
                        {"pathway", to_string(labels.cluster_labels[c])}});
    }
    j["barycenters"] = bary;
    json users = json::array();
    for (std::size_t i = 0; i < set.users.size(); ++i)
        users.push_back({{"user", set.users[i]}, {"cluster", labels.clusters[i]}, {"pathway", to_string(labels.labels[i])}});
    j["assignments"] = users;
    if (selection) j["silhouette"] = {{"k", selection->ks}, {"score", selection->silhouettes}, {"chosen_k", selection->chosen_k}};

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::map<std::string, Pathway> read_pathway_labels(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    json j = json::parse(in);
    std::map<std::string, Pathway> out;
    for (const auto& a : j.at("assignments")) {
        auto p = parse_pathway(a.at("pathway").get<std::string>());
        if (!p) throw Error("unknown pathway label in " + path.string());
        out[a.at("user").get<std::string>()] = *p;
    }
    return out;
}

}  // namespace ctpath
