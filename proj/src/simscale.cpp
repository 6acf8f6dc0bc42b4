#include "ctpath/simscale.hpp"

#include "ctpath/stats.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace ctpath {

std::vector<std::string> embedding_cohort(const Corpus& corpus, const std::string& anchor,
                                          const std::string& contrast, std::size_t min_comments)
{
    if (anchor == contrast) throw Error("embedding cohort: anchor and contrast must differ");
    std::vector<std::string> out;
    for (const auto& user : corpus.users()) {
        std::size_t in_anchor = 0;
        std::size_t in_contrast = 0;
        for (const auto* c : corpus.by_user(user)) {
            if (!c->is_comment()) continue;
            if (c->community == anchor) ++in_anchor;
            else if (c->community == contrast) ++in_contrast;
        }
        if (in_anchor >= min_comments || in_contrast >= min_comments) out.push_back(user);
    }
    if (out.empty()) throw Error("embedding cohort is empty for " + anchor + " / " + contrast);
    return out;
}

std::size_t CooccurrenceStats::joint_count(Index a, Index b) const
{
    if (a == b) return counts[static_cast<std::size_t>(a)];
    auto it = joint.find(a < b ? std::pair{a, b} : std::pair{b, a});
    return it == joint.end() ? 0 : it->second;
}

CooccurrenceStats cooccurrence(std::span<const std::set<std::string>> user_communities,
                               const std::set<std::string>& restrict)
{
    std::set<std::string> names;
    for (const auto& s : user_communities)
        for (const auto& c : s)
            if (restrict.empty() || restrict.count(c)) names.insert(c);

    CooccurrenceStats stats;
    stats.n_users = user_communities.size();
    stats.communities.assign(names.begin(), names.end());
    stats.counts.assign(stats.communities.size(), 0);
    std::unordered_map<std::string, Index> index;
    for (std::size_t i = 0; i < stats.communities.size(); ++i) index[stats.communities[i]] = static_cast<Index>(i);

    std::vector<Index> ids;
    for (const auto& s : user_communities) {
        ids.clear();
        for (const auto& c : s) {
            auto it = index.find(c);
            if (it != index.end()) ids.push_back(it->second);
        }
        std::sort(ids.begin(), ids.end());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            ++stats.counts[static_cast<std::size_t>(ids[i])];
            for (std::size_t j = i + 1; j < ids.size(); ++j) ++stats.joint[{ids[i], ids[j]}];
        }
    }
    return stats;
}

CooccurrenceStats cooccurrence(const Corpus& corpus, std::span<const std::string> users,
                               const std::set<std::string>& restrict)
{
    std::vector<std::set<std::string>> sets(users.size());
    parallel_for(users.size(), [&](std::size_t i) {
        for (const auto* c : corpus.by_user(users[i])) sets[i].insert(c->community);
    });
    return cooccurrence(sets, restrict);
}

PmiMatrix compute_pmi(const CooccurrenceStats& stats)
{
    if (stats.n_users == 0) throw Error("compute_pmi: no users");
    PmiMatrix out;
    std::vector<Index> remap(stats.communities.size(), -1);
    for (std::size_t i = 0; i < stats.communities.size(); ++i) {
        if (stats.counts[i] == 0) continue;
        remap[i] = static_cast<Index>(out.communities.size());
        out.communities.push_back(stats.communities[i]);
    }

    const double n = static_cast<double>(stats.n_users);
    auto ppmi = [&](double joint, double ca, double cb) {
        // ln[(joint/n) / ((ca/n)(cb/n))] = ln(joint n / (ca cb))
        return std::max(0.0, std::log(joint * n / (ca * cb)));
    };

    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t i = 0; i < stats.communities.size(); ++i) {
        if (remap[i] < 0) continue;
        const double c = static_cast<double>(stats.counts[i]);
        const double v = ppmi(c, c, c);
        if (v > 0.0) entries.emplace_back(remap[i], remap[i], v);
    }
    for (const auto& [key, joint] : stats.joint) {
        const auto [a, b] = key;
        if (remap[a] < 0 || remap[b] < 0 || joint == 0) continue;
        const double v = ppmi(static_cast<double>(joint), static_cast<double>(stats.counts[a]),
                              static_cast<double>(stats.counts[b]));
        if (v > 0.0) {
            entries.emplace_back(remap[a], remap[b], v);
            entries.emplace_back(remap[b], remap[a], v);
        }
    }
    const auto dim = static_cast<Index>(out.communities.size());
    out.values.resize(dim, dim);
    out.values.setFromTriplets(entries.begin(), entries.end());
    out.values.makeCompressed();
    return out;
}

SubredditEmbedding embed(const PmiMatrix& pmi, Index rank, RowWeighting weighting, const SvdOptions& opt)
{
    auto svd = truncated_svd(pmi.values, rank, opt);
    SubredditEmbedding emb;
    emb.communities = pmi.communities;
    switch (weighting) {
    case RowWeighting::u: emb.vectors = svd.u; break;
    case RowWeighting::u_sqrt_sigma: emb.vectors = svd.u * svd.singular_values.cwiseSqrt().asDiagonal(); break;
    case RowWeighting::u_sigma: emb.vectors = svd.u * svd.singular_values.asDiagonal(); break;
    }
    if (!emb.vectors.allFinite()) throw Error("embedding contains non-finite entries");
    return emb;
}

SubredditScale similarity_scale(const SubredditEmbedding& emb, const std::string& anchor)
{
    auto it = std::find(emb.communities.begin(), emb.communities.end(), anchor);
    if (it == emb.communities.end()) throw Error("anchor " + anchor + " is not in the embedding");
    const Index a = std::distance(emb.communities.begin(), it);
    const Vector<double> anchor_vec = emb.vectors.row(a).transpose();
    const double anchor_norm = anchor_vec.norm();
    if (anchor_norm == 0.0) throw Error("anchor " + anchor + " has a zero embedding vector");

    SubredditScale scale;
    scale.anchor = anchor;
    std::size_t dropped = 0;
    for (Index i = 0; i < emb.vectors.rows(); ++i) {
        const double norm = emb.vectors.row(i).norm();
        if (norm == 0.0) {
            ++dropped;
            continue;
        }
        const double cos = emb.vectors.row(i).dot(anchor_vec) / (norm * anchor_norm);
        scale.values[emb.communities[static_cast<std::size_t>(i)]] = std::clamp(cos, -1.0, 1.0);
    }
    scale.values[anchor] = 1.0;
    if (dropped) log_warning(std::to_string(dropped) + " communities with zero-norm embeddings dropped from the scale");
    return scale;
}

SpearmanResult rank_correlation(const SubredditScale& a, const SubredditScale& b)
{
    std::vector<std::string> common;
    for (const auto& [name, _] : a.values)
        if (b.contains(name)) common.push_back(name);
    if (common.size() < 3) throw Error("rank_correlation needs at least 3 common items");
    std::sort(common.begin(), common.end());

    const auto n = static_cast<Index>(common.size());
    Vector<double> va(n), vb(n);
    for (Index i = 0; i < n; ++i) {
        va(i) = a.values.at(common[static_cast<std::size_t>(i)]);
        vb(i) = b.values.at(common[static_cast<std::size_t>(i)]);
    }
    SpearmanResult out;
    out.n = common.size();
    out.rho = pearson(average_ranks(va), average_ranks(vb));
    if (std::isnan(out.rho)) throw Error("rank_correlation undefined: a ranking is constant");
    const double df = static_cast<double>(n - 2);
    if (std::abs(out.rho) >= 1.0) {
        out.p_value = 0.0;
    } else {
        const double t = out.rho * std::sqrt(df / (1.0 - out.rho * out.rho));
        out.p_value = t_test_p_value(t, df);
    }
    return out;
}

SubredditScale top_n(const SubredditScale& scale, std::size_t n)
{
    SubredditScale out;
    out.anchor = scale.anchor;
    for (const auto& [name, v] : scale.ranked()) {
        if (out.values.size() >= n) break;
        out.values[name] = v;
    }
    return out;
}

}  // namespace ctpath
