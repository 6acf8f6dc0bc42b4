#include "ctpath/pipeline.hpp"

#include "ctpath/csv.hpp"
#include "ctpath/features.hpp"
#include "ctpath/genscale.hpp"
#include "ctpath/sage.hpp"
#include "ctpath/text.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace ctpath {

using nlohmann::json;

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free)
    {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
    }
    void update(const void* data, std::size_t n)
    {
        if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("sha256: update failed");
    }
    std::string hex()
    {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw Error("sha256: final failed");
        std::ostringstream out;
        for (unsigned i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
        return out.str();
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

bool is_artifact(std::string_view name)
{
    static const std::set<std::string_view> names{
        artifact::corpus,   artifact::ingest_stats, artifact::communities,     artifact::similarity,
        artifact::embedding, artifact::entities,    artifact::entity_graph,    artifact::generality,
        artifact::cohort,   artifact::rejections,   artifact::timeline_index,  artifact::trajectories,
        artifact::model,    artifact::silhouette,   artifact::pathways,        artifact::lexicons,
        artifact::ct_set,   artifact::features,     artifact::trends,          artifact::peaks,
        artifact::phases,   artifact::plot_trajectories, artifact::plot_trends, artifact::plot_phases,
        artifact::report,   artifact::robustness};
    return names.count(name) > 0;
}

Corpus load_corpus(const std::filesystem::path& p)
{
    const std::vector<std::filesystem::path> paths{p};
    return Corpus(load_contributions(paths));
}

std::vector<UserTimeline> build_timelines(const Corpus& corpus, const std::vector<std::string>& users,
                                          const std::string& focal)
{
    std::vector<UserTimeline> out(users.size());
    parallel_for(users.size(), [&](std::size_t i) { out[i] = build_timeline(users[i], corpus, focal); });
    return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& p)
{
    std::ifstream in(p);
    if (!in) throw MissingDependency(p.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    return out;
}

}  // namespace

std::string sha256_hex(std::string_view data)
{
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingDependency(path.string());
    Sha256 h;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

void apply_environment(PipelineConfig& cfg)
{
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) cfg.output_dir = dir;
}

Pipeline::Pipeline(PipelineConfig cfg, bool force) : cfg_(std::move(cfg)), dir_(cfg_.output_dir), force_(force)
{
    validate(cfg_);
}

std::filesystem::path Pipeline::path(std::string_view name) const
{
    if (is_artifact(name)) return dir_ / std::string(name);
    return std::filesystem::path(std::string(name));
}

std::filesystem::path Pipeline::manifest_path(Stage stage) const
{
    return dir_ / "manifests" / (std::string(to_string(stage)) + ".json");
}

std::vector<std::string> Pipeline::stage_inputs(Stage stage) const
{
    namespace a = artifact;
    std::vector<std::string> in;
    auto optional_file = [&](const std::string& f) {
        if (!f.empty()) in.push_back(f);
    };
    switch (stage) {
    case Stage::ingest: in = cfg_.inputs; break;
    case Stage::scale_sim: in = {a::corpus}; break;
    case Stage::scale_gen:
        in = {a::corpus};
        optional_file(cfg_.entity_file);
        optional_file(cfg_.gazetteer_file);
        break;
    case Stage::trajectories: in = {a::corpus, a::similarity}; break;
    case Stage::cluster: in = {a::trajectories}; break;
    case Stage::sage: in = {a::corpus}; break;
    case Stage::features:
        in = {a::corpus, a::cohort, a::similarity, a::generality, a::lexicons};
        optional_file(cfg_.lexicon_file);
        optional_file(cfg_.valence_file);
        break;
    case Stage::analyze: in = {a::features, a::model}; break;
    case Stage::report: in = {a::trajectories, a::model, a::trends, a::phases}; break;
    case Stage::check:
        in = {a::corpus, a::similarity, a::generality, a::rejections};
        optional_file(cfg_.external_scale);
        optional_file(cfg_.banned_list);
        optional_file(cfg_.generality_pairs);
        break;
    }
    return in;
}

std::vector<std::string> Pipeline::stage_outputs(Stage stage) const
{
    namespace a = artifact;
    switch (stage) {
    case Stage::ingest: return {a::corpus, a::ingest_stats, a::communities};
    case Stage::scale_sim: return {a::similarity, a::embedding};
    case Stage::scale_gen: return {a::entities, a::entity_graph, a::generality};
    case Stage::trajectories: return {a::cohort, a::rejections, a::timeline_index, a::trajectories};
    case Stage::cluster: return {a::model, a::silhouette, a::pathways};
    case Stage::sage: return {a::lexicons};
    case Stage::features: return {a::ct_set, a::features};
    case Stage::analyze: return {a::trends, a::peaks, a::phases};
    case Stage::report: return {a::plot_trajectories, a::plot_trends, a::plot_phases, a::report};
    case Stage::check: return {a::robustness};
    }
    return {};
}

std::string Pipeline::manifest_text(Stage stage, const std::vector<std::string>& inputs) const
{
    json j;
    j["stage"] = to_string(stage);
    j["seed"] = cfg_.seed;
    j["config_sha256"] = sha256_hex(stage_config_text(cfg_, stage));
    json in = json::array();
    for (const auto& name : inputs) in.push_back({{"name", name}, {"sha256", sha256_file(path(name))}});
    j["inputs"] = in;
    json out = json::array();
    for (const auto& name : stage_outputs(stage)) {
        const auto p = path(name);
        out.push_back({{"name", name}, {"sha256", std::filesystem::exists(p) ? sha256_file(p) : std::string()}});
    }
    j["outputs"] = out;
    return j.dump(2) + "\n";
}

bool Pipeline::cached(Stage stage, const std::vector<std::string>& inputs) const
{
    std::ifstream in(manifest_path(stage), std::ios::binary);
    if (!in) return false;
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str() == manifest_text(stage, inputs);
}

StageResult Pipeline::run(Stage stage)
{
    const auto inputs = stage_inputs(stage);
    for (const auto& name : inputs)
        if (!std::filesystem::exists(path(name))) throw MissingDependency(path(name).string());

    StageResult result;
    result.stage = stage;
    result.outputs = stage_outputs(stage);
    if (!force_ && cached(stage, inputs)) {
        result.status = StageStatus::cached;
        return result;
    }
    std::filesystem::create_directories(dir_ / "manifests");
    std::filesystem::remove(manifest_path(stage));
    execute(stage);
    std::ofstream out(manifest_path(stage), std::ios::binary | std::ios::trunc);
    out << manifest_text(stage, inputs);
    if (!out) throw Error("cannot write " + manifest_path(stage).string());
    return result;
}

std::vector<StageResult> Pipeline::run_all()
{
    std::vector<StageResult> out;
    for (Stage s : kStages) out.push_back(run(s));
    return out;
}

void Pipeline::execute(Stage stage)
{
    namespace a = artifact;
    const auto& c = cfg_;
    switch (stage) {
    case Stage::ingest: {
        IngestStats stats;
        std::vector<std::filesystem::path> paths(c.inputs.begin(), c.inputs.end());
        auto contribs = load_contributions(paths, &stats);
        std::set<std::string> seen;
        for (const auto& x : contribs) seen.insert(x.community);
        const auto keep = filter_subreddits(contribs, c.min_subreddit_contribs, c.min_subreddit_authors);
        const std::size_t before = contribs.size();
        Corpus corpus(restrict_to(std::move(contribs), keep));
        write_contributions(path(a::corpus), corpus.contributions());

        csv::Writer w(path(a::ingest_stats));
        w.row({"metric", "value"});
        w.row({"lines", std::to_string(stats.lines)});
        w.row({"accepted", std::to_string(stats.accepted)});
        w.row({"malformed", std::to_string(stats.malformed)});
        w.row({"deleted_authors", std::to_string(stats.deleted_authors)});
        w.row({"blank", std::to_string(stats.blank)});
        w.row({"communities_seen", std::to_string(seen.size())});
        w.row({"communities_retained", std::to_string(keep.size())});
        w.row({"contributions_retained", std::to_string(corpus.size())});
        w.row({"contributions_dropped", std::to_string(before - corpus.size())});
        csv::Writer cw(path(a::communities));
        cw.row({"community"});
        for (const auto& k : keep) cw.row({k});
        log_info("ingest: " + std::to_string(corpus.size()) + " contributions in " + std::to_string(keep.size()) +
                 " communities (" + std::to_string(stats.malformed) + " malformed, " +
                 std::to_string(stats.deleted_authors) + " deleted authors)");
        break;
    }
    case Stage::scale_sim: {
        const auto corpus = load_corpus(path(a::corpus));
        const auto users = embedding_cohort(corpus, c.anchor, c.contrast, c.embedding_min_comments);
        const auto pmi = compute_pmi(cooccurrence(corpus, users));
        const auto dim = static_cast<Index>(pmi.communities.size());
        Index rank = c.embedding_rank;
        if (rank > dim) {
            log_warning("scale-sim: embedding rank " + std::to_string(rank) + " exceeds " + std::to_string(dim) +
                        " communities; using " + std::to_string(dim));
            rank = dim;
        }
        SvdOptions so;
        so.seed = c.seed;
        so.tol = c.svd_tol;
        so.max_iter = c.svd_max_iter;
        const auto emb = embed(pmi, rank, c.row_weighting, so);
        const auto scale = similarity_scale(emb, c.anchor);
        write_scale_csv(path(a::similarity), scale, "similarity");
        csv::Writer w(path(a::embedding));
        w.row({"metric", "value"});
        w.row({"cohort_users", std::to_string(users.size())});
        w.row({"communities", std::to_string(dim)});
        w.row({"rank", std::to_string(rank)});
        w.row({"scored", std::to_string(scale.size())});
        break;
    }
    case Stage::scale_gen: {
        const auto corpus = load_corpus(path(a::corpus));
        std::vector<EntityMention> mentions;
        if (!c.entity_file.empty()) {
            mentions = read_mentions(c.entity_file);
        } else {
            std::vector<std::string> gazetteer;
            if (!c.gazetteer_file.empty()) gazetteer = read_lines(c.gazetteer_file);
            const CapitalizedRunExtractor extractor(gazetteer);
            mentions = mentions_from_submissions(top_submissions(corpus, c.top_submissions), extractor);
        }
        write_mentions(path(a::entities), mentions);
        const auto graph = build_entity_graph(mentions);
        if (graph.nodes.size() < 2) throw Error("scale-gen: entity mentions cover fewer than two communities");
        {
            csv::Writer w(path(a::entity_graph));
            w.row({"a", "b", "weight"});
            for (Index col = 0; col < graph.weights.outerSize(); ++col)
                for (Eigen::SparseMatrix<double>::InnerIterator it(graph.weights, col); it; ++it)
                    if (it.row() < it.col())
                        w.row({graph.nodes[static_cast<std::size_t>(it.row())],
                               graph.nodes[static_cast<std::size_t>(it.col())], csv::format_double(it.value())});
        }
        CentralityOptions co;
        co.tol = c.centrality_tol;
        co.max_iter = c.centrality_max_iter;
        const auto result = eigen_centrality(graph, co);
        write_scale_csv(path(a::generality), result.scale, "generality");
        break;
    }
    case Stage::trajectories: {
        const auto corpus = load_corpus(path(a::corpus));
        auto sim = read_scale_csv(path(a::similarity));
        sim.anchor = c.anchor;
        const auto selection = select_cohort(corpus, cohort_filter(c), &sim);
        if (selection.users.empty()) log_warning("trajectories: the cohort is empty");
        const auto timelines = build_timelines(corpus, selection.users, c.anchor);
        write_cohort_manifest(path(a::cohort), timelines);
        write_timeline_index(path(a::timeline_index), timelines);
        {
            csv::Writer w(path(a::rejections));
            w.row({"user", "reason"});
            for (const auto& [user, reason] : selection.rejected) w.row({user, to_string(reason)});
        }
        TrajectorySet set;
        for (const auto& t : timelines) {
            set.users.push_back(t.user);
            set.series.push_back(engagement_trajectory(t, sim, c.clip_at_zero));
        }
        write_trajectories(path(a::trajectories), set);
        log_info("trajectories: " + std::to_string(set.users.size()) + " cohort users");
        break;
    }
    case Stage::cluster: {
        const auto set = read_trajectories(path(a::trajectories));
        const std::size_t n = set.series.size();
        if (n < 3) throw Error("cluster: at least 3 trajectories are required, found " + std::to_string(n));
        KMeansOptions ko;
        ko.seed = c.seed;
        ko.max_iter = c.kmeans_max_iter;
        ko.dba_iter = c.dba_iter;
        if (c.dtw_window >= 0) ko.window = c.dtw_window;

        ClusterModel<double> model;
        KSelection selection;
        const KSelection* sel = nullptr;
        if (c.k > 0) {
            ko.k = std::min<int>(c.k, static_cast<int>(n));
            model = dtw_kmeans<double>(set.series, ko);
        } else {
            SelectKOptions so;
            so.k_min = c.k_min;
            so.k_max = std::min<int>(c.k_max, static_cast<int>(n) - 1);
            if (so.k_max < c.k_max)
                log_warning("cluster: k_max lowered to " + std::to_string(so.k_max) + " for " + std::to_string(n) +
                            " trajectories");
            so.kmeans = ko;
            so.sample = c.silhouette_sample;
            std::vector<ClusterModel<double>> models;
            selection = select_k<double>(set.series, so, &models);
            model = std::move(models[static_cast<std::size_t>(selection.chosen_k - so.k_min)]);
            sel = &selection;
        }
        const auto labels = label_pathways(model, LabelOptions{c.slope_tol, c.level_split});
        write_model_json(path(a::model), model, labels, set, sel);
        {
            csv::Writer w(path(a::silhouette));
            w.row({"k", "silhouette", "chosen"});
            for (std::size_t i = 0; i < selection.ks.size(); ++i)
                w.row({std::to_string(selection.ks[i]), csv::format_double(selection.silhouettes[i]),
                       selection.ks[i] == selection.chosen_k ? "yes" : "no"});
        }
        csv::Writer w(path(a::pathways));
        w.row({"user", "cluster", "pathway"});
        for (std::size_t i = 0; i < n; ++i)
            w.row({set.users[i], std::to_string(labels.clusters[i]), to_string(labels.labels[i])});
        log_info("cluster: k = " + std::to_string(model.k));
        break;
    }
    case Stage::sage: {
        const auto corpus = load_corpus(path(a::corpus));
        std::map<std::string, std::vector<const Contribution*>> by_community;
        for (const auto& x : corpus.contributions()) by_community[x.community].push_back(&x);
        std::vector<std::string> names;
        for (const auto& [name, _] : by_community) names.push_back(name);
        std::vector<TokenCounts> counts(names.size());
        parallel_for(names.size(), [&](std::size_t i) {
            std::vector<std::string> tokens;
            for (const auto* x : by_community.at(names[i])) {
                tokens.clear();
                tokenize_into(x->body, tokens);
                for (auto& t : tokens) ++counts[i][t];
            }
        });
        std::map<std::string, TokenCounts> corpora;
        for (std::size_t i = 0; i < names.size(); ++i) corpora.emplace(names[i], std::move(counts[i]));
        SageConfig sc;
        sc.vocab_min_count = c.sage_vocab_min_count;
        sc.epsilon = c.sage_epsilon;
        sc.lexicon_size = c.sage_lexicon_size;
        sc.fit.lambda = c.sage_lambda;
        sc.fit.tol = c.sage_tol;
        sc.fit.max_iter = c.sage_max_iter;
        write_lexicons(path(a::lexicons), community_lexicons(corpora, sc));
        break;
    }
    case Stage::features: {
        const auto corpus = load_corpus(path(a::corpus));
        const auto users = read_cohort_users(path(a::cohort));
        auto sim = read_scale_csv(path(a::similarity));
        sim.anchor = c.anchor;
        const auto gen = read_scale_csv(path(a::generality));
        std::map<std::string, std::unordered_set<std::string>> sage_sets;
        for (const auto& [name, lex] : read_lexicons(path(a::lexicons))) sage_sets[name] = lex.token_set();

        const auto ct = ct_membership(sim, c.ct_size, c.ct_floor);
        {
            csv::Writer w(path(a::ct_set));
            w.row({"community", "similarity"});
            for (const auto& [name, score] : sim.ranked())
                if (ct.count(name)) w.row({name, csv::format_double(score)});
        }
        const auto lexicon = c.lexicon_file.empty() ? standin_lexicon() : load_lexicon(c.lexicon_file);
        FeatureInputs in;
        in.corpus = &corpus;
        in.ct = &ct;
        in.generality = &gen;
        in.sage_lexicons = &sage_sets;
        in.anger = lexicon.matcher(c.anger_category);
        in.anxiety = lexicon.matcher(c.anxiety_category);
        in.affiliation = lexicon.matcher(c.affiliation_category);
        in.sentiment = default_sentiment_rules();
        if (!c.valence_file.empty()) load_valence_lexicon(c.valence_file, in.sentiment);

        const auto timelines = build_timelines(corpus, users, c.anchor);
        write_feature_csv(path(a::features), compute_feature_matrix(timelines, in));
        break;
    }
    case Stage::analyze: {
        const auto m = read_feature_csv(path(a::features));
        const auto labels = read_pathway_labels(path(a::model));
        const auto trends = fit_all_trends(m, labels, c.trend_mode);
        write_trends_csv(path(a::trends), trends, c.significance);
        write_peaks_csv(path(a::peaks), peak_distribution(m, labels));
        write_phase_csv(path(a::phases), phase_progression(m, labels));
        break;
    }
    case Stage::report: {
        const auto set = read_trajectories(path(a::trajectories));
        const auto labels = read_pathway_labels(path(a::model));
        const auto trends = read_trends_csv(path(a::trends));
        const auto phases = read_phase_csv(path(a::phases));
        write_plot_specs(dir_ / "plots", set, labels, trends, phases, c.significance);

        std::ofstream md(path(a::report), std::ios::binary | std::ios::trunc);
        md << "# Engagement pathway report\n\n";
        md << "Anchor community: " << c.anchor << "  \nContrast community: " << c.contrast
           << "  \nSeed: " << c.seed << "\n\n";
        md << "## Pathways\n\n| pathway | users | decile 1 | decile 10 |\n|---|---|---|---|\n";
        for (const auto& [p, acc] : mean_trajectories(set, labels))
            md << "| " << to_string(p) << " | " << acc.second << " | " << csv::format_double(acc.first(0)) << " | "
               << csv::format_double(acc.first(acc.first.size() - 1)) << " |\n";
        md << "\n## Significant trends (p < " << csv::format_double(c.significance) << ")\n\n";
        md << "| pathway | feature | region | beta | p | n |\n|---|---|---|---|---|---|\n";
        for (const auto& t : trends)
            if (t.significant(c.significance))
                md << "| " << to_string(t.pathway) << " | " << to_string(t.feature) << " | " << to_string(t.region)
                   << " | " << csv::format_double(t.beta) << " | " << csv::format_double(t.p_value) << " | " << t.n
                   << " |\n";
        md << "\n## Plot specifications\n\n";
        for (const char* p : {a::plot_trajectories, a::plot_trends, a::plot_phases}) md << "- " << p << "\n";
        if (!md) throw Error("cannot write " + path(a::report).string());
        break;
    }
    case Stage::check: {
        const auto corpus = load_corpus(path(a::corpus));
        auto sim = read_scale_csv(path(a::similarity));
        sim.anchor = c.anchor;
        const auto gen = read_scale_csv(path(a::generality));
        std::map<std::string, std::size_t> reasons;
        csv::Row header;
        for (const auto& r : csv::read_file(path(a::rejections), &header))
            if (r.size() == 2) ++reasons[r[1]];

        csv::Writer w(path(a::robustness));
        w.row({"check", "metric", "value"});
        w.row({"prior_activity", "rejected_users", std::to_string(reasons[std::string(to_string(RejectReason::prior_activity))])});
        w.row({"coverage", "rejected_users", std::to_string(reasons[std::string(to_string(RejectReason::low_coverage))])});
        const auto rho = scale_correlation_check(sim, gen);
        w.row({"scale_correlation", "rho", csv::format_double(rho.rho)});
        w.row({"scale_correlation", "p", csv::format_double(rho.p_value)});
        w.row({"scale_correlation", "n", std::to_string(rho.n)});
        if (!c.external_scale.empty()) {
            const auto ext = rank_correlation(sim, read_scale_csv(c.external_scale));
            w.row({"convergent_validity", "rho", csv::format_double(ext.rho)});
            w.row({"convergent_validity", "p", csv::format_double(ext.p_value)});
            w.row({"convergent_validity", "n", std::to_string(ext.n)});
        }
        if (!c.banned_list.empty()) {
            const auto banned = read_community_list(c.banned_list);
            const auto report = banned_volume_report(corpus.contributions(), banned);
            for (const auto& [name, f] : report.fractions) w.row({"banned_volume", name, csv::format_double(f)});
            w.row({"banned_volume", "total", csv::format_double(report.total)});
        }
        if (!c.generality_pairs.empty()) {
            std::vector<std::pair<std::string, std::string>> pairs;
            for (const auto& r : csv::read_file(c.generality_pairs, &header))
                if (r.size() >= 2) pairs.emplace_back(r[0], r[1]);
            const auto eval = pair_rank_eval(gen, pairs);
            w.row({"generality_pairs", "fraction", csv::format_double(eval.fraction)});
            w.row({"generality_pairs", "evaluated", std::to_string(eval.evaluated)});
            w.row({"generality_pairs", "skipped", std::to_string(eval.skipped)});
        }
        break;
    }
    }
}

}  // namespace ctpath
