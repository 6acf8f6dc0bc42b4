#include "ctpath/config.hpp"

#include "ctpath/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <type_traits>

namespace ctpath {

namespace {

constexpr std::array<std::string_view, 10> kStageNames{"ingest",   "scale-sim", "scale-gen", "trajectories", "cluster",
                                                       "sage",     "features",  "analyze",   "report",       "check"};

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view v)
{
    T out{};
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("config: bad value '" + std::string(v) + "' for " + std::string(key));
    return out;
}

std::string_view to_string(RowWeighting w)
{
    switch (w) {
    case RowWeighting::u: return "u";
    case RowWeighting::u_sqrt_sigma: return "u_sqrt_sigma";
    case RowWeighting::u_sigma: return "u_sigma";
    }
    return "";
}

std::string_view to_string(TenureMode m) { return m == TenureMode::last_focal ? "last_focal" : "data_end"; }
std::string_view to_string(TrendMode m) { return m == TrendMode::pooled ? "pooled" : "per_user"; }

template <typename E>
E parse_enum(std::string_view key, std::string_view v, std::initializer_list<E> options)
{
    for (E e : options)
        if (to_string(e) == v) return e;
    throw ConfigError("config: bad value '" + std::string(v) + "' for " + std::string(key));
}

template <typename T>
ConfigField make(std::string key, std::string help, std::vector<Stage> stages, T PipelineConfig::*member)
{
    ConfigField f;
    f.key = std::move(key);
    f.help = std::move(help);
    f.stages = std::move(stages);
    f.get = [member](const PipelineConfig& c) -> std::string {
        const T& v = c.*member;
        if constexpr (std::is_same_v<T, std::string>) {
            return v;
        } else if constexpr (std::is_same_v<T, bool>) {
            return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
            return csv::format_double(v);
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            std::string out;
            for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
            return out;
        } else if constexpr (std::is_enum_v<T>) {
            return std::string(to_string(v));
        } else {
            return std::to_string(v);
        }
    };
    const std::string k = f.key;
    f.set = [member, k](PipelineConfig& c, std::string_view raw) {
        const auto v = trim(raw);
        if (v.find('\n') != std::string_view::npos) throw ConfigError("config: newline in value for " + k);
        T& dst = c.*member;
        if constexpr (std::is_same_v<T, std::string>) {
            dst = std::string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
            if (v == "true" || v == "1" || v == "yes") dst = true;
            else if (v == "false" || v == "0" || v == "no") dst = false;
            else throw ConfigError("config: bad boolean '" + std::string(v) + "' for " + k);
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            dst.clear();
            std::size_t start = 0;
            while (start <= v.size() && !v.empty()) {
                auto end = v.find(',', start);
                if (end == std::string_view::npos) end = v.size();
                auto item = trim(v.substr(start, end - start));
                if (!item.empty()) dst.emplace_back(item);
                start = end + 1;
            }
        } else if constexpr (std::is_same_v<T, RowWeighting>) {
            dst = parse_enum(k, v, {RowWeighting::u, RowWeighting::u_sqrt_sigma, RowWeighting::u_sigma});
        } else if constexpr (std::is_same_v<T, TenureMode>) {
            dst = parse_enum(k, v, {TenureMode::last_focal, TenureMode::data_end});
        } else if constexpr (std::is_same_v<T, TrendMode>) {
            dst = parse_enum(k, v, {TrendMode::pooled, TrendMode::per_user});
        } else {
            dst = parse_number<T>(k, v);
        }
    };
    return f;
}

std::vector<ConfigField> build_registry()
{
    using S = Stage;
    using C = PipelineConfig;
    std::vector<ConfigField> r;
    r.push_back(make("inputs", "comma-separated dump files (plain or .gz)", {S::ingest}, &C::inputs));
    r.push_back(make("anchor", "focal community",
                     {S::scale_sim, S::trajectories, S::features, S::report, S::check}, &C::anchor));
    r.push_back(make("contrast", "contrast community for the embedding cohort", {S::scale_sim, S::report}, &C::contrast));
    r.push_back(make("output_dir", "artifact directory", {}, &C::output_dir));
    r.push_back(make("seed", "seed for every randomized step", {S::scale_sim, S::cluster}, &C::seed));
    r.push_back(make("threads", "worker threads, 0 = all cores", {}, &C::threads));

    r.push_back(make("min_subreddit_contribs", "community needs this many contributions", {S::ingest},
                     &C::min_subreddit_contribs));
    r.push_back(make("min_subreddit_authors", "community needs this many distinct authors", {S::ingest},
                     &C::min_subreddit_authors));

    r.push_back(make("embedding_min_comments", "comments in anchor or contrast to join the embedding cohort",
                     {S::scale_sim}, &C::embedding_min_comments));
    r.push_back(make("embedding_rank", "SVD rank of community vectors", {S::scale_sim}, &C::embedding_rank));
    r.push_back(make("row_weighting", "u, u_sqrt_sigma or u_sigma", {S::scale_sim}, &C::row_weighting));
    r.push_back(make("svd_tol", "relative residual tolerance of the truncated SVD", {S::scale_sim}, &C::svd_tol));
    r.push_back(make("svd_max_iter", "subspace iterations before giving up", {S::scale_sim}, &C::svd_max_iter));

    r.push_back(make("top_submissions", "top-scored submissions per community for entities", {S::scale_gen},
                     &C::top_submissions));
    r.push_back(make("entity_file", "optional community,entity,submission_id CSV replacing extraction",
                     {S::scale_gen}, &C::entity_file));
    r.push_back(make("gazetteer_file", "optional one-phrase-per-line gazetteer", {S::scale_gen}, &C::gazetteer_file));
    r.push_back(make("centrality_tol", "power iteration L2 change tolerance", {S::scale_gen}, &C::centrality_tol));
    r.push_back(make("centrality_max_iter", "power iteration limit", {S::scale_gen}, &C::centrality_max_iter));

    r.push_back(make("min_focal_comments", "focal comments a cohort user needs", {S::trajectories},
                     &C::min_focal_comments));
    r.push_back(make("min_tenure_days", "minimum focal tenure in days", {S::trajectories}, &C::min_tenure_days));
    r.push_back(make("tenure_mode", "last_focal or data_end", {S::trajectories}, &C::tenure_mode));
    r.push_back(make("prior_activity_cap", "max pre-anchor share in anchor-like communities", {S::trajectories},
                     &C::prior_activity_cap));
    r.push_back(make("prior_rank_cutoff", "similarity ranks counted as anchor-like", {S::trajectories},
                     &C::prior_rank_cutoff));
    r.push_back(make("coverage_floor", "min post-anchor share in scored communities", {S::trajectories},
                     &C::coverage_floor));
    r.push_back(make("clip_at_zero", "clip negative scale scores to 0 in engagement", {S::trajectories},
                     &C::clip_at_zero));

    r.push_back(make("k", "fixed cluster count, 0 = silhouette elbow", {S::cluster}, &C::k));
    r.push_back(make("k_min", "smallest k tried", {S::cluster}, &C::k_min));
    r.push_back(make("k_max", "largest k tried", {S::cluster}, &C::k_max));
    r.push_back(make("kmeans_max_iter", "k-means iteration limit", {S::cluster}, &C::kmeans_max_iter));
    r.push_back(make("dba_iter", "barycenter refinements per update", {S::cluster}, &C::dba_iter));
    r.push_back(make("dtw_window", "DTW band half-width, negative = none", {S::cluster}, &C::dtw_window));
    r.push_back(make("silhouette_sample", "max series scored per silhouette", {S::cluster}, &C::silhouette_sample));
    r.push_back(make("slope_tol", "barycenter slope below which a pathway is steady", {S::cluster}, &C::slope_tol));
    r.push_back(make("level_split", "steady level separating high from low", {S::cluster}, &C::level_split));

    r.push_back(make("sage_lambda", "L1 strength", {S::sage}, &C::sage_lambda));
    r.push_back(make("sage_vocab_min_count", "pooled count a token needs", {S::sage}, &C::sage_vocab_min_count));
    r.push_back(make("sage_epsilon", "background smoothing count", {S::sage}, &C::sage_epsilon));
    r.push_back(make("sage_lexicon_size", "tokens kept per community", {S::sage}, &C::sage_lexicon_size));
    r.push_back(make("sage_max_iter", "proximal iterations", {S::sage}, &C::sage_max_iter));
    r.push_back(make("sage_tol", "relative objective change at stationarity", {S::sage}, &C::sage_tol));

    r.push_back(make("ct_size", "top similarity ranks forming the inside region", {S::features}, &C::ct_size));
    r.push_back(make("ct_floor", "minimum similarity for the inside region", {S::features}, &C::ct_floor));
    r.push_back(make("lexicon_file", "category dictionary (.dic) or category,pattern CSV; empty = stand-in lists",
                     {S::features}, &C::lexicon_file));
    r.push_back(make("anger_category", "dictionary category for anger", {S::features}, &C::anger_category));
    r.push_back(make("anxiety_category", "dictionary category for anxiety", {S::features}, &C::anxiety_category));
    r.push_back(make("affiliation_category", "dictionary category for affiliation", {S::features},
                     &C::affiliation_category));
    r.push_back(make("valence_file", "token<TAB>valence lexicon; empty = stand-in list", {S::features},
                     &C::valence_file));

    r.push_back(make("trend_mode", "pooled or per_user", {S::analyze}, &C::trend_mode));
    r.push_back(make("significance", "p-value below which a trend is reported", {S::analyze, S::report},
                     &C::significance));

    r.push_back(make("external_scale", "optional community,score CSV for convergent validity", {S::check},
                     &C::external_scale));
    r.push_back(make("banned_list", "optional CSV of banned communities", {S::check}, &C::banned_list));
    r.push_back(make("generality_pairs", "optional general,specialist CSV for the generality scale", {S::check},
                     &C::generality_pairs));
    return r;
}

}  // namespace

std::string_view to_string(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }

std::optional<Stage> parse_stage(std::string_view s)
{
    for (std::size_t i = 0; i < kStageNames.size(); ++i)
        if (kStageNames[i] == s) return static_cast<Stage>(i);
    return std::nullopt;
}

const std::vector<ConfigField>& config_fields()
{
    static const std::vector<ConfigField> fields = build_registry();
    return fields;
}

void set_field(PipelineConfig& cfg, std::string_view key, std::string_view value)
{
    for (const auto& f : config_fields())
        if (f.key == key) {
            f.set(cfg, value);
            return;
        }
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

std::string to_text(const PipelineConfig& cfg)
{
    std::string out;
    for (const auto& f : config_fields()) out += f.key + " = " + f.get(cfg) + "\n";
    return out;
}

PipelineConfig parse_config(std::string_view text, PipelineConfig base)
{
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        try {
            set_field(base, trim(t.substr(0, eq)), t.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

PipelineConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string stage_config_text(const PipelineConfig& cfg, Stage stage)
{
    std::string out;
    for (const auto& f : config_fields())
        if (std::find(f.stages.begin(), f.stages.end(), stage) != f.stages.end())
            out += f.key + " = " + f.get(cfg) + "\n";
    return out;
}

void validate(const PipelineConfig& cfg)
{
    auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
    if (cfg.inputs.empty()) fail("inputs is required");
    if (cfg.anchor.empty()) fail("anchor is required");
    if (cfg.contrast.empty()) fail("contrast is required");
    if (cfg.anchor == cfg.contrast) fail("anchor and contrast must differ");
    if (cfg.output_dir.empty()) fail("output_dir is empty");
    auto fraction = [&](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) fail(std::string(name) + " must lie in [0, 1]");
    };
    fraction(cfg.prior_activity_cap, "prior_activity_cap");
    fraction(cfg.coverage_floor, "coverage_floor");
    fraction(cfg.significance, "significance");
    if (cfg.min_focal_comments < 1 || cfg.min_subreddit_contribs < 1 || cfg.min_subreddit_authors < 1 ||
        cfg.embedding_min_comments < 1)
        fail("counts must be at least 1");
    if (cfg.min_tenure_days < 0.0) fail("min_tenure_days must be non-negative");
    if (cfg.embedding_rank < 1) fail("embedding_rank must be at least 1");
    if (cfg.k < 0 || (cfg.k == 0 && (cfg.k_min < 2 || cfg.k_max < cfg.k_min))) fail("bad k range");
    if (cfg.kmeans_max_iter < 1 || cfg.dba_iter < 0 || cfg.svd_max_iter < 1 || cfg.centrality_max_iter < 1 ||
        cfg.sage_max_iter < 1)
        fail("iteration limits must be positive");
    if (cfg.sage_lambda < 0.0 || !(cfg.sage_epsilon > 0.0)) fail("sage_lambda >= 0 and sage_epsilon > 0 required");
    if (cfg.slope_tol < 0.0) fail("slope_tol must be non-negative");
    if (cfg.ct_size < 1) fail("ct_size must be at least 1");
}

CohortFilter cohort_filter(const PipelineConfig& cfg)
{
    CohortFilter f;
    f.focal_community = cfg.anchor;
    f.min_focal_comments = cfg.min_focal_comments;
    f.min_tenure_seconds = static_cast<std::int64_t>(cfg.min_tenure_days * 86400.0);
    f.tenure_mode = cfg.tenure_mode;
    f.prior_activity_cap = cfg.prior_activity_cap;
    f.prior_rank_cutoff = cfg.prior_rank_cutoff;
    f.coverage_floor = cfg.coverage_floor;
    f.min_subreddit_contribs = cfg.min_subreddit_contribs;
    f.min_subreddit_authors = cfg.min_subreddit_authors;
    return f;
}

}  // namespace ctpath
