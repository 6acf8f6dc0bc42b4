#ifndef CTPATH_CONFIG_HPP
#define CTPATH_CONFIG_HPP

#include "ctpath/analysis.hpp"
#include "ctpath/corpus.hpp"
#include "ctpath/simscale.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctpath {

enum class Stage { ingest, scale_sim, scale_gen, trajectories, cluster, sage, features, analyze, report, check };

inline constexpr std::array<Stage, 10> kStages{Stage::ingest,   Stage::scale_sim, Stage::scale_gen, Stage::trajectories,
                                               Stage::cluster,  Stage::sage,      Stage::features,  Stage::analyze,
                                               Stage::report,   Stage::check};

/// Subcommand spelling, e.g. "scale-sim".
std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view s);

class ConfigError : public Error {
public:
    using Error::Error;
};

struct PipelineConfig {
    std::vector<std::string> inputs;
    std::string anchor;
    std::string contrast;
    std::string output_dir = "ctpath_out";
    std::uint64_t seed = 42;
    /// 0 selects the machine's parallelism.
    unsigned threads = 0;

    std::size_t min_subreddit_contribs = 10;
    std::size_t min_subreddit_authors = 5;

    std::size_t embedding_min_comments = 10;
    Index embedding_rank = 50;
    RowWeighting row_weighting = RowWeighting::u_sqrt_sigma;
    double svd_tol = 1e-10;
    int svd_max_iter = 1000;

    std::size_t top_submissions = 200;
    std::string entity_file;
    std::string gazetteer_file;
    double centrality_tol = 1e-10;
    int centrality_max_iter = 10000;

    std::size_t min_focal_comments = 20;
    double min_tenure_days = 365.0;
    TenureMode tenure_mode = TenureMode::last_focal;
    double prior_activity_cap = 0.10;
    std::size_t prior_rank_cutoff = 500;
    double coverage_floor = 0.80;
    bool clip_at_zero = false;

    /// 0 picks k by the silhouette elbow over [k_min, k_max].
    int k = 0;
    int k_min = 2;
    int k_max = 15;
    int kmeans_max_iter = 100;
    int dba_iter = 10;
    /// Negative means no warping window.
    int dtw_window = -1;
    std::size_t silhouette_sample = 2000;
    double slope_tol = 0.01;
    double level_split = 0.2;

    double sage_lambda = 1.0;
    std::int64_t sage_vocab_min_count = 10;
    double sage_epsilon = 1.0;
    std::size_t sage_lexicon_size = 1000;
    int sage_max_iter = 1000;
    double sage_tol = 1e-10;

    std::size_t ct_size = 171;
    double ct_floor = 0.2;
    std::string lexicon_file;
    std::string anger_category = "anger";
    std::string anxiety_category = "anxiety";
    std::string affiliation_category = "affiliation";
    std::string valence_file;

    TrendMode trend_mode = TrendMode::pooled;
    double significance = 0.05;

    std::string external_scale;
    std::string banned_list;
    std::string generality_pairs;
};

struct ConfigField {
    std::string key;
    std::string help;
    /// Stages whose output depends on the field.
    std::vector<Stage> stages;
    std::function<std::string(const PipelineConfig&)> get;
    /// Throws ConfigError on an unparsable value.
    std::function<void(PipelineConfig&, std::string_view)> set;
};

const std::vector<ConfigField>& config_fields();

/// Throws ConfigError for unknown keys or bad values.
void set_field(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// "key = value" lines in registry order; parse_config(to_text(c)) == c.
std::string to_text(const PipelineConfig& cfg);

/// Applies "key = value" lines on top of `base`. Blank lines and lines
/// starting with '#' are ignored.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Fields that affect `stage`, in file form; hashed into stage manifests.
std::string stage_config_text(const PipelineConfig& cfg, Stage stage);

/// Required fields and value ranges; throws ConfigError.
void validate(const PipelineConfig& cfg);

CohortFilter cohort_filter(const PipelineConfig& cfg);

}  // namespace ctpath

#endif  // CTPATH_CONFIG_HPP
