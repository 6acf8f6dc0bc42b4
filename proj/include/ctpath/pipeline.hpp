#ifndef CTPATH_PIPELINE_HPP
#define CTPATH_PIPELINE_HPP

#include "ctpath/config.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ctpath {

/// An upstream artifact or input file is absent.
class MissingDependency : public Error {
public:
    explicit MissingDependency(std::string dependency)
        : Error("missing dependency: " + dependency), dependency_(std::move(dependency)) {}

    const std::string& dependency() const noexcept { return dependency_; }

private:
    std::string dependency_;
};

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

enum class StageStatus { ran, cached };

struct StageResult {
    Stage stage = Stage::ingest;
    StageStatus status = StageStatus::ran;
    /// Output artifact names relative to the output directory.
    std::vector<std::string> outputs;
};

/// Artifact names relative to the output directory.
namespace artifact {
inline constexpr const char* corpus = "corpus.jsonl";
inline constexpr const char* ingest_stats = "ingest_stats.csv";
inline constexpr const char* communities = "communities.csv";
inline constexpr const char* similarity = "similarity_scale.csv";
inline constexpr const char* embedding = "embedding_summary.csv";
inline constexpr const char* entities = "entities.csv";
inline constexpr const char* entity_graph = "entity_graph.csv";
inline constexpr const char* generality = "generality_scale.csv";
inline constexpr const char* cohort = "cohort.csv";
inline constexpr const char* rejections = "cohort_rejections.csv";
inline constexpr const char* timeline_index = "timeline_index.csv";
inline constexpr const char* trajectories = "trajectories.csv";
inline constexpr const char* model = "model.json";
inline constexpr const char* silhouette = "silhouette.csv";
inline constexpr const char* pathways = "pathways.csv";
inline constexpr const char* lexicons = "sage_lexicons.csv";
inline constexpr const char* ct_set = "ct_set.csv";
inline constexpr const char* features = "features.csv";
inline constexpr const char* trends = "trends.csv";
inline constexpr const char* peaks = "peaks.csv";
inline constexpr const char* phases = "phases.csv";
inline constexpr const char* plot_trajectories = "plots/trajectories.vl.json";
inline constexpr const char* plot_trends = "plots/trends.vl.json";
inline constexpr const char* plot_phases = "plots/phases.vl.json";
inline constexpr const char* report = "report.md";
inline constexpr const char* robustness = "robustness.csv";
}  // namespace artifact

/// Runs stages against one output directory. Each stage writes its
/// artifacts and then manifests/<stage>.json holding input hashes, the
/// stage's config hash and the seed; a rerun whose manifest still matches
/// is skipped.
class Pipeline {
public:
    /// Validates the config; throws ConfigError.
    explicit Pipeline(PipelineConfig cfg, bool force = false);

    /// Throws MissingDependency before touching outputs when an input is
    /// absent; other ctpath::Error values signal computation failures.
    StageResult run(Stage stage);
    std::vector<StageResult> run_all();

    const PipelineConfig& config() const noexcept { return cfg_; }
    std::filesystem::path path(std::string_view name) const;
    std::filesystem::path manifest_path(Stage stage) const;

    /// Upstream artifact names and external files read by `stage`.
    std::vector<std::string> stage_inputs(Stage stage) const;
    std::vector<std::string> stage_outputs(Stage stage) const;

private:
    void execute(Stage stage);
    std::string manifest_text(Stage stage, const std::vector<std::string>& inputs) const;
    bool cached(Stage stage, const std::vector<std::string>& inputs) const;

    PipelineConfig cfg_;
    std::filesystem::path dir_;
    bool force_;
};

/// Environment variable overriding output_dir.
inline constexpr const char* kOutputDirEnv = "CTPATH_OUTPUT_DIR";

/// Applies kOutputDirEnv to `cfg` when it is set and non-empty.
void apply_environment(PipelineConfig& cfg);

}  // namespace ctpath

#endif  // CTPATH_PIPELINE_HPP
