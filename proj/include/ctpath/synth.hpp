#ifndef CTPATH_SYNTH_HPP
#define CTPATH_SYNTH_HPP

#include "ctpath/pathways.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ctpath {

struct SynthOptions {
    std::uint64_t seed = 7;
    std::string anchor = "conspiracy";
    std::string contrast = "science";
    /// Planted cohort users per pathway archetype.
    int users_per_pathway = 50;
    int ct_background_users = 120;
    int contrast_users = 300;
    int mainstream_users = 150;
    int submissions_per_community = 50;
};

/// A reproducible dump: one record per line, including a few malformed
/// and deleted-author lines, plus the planted pathway of each archetype user.
struct SynthCorpus {
    std::vector<std::string> lines;
    std::map<std::string, Pathway> planted;
    std::vector<std::string> ct_communities;
    std::vector<std::string> mainstream_communities;
};

SynthCorpus generate_synthetic_corpus(const SynthOptions& opt = {});

/// Writes the lines; a ".gz" extension selects gzip.
void write_synthetic_corpus(const std::filesystem::path& path, const SynthCorpus& corpus);

/// Pipeline config entries sized for the synthetic corpus, as key=value text.
std::string synthetic_config_text(const std::filesystem::path& corpus_path, const std::filesystem::path& output_dir,
                                  const SynthOptions& opt = {});

}  // namespace ctpath

#endif  // CTPATH_SYNTH_HPP
