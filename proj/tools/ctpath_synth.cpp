// Writes a reproducible synthetic dump, a matching config file and the
// planted pathway of every archetype user.

#include "ctpath/csv.hpp"
#include "ctpath/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    using namespace ctpath;

    CLI::App app{"Synthetic corpus generator"};
    std::string out_dir = "synthetic";
    std::string pipeline_dir;
    SynthOptions opt;
    app.add_option("--out", out_dir, "directory for corpus.jsonl.gz, config.txt and planted.csv");
    app.add_option("--output-dir", pipeline_dir, "pipeline output directory written into config.txt");
    app.add_option("--seed", opt.seed, "generator seed");
    app.add_option("--users-per-pathway", opt.users_per_pathway, "planted users per archetype")
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    try {
        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        const auto corpus = generate_synthetic_corpus(opt);
        const auto corpus_path = dir / "corpus.jsonl.gz";
        write_synthetic_corpus(corpus_path, corpus);
        if (pipeline_dir.empty()) pipeline_dir = (dir / "out").string();
        std::ofstream cfg(dir / "config.txt");
        cfg << synthetic_config_text(corpus_path, pipeline_dir, opt);
        csv::Writer w(dir / "planted.csv");
        w.row({"user", "pathway"});
        for (const auto& [user, p] : corpus.planted) w.row({user, std::string(to_string(p))});
        std::cout << corpus.lines.size() << " lines written to " << corpus_path.string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
