// Command-line driver: one subcommand per pipeline stage, plus `all`.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 missing
// upstream artifact, 3 any other failure.

#include "ctpath/config.hpp"
#include "ctpath/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

std::string flag_name(const std::string& key)
{
    std::string out = key;
    for (char& c : out)
        if (c == '_') c = '-';
    return "--" + out;
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace ctpath;

    CLI::App app{"Engagement pathway pipeline"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    bool force = false;
    bool quiet = false;
    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_flag("--force", force, "rerun stages even when their manifest matches");
    app.add_flag("--quiet", quiet, "suppress progress messages");

    // Flags override both the config file and the environment, so they are
    // collected as text and applied last.
    std::map<std::string, std::string> overrides;
    for (const auto& f : config_fields()) {
        auto* opt = app.add_option_function<std::string>(
            flag_name(f.key), [&overrides, key = f.key](const std::string& v) { overrides[key] = v; }, f.help);
        opt->group("Pipeline settings");
    }

    std::optional<Stage> selected;
    bool run_all = false;
    for (Stage s : kStages) {
        auto* sub = app.add_subcommand(std::string(to_string(s)), "run the " + std::string(to_string(s)) + " stage");
        sub->callback([&selected, s] { selected = s; });
    }
    app.add_subcommand("all", "run every stage in order")->callback([&run_all] { run_all = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    set_quiet(quiet);
    PipelineConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        apply_environment(cfg);
        for (const auto& [key, value] : overrides) set_field(cfg, key, value);
        validate(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    set_thread_count(cfg.threads);

    try {
        Pipeline pipeline(cfg, force);
        std::vector<StageResult> results;
        if (run_all)
            results = pipeline.run_all();
        else
            results.push_back(pipeline.run(*selected));
        for (const auto& r : results)
            std::cout << to_string(r.stage) << ": " << (r.status == StageStatus::cached ? "cached" : "done") << "\n";
    } catch (const MissingDependency& e) {
        std::cerr << "missing dependency: " << e.dependency() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
