#include "support.hpp"

#include "ctpath/config.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>

using namespace ctpath;

namespace {

PipelineConfig minimal()
{
    PipelineConfig c;
    c.inputs = {"a.jsonl", "b.jsonl.gz"};
    c.anchor = "conspiracy";
    c.contrast = "science";
    return c;
}

}  // namespace

TEST_CASE("config text round trip")
{
    PipelineConfig c = minimal();
    c.seed = 99;
    c.embedding_rank = 7;
    c.row_weighting = RowWeighting::u_sigma;
    c.tenure_mode = TenureMode::data_end;
    c.clip_at_zero = true;
    c.dtw_window = 2;
    c.sage_lambda = 0.375;
    c.trend_mode = TrendMode::per_user;
    c.significance = 0.01;
    c.banned_list = "banned, list.csv";
    const std::string text = to_text(c);
    CHECK(to_text(parse_config(text)) == text);
}

TEST_CASE("every registered key survives the round trip")
{
    const PipelineConfig c = minimal();
    for (const auto& f : config_fields()) {
        PipelineConfig copy = c;
        set_field(copy, f.key, f.get(c));
        CHECK(f.get(copy) == f.get(c));
        CHECK_FALSE(f.help.empty());
        // Only run-environment settings leave every output unchanged.
        if (f.key != "output_dir" && f.key != "threads") CHECK_FALSE(f.stages.empty());
    }
}

TEST_CASE("config parsing errors")
{
    CHECK_THROWS_AS(parse_config("no_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("seed = banana\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("row_weighting = sideways\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("missing separator\n"), ConfigError);
    CHECK_NOTHROW(parse_config("# comment\n\nseed = 3\n"));
    CHECK(parse_config("  seed   =   3  \n").seed == 3);
}

TEST_CASE("validation")
{
    CHECK_NOTHROW(validate(minimal()));
    auto c = minimal();
    c.inputs.clear();
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = minimal();
    c.contrast = c.anchor;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = minimal();
    c.prior_activity_cap = 1.5;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = minimal();
    c.k_max = 1;
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("stage hashes depend only on relevant fields")
{
    const auto a = minimal();
    auto b = a;
    b.sage_lambda = 5.0;
    CHECK(stage_config_text(a, Stage::sage) != stage_config_text(b, Stage::sage));
    CHECK(stage_config_text(a, Stage::cluster) == stage_config_text(b, Stage::cluster));
    b = a;
    b.k = 4;
    CHECK(stage_config_text(a, Stage::cluster) != stage_config_text(b, Stage::cluster));
    CHECK(stage_config_text(a, Stage::ingest) == stage_config_text(b, Stage::ingest));
}

TEST_CASE("stage names")
{
    for (Stage s : kStages) CHECK(parse_stage(to_string(s)) == s);
    CHECK(to_string(Stage::scale_sim) == "scale-sim");
    CHECK_FALSE(parse_stage("nope"));
}

TEST_CASE("cohort filter mirrors the config")
{
    auto c = minimal();
    c.min_tenure_days = 2.0;
    c.prior_rank_cutoff = 12;
    const auto f = cohort_filter(c);
    CHECK(f.focal_community == "conspiracy");
    CHECK(f.min_tenure_seconds == 2 * 86400);
    CHECK(f.prior_rank_cutoff == 12);
}

TEST_CASE("config files load")
{
    testing::TempDir dir("cfg");
    {
        std::ofstream out(dir / "c.txt");
        out << to_text(minimal());
    }
    CHECK(to_text(load_config(dir / "c.txt")) == to_text(minimal()));
    CHECK_THROWS_AS(load_config(dir / "missing.txt"), ConfigError);
}
