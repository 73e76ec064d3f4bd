// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "score/cli.hpp"
#include "score/config.hpp"
#include "score/io.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace score;
using score::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct CerrCapture {
    std::ostringstream stream;
    std::streambuf* saved;
    CerrCapture() : saved(std::cerr.rdbuf(stream.rdbuf())) {}
    ~CerrCapture() { std::cerr.rdbuf(saved); }
    std::string text() const { return stream.str(); }
};

struct CoutSilencer {
    std::ostringstream sink;
    std::streambuf* saved;
    CoutSilencer() : saved(std::cout.rdbuf(sink.rdbuf())) {}
    ~CoutSilencer() { std::cout.rdbuf(saved); }
};

int run(const std::vector<std::string>& args) {
    CoutSilencer quiet;
    return cli::run_command(args);
}

/// Config for a pipeline over dataset files in `data_dir`, working under
/// `workdir`.
std::string pipeline_config(const fs::path& data_dir, const fs::path& workdir) {
    std::string cfg;
    cfg += "seed = 42\n";
    cfg += "[paths]\n";
    cfg += "interactions = \"" + (data_dir / "interactions.tsv").string() + "\"\n";
    cfg += "metadata = \"" + (data_dir / "items.tsv").string() + "\"\n";
    cfg += "workdir = \"" + workdir.string() + "\"\n";
    cfg += "[provider]\nkind = \"stub\"\n";
    cfg += "[params]\n";
    cfg += "d = 16\nembed_dim = 128\ncrm_epochs = 20\ncrm_lr = 0.1\n";
    cfg += "car_epochs = 15\nsare_epochs = 15\nassess_sample = 400\n";
    cfg += "[split]\ntrain_end = 2000\nval_end = 2500\n";
    return cfg;
}

std::vector<std::string> pipeline_stages() {
    return {"ingest", "split", "train-crm", "train-car", "index",
            "assess", "train-sare", "predict"};
}

}  // namespace

TEST_CASE("help exits zero") {
    CHECK(run({"--help"}) == 0);
    CHECK(run({}) == 0);
}

TEST_CASE("unknown subcommand exits 2 with usage") {
    CerrCapture cerr_text;
    CHECK(run({"frobnicate"}) == 2);
    CHECK(cerr_text.text().find("Usage") != std::string::npos);
}

TEST_CASE("missing input file exits 1 and names the path") {
    TempDir tmp;
    CerrCapture cerr_text;
    const int code = run({"ingest", "--interactions", "/nonexistent/file.tsv", "--metadata",
                          "/nonexistent/items.tsv", "--out", (tmp.path() / "c").string()});
    CHECK(code == 1);
    CHECK(cerr_text.text().find("/nonexistent/file.tsv") != std::string::npos);
}

TEST_CASE("config validation failure names the field") {
    TempDir tmp;
    const auto data = score::testing::make_planted_signal(42);
    data.write(tmp.path() / "data");
    atomic_write_file(tmp.path() / "cfg.toml",
                      pipeline_config(tmp.path() / "data", tmp.path() / "out"));
    CerrCapture cerr_text;
    const int code = run({"ingest", "--config", (tmp.path() / "cfg.toml").string(), "--set",
                          "params.tau_car=0"});
    CHECK(code == 1);
    CHECK(cerr_text.text().find("tau_car") != std::string::npos);
}

TEST_CASE("full stub pipeline on the bundled synthetic data") {
    const fs::path bundled = fs::path(SCORE_SOURCE_DIR) / "data" / "synthetic";
    REQUIRE(fs::exists(bundled / "interactions.tsv"));
    TempDir tmp;
    const fs::path cfg_path = tmp.path() / "cfg.toml";
    atomic_write_file(cfg_path, pipeline_config(bundled, tmp.path() / "out"));

    for (const auto& stage : pipeline_stages()) {
        CAPTURE(stage);
        REQUIRE(run({stage, "--config", cfg_path.string()}) == 0);
    }
    REQUIRE(run({"evaluate", "--config", cfg_path.string(), "--predictions",
                 (tmp.path() / "out" / "predictions.jsonl").string()}) == 0);

    const fs::path report = tmp.path() / "out" / "report.json";
    REQUIRE(fs::exists(report));
    const auto parsed = nlohmann::json::parse(read_file(report));
    CHECK(parsed.contains("auc"));
    CHECK(parsed.contains("uauc"));
    CHECK(parsed.contains("config_digest"));
    CHECK(parsed.at("seed") == 42);

    SUBCASE("input files are never mutated") {
        CHECK(read_file(bundled / "interactions.tsv") ==
              read_file(bundled / "interactions.tsv"));
    }
    SUBCASE("evaluate can also score pairs directly") {
        CHECK(run({"evaluate", "--config", cfg_path.string(), "--out",
                   (tmp.path() / "out" / "report2.json").string()}) == 0);
        const auto direct = nlohmann::json::parse(read_file(tmp.path() / "out" / "report2.json"));
        CHECK(direct.at("auc") == parsed.at("auc"));
        CHECK(direct.at("uauc") == parsed.at("uauc"));
    }
}

TEST_CASE("subcommands are idempotent: re-running produces identical artifacts") {
    TempDir tmp;
    const auto data = score::testing::make_planted_signal(42);
    data.write(tmp.path() / "data");
    const fs::path cfg_path = tmp.path() / "cfg.toml";
    atomic_write_file(cfg_path, pipeline_config(tmp.path() / "data", tmp.path() / "out"));

    const std::string before_inputs = read_file(tmp.path() / "data" / "interactions.tsv");

    REQUIRE(run({"ingest", "--config", cfg_path.string()}) == 0);
    const std::string corpus_once = read_file(tmp.path() / "out" / "corpus" / "interactions.tsv");
    REQUIRE(run({"ingest", "--config", cfg_path.string()}) == 0);
    CHECK(read_file(tmp.path() / "out" / "corpus" / "interactions.tsv") == corpus_once);

    REQUIRE(run({"split", "--config", cfg_path.string()}) == 0);
    const std::string train_once = read_file(tmp.path() / "out" / "splits" / "train.tsv");
    REQUIRE(run({"split", "--config", cfg_path.string()}) == 0);
    CHECK(read_file(tmp.path() / "out" / "splits" / "train.tsv") == train_once);

    REQUIRE(run({"train-crm", "--config", cfg_path.string()}) == 0);
    const std::string crm_once = read_file(tmp.path() / "out" / "crm.bin");
    REQUIRE(run({"train-crm", "--config", cfg_path.string()}) == 0);
    CHECK(read_file(tmp.path() / "out" / "crm.bin") == crm_once);

    CHECK(read_file(tmp.path() / "data" / "interactions.tsv") == before_inputs);
}

TEST_CASE("flags override config keys") {
    TempDir tmp;
    const auto data = score::testing::make_planted_signal(42);
    data.write(tmp.path() / "data");
    const fs::path cfg_path = tmp.path() / "cfg.toml";
    atomic_write_file(cfg_path, pipeline_config(tmp.path() / "data", tmp.path() / "out"));

    // --out wins over the workdir-derived path.
    REQUIRE(run({"ingest", "--config", cfg_path.string(), "--out",
                 (tmp.path() / "elsewhere").string()}) == 0);
    CHECK(fs::exists(tmp.path() / "elsewhere" / "interactions.tsv"));
    CHECK_FALSE(fs::exists(tmp.path() / "out" / "corpus"));

    // --seed flows into the config digest.
    RunConfig a = RunConfig::from(KvConfig::parse_file(cfg_path));
    RunConfig b = a;
    b.seed = 7;
    CHECK(a.digest() != b.digest());
}

TEST_CASE("config parser accepts the TOML subset and rejects junk") {
    const auto kv = KvConfig::parse_string(
        "# comment\n"
        "seed = 9\n"
        "[paths]\n"
        "workdir = \"some dir/with space\"  \n"
        "[params]\n"
        "tau_car = 0.25  # trailing comment\n"
        "k_s = 0\n"
        "flag = true\n");
    CHECK(kv.get_int("seed", 0) == 9);
    CHECK(kv.get_string("paths.workdir", "") == "some dir/with space");
    CHECK(kv.get_double("params.tau_car", 0) == doctest::Approx(0.25));
    CHECK(kv.get_int("params.k_s", 5) == 0);
    CHECK(kv.get_bool("params.flag", false));

    CHECK_THROWS_AS(KvConfig::parse_string("nonsense line\n"), ParseError);
    CHECK_THROWS_AS(KvConfig::parse_string("[unterminated\nk = 1\n"), ParseError);
    CHECK_THROWS_AS(KvConfig::parse_string("k = \"unterminated\n"), ParseError);

    RunConfig cfg = RunConfig::from(kv);
    CHECK(cfg.k_s == 0);  // k_s = 0 is legal (basic-prompt ablation)
    cfg.k_e = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("k_e"), ConfigError);
}
