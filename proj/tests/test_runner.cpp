#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "jumplab/errors.hpp"
#include "jumplab/runner.hpp"

using namespace jumplab;
namespace fs = std::filesystem;

static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

template <class Fn>
static std::string error_text(Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

TEST_CASE("config keys cover every documented parameter type") {
    const auto& keys = config_keys();
    CHECK(keys.size() > 50);
    RunConfig cfg;
    std::set<std::string> seen;
    bool have_seed = false;
    for (const auto& k : keys) {
        CHECK(seen.insert(k.key).second);   // no duplicates
        CHECK_FALSE(k.help.empty());
        CHECK((k.type == "string" || k.type == "int" || k.type == "uint" ||
               k.type == "float" || k.type == "bool"));
        CHECK_FALSE((config_get(cfg, k.key).empty() && k.type != "string"));
        if (k.key == "synth.seed") {
            have_seed = true;
            CHECK(k.type == "uint");
        }
    }
    CHECK(have_seed);
}

TEST_CASE("set and get round-trip each value type") {
    RunConfig cfg;
    config_set(cfg, "paths.bars", "some/dir/bars.csv");
    CHECK(cfg.bars == "some/dir/bars.csv");
    CHECK(config_get(cfg, "paths.bars") == "some/dir/bars.csv");

    config_set(cfg, "detect-jumps.baseline_window", "90");
    CHECK(cfg.baseline_window == 90);
    config_set(cfg, "synth.seed", "18446744073709551615");   // uint64 max
    CHECK(cfg.seed == 18446744073709551615ull);
    CHECK(config_get(cfg, "synth.seed") == "18446744073709551615");

    config_set(cfg, "detect-jumps.s", "5.25");
    CHECK(cfg.s == 5.25);
    CHECK(config_get(cfg, "detect-jumps.s") == "5.25");

    for (const char* v : {"true", "1", "yes"}) {
        config_set(cfg, "taildep.standardize", v);
        CHECK(cfg.tail_standardize);
        config_set(cfg, "taildep.standardize", "false");
        CHECK_FALSE(cfg.tail_standardize);
    }

    CHECK(error_text([&] { config_set(cfg, "nope.nope", "1"); })
              .find("unknown parameter") != std::string::npos);
    CHECK(error_text([&] { config_set(cfg, "detect-jumps.s", "abc"); })
              .find("detect-jumps.s") != std::string::npos);
    CHECK(error_text([&] { config_set(cfg, "synth.n_days", "12.5"); })
              .find("synth.n_days") != std::string::npos);
    CHECK_THROWS_AS(config_get(cfg, "nope.nope"), input_error);
}

TEST_CASE("config file: sections, comments, and line numbers in errors") {
    {
        std::ofstream f("tmp_conf.ini");
        f << "# comment\n"
          << "[detect-jumps]\n"
          << "s = 6.5\n"
          << "baseline_window = 60   \n"
          << "\n"
          << "; another comment\n"
          << "[paths]\n"
          << "out = tmp_conf_out\n";
    }
    RunConfig cfg;
    load_config_file(cfg, "tmp_conf.ini");
    CHECK(cfg.s == 6.5);
    CHECK(cfg.baseline_window == 60);
    CHECK(cfg.out == "tmp_conf_out");
    fs::remove("tmp_conf.ini");

    {
        std::ofstream f("tmp_conf_bad.ini");
        f << "[detect-jumps]\nwhat is this\n";
    }
    std::string msg = error_text([&] { load_config_file(cfg, "tmp_conf_bad.ini"); });
    CHECK(msg.find("tmp_conf_bad.ini") != std::string::npos);
    CHECK(msg.find(":2") != std::string::npos);
    fs::remove("tmp_conf_bad.ini");

    CHECK_THROWS_AS(load_config_file(cfg, "tmp_conf_missing.ini"), input_error);
}

TEST_CASE("overrides use key=value and win over defaults") {
    RunConfig cfg;
    apply_override(cfg, "collective.s_prime=0.25");
    CHECK(cfg.s_prime == 0.25);
    apply_override(cfg, "paths.out=a=b");   // value may contain '='
    CHECK(cfg.out == "a=b");
    CHECK_THROWS_AS(apply_override(cfg, "collective.s_prime"), input_error);
}

TEST_CASE("version string looks like a version") {
    std::string v = version_string();
    REQUIRE_FALSE(v.empty());
    CHECK(v.find('.') != std::string::npos);
}

static RunConfig tiny_config(const std::string& out) {
    RunConfig cfg;
    cfg.out = out;
    cfg.n_stocks = 20;
    cfg.n_days = 8;
    cfg.n_trades = 20000;
    cfg.news_mu = 0.004;
    return cfg;
}

TEST_CASE("the full pipeline runs end to end on a small scenario") {
    fs::remove_all("tmp_run1");
    fs::remove_all("tmp_run2");
    RunConfig cfg = tiny_config("tmp_run1");

    const char* commands[] = {"synth",      "ingest",  "detect-jumps", "event-study",
                              "collective", "taildep", "report"};
    for (const char* cmd : commands) {
        auto written = run_command(cmd, cfg);
        CHECK(written.size() >= 2);   // artifacts + manifest
        for (const auto& path : written) {
            INFO(cmd << " -> " << path);
            CHECK(fs::exists(path));
        }
        CHECK(fs::exists("tmp_run1/manifest_" + std::string(cmd) + ".json"));
    }

    auto truth = nlohmann::json::parse(slurp("tmp_run1/truth.json"));
    CHECK(truth["returns"]["tail_exponent"] == 4.0);
    CHECK(truth["seed"] == 42);
    CHECK(truth["shocks"].is_array());
    CHECK(truth["news"]["n_planted_jumps"].get<int64_t>() > 0);

    auto mf = nlohmann::json::parse(slurp("tmp_run1/manifest_detect-jumps.json"));
    CHECK(mf["command"] == "detect-jumps");
    CHECK(mf["software"]["jumplab"] == version_string());
    CHECK(mf["parameters"]["detect-jumps.s"] == "4");
    CHECK(mf["inputs"].is_object());
    CHECK(mf["inputs"].contains("tmp_run1/bars.csv"));
    CHECK(mf["outputs"].is_object());
    CHECK(mf["timing"]["wall_seconds"].is_number());
    for (const auto& [path, digest] : mf["outputs"].items()) {
        CHECK(fs::exists(path));
        CHECK(digest.get<std::string>().size() == 64);
    }

    auto summary = nlohmann::json::parse(slurp("tmp_run1/report_summary.json"));
    CHECK(summary.contains("jump_tail"));
    CHECK(summary.contains("relaxation"));
    CHECK(summary.contains("collective"));
    CHECK(summary.contains("tail_dependence"));

    // same seed, fresh directory: data artifacts are byte-identical
    RunConfig cfg2 = tiny_config("tmp_run2");
    run_command("synth", cfg2);
    run_command("ingest", cfg2);
    run_command("detect-jumps", cfg2);
    for (const char* name : {"bars.csv", "trades.csv", "news_dj.csv", "truth.json",
                             "jumps.csv", "tail_fit.json", "events.csv"})
        CHECK(slurp("tmp_run1/" + std::string(name)) == slurp("tmp_run2/" + std::string(name)));

    fs::remove_all("tmp_run1");
    fs::remove_all("tmp_run2");
}

TEST_CASE("missing inputs and artifacts surface as typed errors") {
    fs::remove_all("tmp_run_err");
    RunConfig cfg = tiny_config("tmp_run_err");

    CHECK_THROWS_AS(run_command("frobnicate", cfg), input_error);
    // report before anything exists: refusal listing what is missing
    std::string msg = error_text([&] { run_command("report", cfg); });
    CHECK(msg.find("missing artifacts") != std::string::npos);
    CHECK(msg.find("ccdf.csv") != std::string::npos);
    // detect-jumps without bars: input error naming the path
    std::string msg2 = error_text([&] { run_command("detect-jumps", cfg); });
    CHECK(msg2.find("bars.csv") != std::string::npos);

    cfg.bars = "tmp_run_err/enoent.csv";
    CHECK_THROWS_AS(run_command("detect-jumps", cfg), input_error);

    cfg = tiny_config("tmp_run_err");
    cfg.s = 0.5;   // threshold must exceed 1
    run_command("synth", cfg);
    CHECK_THROWS_AS(run_command("detect-jumps", cfg), input_error);

    cfg.s = 4.0;
    cfg.chi_mode = "sideways";
    CHECK_THROWS_AS(run_command("collective", cfg), input_error);

    fs::remove_all("tmp_run_err");
}
