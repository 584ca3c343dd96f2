#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"

using namespace rfh;

TEST_CASE("TOML subset parser: sections, strings, numbers, booleans, arrays") {
    TomlTable t = parse_toml(
        "# comment\n"
        "[spectrum]\n"
        "model = \"circle\"   # trailing comment\n"
        "num_modes = 8\n"
        "\n"
        "[index]\n"
        "truncation = [8, 12, 16]\n"
        "[flow]\n"
        "horizon = 2.5\n");
    CHECK(t.find("spectrum.model")->str == "circle");
    CHECK(t.find("spectrum.num_modes")->num == 8.0);
    REQUIRE(t.find("index.truncation") != nullptr);
    CHECK(t.find("index.truncation")->array == std::vector<double>{8, 12, 16});
    CHECK(t.find("flow.horizon")->num == 2.5);
    CHECK(t.find("missing.key") == nullptr);
}

TEST_CASE("parser errors carry line numbers") {
    auto expect_line = [](const std::string& text, const std::string& fragment) {
        try {
            parse_toml(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };
    expect_line("a = \n", "line 1");
    expect_line("[s]\nkey value\n", "line 2");
    expect_line("[s]\nk = 1\nk = 2\n", "duplicate key");
    expect_line("k = \"unterminated\n", "unterminated string");
    expect_line("k = [1, 2\n", "unterminated array");
    expect_line("k = 12abc\n", "trailing characters");
}

TEST_CASE("run config defaults and validation") {
    RunConfig cfg = run_config_from_toml(parse_toml(""));
    CHECK(cfg.spectrum.model == SpectrumModel::Circle);
    CHECK(cfg.spectrum.num_modes == 8);
    CHECK(cfg.nonlin.kind == NonlinKind::Quadratic);
    CHECK(cfg.s == 0.5);
    CHECK(cfg.truncation == std::vector<int>{8, 12, 16});
    CHECK(cfg.seed == 0u);

    CHECK_THROWS_AS(run_config_from_toml(parse_toml("[functional]\ns = 1.5\n")),
                    ConfigError);
    CHECK_THROWS_AS(run_config_from_toml(parse_toml("[nonexistent]\nkey = 1\n")),
                    ConfigError);
    CHECK_THROWS_AS(
        run_config_from_toml(parse_toml("[nonlinearity]\nkind = \"power\"\np = 0.5\n")),
        ConfigError);
    CHECK_THROWS_AS(run_config_from_toml(parse_toml("[spectrum]\nmodel = \"weird\"\n")),
                    ConfigError);
    CHECK_THROWS_AS(
        run_config_from_toml(parse_toml("[spectrum]\nmodel = \"synthetic\"\n")),
        ConfigError);
}

TEST_CASE("synthetic spectrum block") {
    RunConfig cfg = run_config_from_toml(parse_toml(
        "[spectrum]\n"
        "model = \"synthetic\"\n"
        "values = [1.0, -2.0]\n"
        "multiplicities = [2, 1]\n"));
    CHECK(cfg.spectrum.model == SpectrumModel::Synthetic);
    REQUIRE(cfg.spectrum.levels.size() == 2);
    CHECK(cfg.spectrum.levels[0].lambda == -2.0);
    CHECK(cfg.spectrum.levels[1].multiplicity == 2);
}

TEST_CASE("automatic s selection for power nonlinearities") {
    RunConfig cfg = run_config_from_toml(parse_toml(
        "[nonlinearity]\n"
        "kind = \"power\"\n"
        "p = 3.0\n"
        "q = 3.0\n"
        "[functional]\n"
        "s = \"auto\"\n"));
    CHECK(cfg.s_auto);
    FunctionalContext ctx = make_context(cfg);
    CHECK(ctx.s == doctest::Approx(select_s(1, 3.0, 3.0).s));

    RunConfig quad = run_config_from_toml(parse_toml("[functional]\ns = \"auto\"\n"));
    CHECK_THROWS_AS(make_context(quad), ConfigError);
}

TEST_CASE("flow options flow through the config") {
    RunConfig cfg = run_config_from_toml(parse_toml(
        "[flow]\n"
        "horizon = 3.0\n"
        "abs_tol = 1e-8\n"
        "[run]\n"
        "seed = 42\n"
        "threads = 2\n"));
    CHECK(cfg.flow.horizon == 3.0);
    CHECK(cfg.flow.abs_tol == 1e-8);
    CHECK(cfg.seed == 42u);
    CHECK(cfg.threads == 2);
}
