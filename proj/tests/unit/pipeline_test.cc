// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include "support.hh"

#include <tmeta/transform.hh>

#include <catch_amalgamated.hpp>

using namespace tmeta;

namespace {

auto config_for(Logic logic, int horizon, std::optional<int> max_time = {}) -> PipelineConfig {
    PipelineConfig config;
    config.logic = logic;
    config.constants = {{"n", Symbol::number(horizon)}};
    config.max_time = max_time;
    return config;
}

auto collect(std::string const &text, PipelineConfig const &config) -> std::vector<TemporalModel> {
    std::vector<TemporalModel> out;
    (void)solve_temporal(parse_program(text), config, [&](TemporalModel const &m) { out.push_back(m); });
    return out;
}

auto printed(std::vector<TemporalModel> const &models) -> std::vector<std::string> {
    std::vector<std::string> out;
    for (auto const &m : models) {
        out.push_back(format_temporal(m));
    }
    return out;
}

} // namespace

TEST_CASE("the horizon comes from the constant n", "[pipeline]") {
    PipelineConfig config;
    CHECK(horizon_of(config) == 0);
    config.constants = {parse_constant("n=4")};
    CHECK(horizon_of(config) == 4);
    config.constants = {parse_constant("n=-1")};
    CHECK_THROWS_AS(horizon_of(config), Error);
    config.constants = {parse_constant("n=abc")};
    CHECK_THROWS_AS(horizon_of(config), Error);
}

TEST_CASE("the temporal printer lists one block per state", "[pipeline]") {
    auto models = collect(test::read_program("telex.lp"), config_for(Logic::Tel, 2));
    REQUIRE(models.size() == 1);
    CHECK(format_temporal(models[0]) == " State 0:\n  light(l1) red(l1)\n"
                                        " State 1:\n  light(l1) push(l1) red(l1)\n"
                                        " State 2:\n  green(l1) light(l1)\n");
    CHECK(format_flat(models[0]) ==
          "light(l1)@0 red(l1)@0 light(l1)@1 push(l1)@1 red(l1)@1 green(l1)@2 light(l1)@2\n");
}

TEST_CASE("an empty model prints empty states", "[pipeline]") {
    auto models = collect("", config_for(Logic::Tel, 2));
    REQUIRE(models.size() == 1);
    CHECK(models[0].states == std::vector<std::vector<Symbol>>(3));
    CHECK(format_temporal(models[0]) == " State 0:\n State 1:\n State 2:\n");
}

TEST_CASE("show directives filter the output", "[pipeline]") {
    auto text = test::read_program("telex.lp") + "#show green/1.";
    auto models = collect(text, config_for(Logic::Tel, 2));
    REQUIRE(models.size() == 1);
    CHECK(models[0].states[0].empty());
    CHECK(models[0].states[1].empty());
    CHECK(models[0].states[2] == std::vector<Symbol>{*parse_term("green(l1)").to_symbol()});
    auto terms = collect(test::read_program("telex.lp") + "#show go(L) : push(L).", config_for(Logic::Tel, 2));
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].states[1] == std::vector<Symbol>{*parse_term("go(l1)").to_symbol()});
}

TEST_CASE("metric models carry their timing function", "[pipeline]") {
    auto models = collect("&next(&i(2,3),p) :- &initial.", config_for(Logic::Mel, 1, 5));
    REQUIRE(models.size() == 1);
    REQUIRE(models[0].tau);
    CHECK(*models[0].tau == std::vector<int>{0, 2});
    CHECK(format_temporal(models[0]) == " State 0 (time 0):\n State 1 (time 2):\n  p\n");
}

TEST_CASE("the model limit stops enumeration", "[pipeline]") {
    auto config = config_for(Logic::Tel, 1);
    config.solve.limit = 3;
    CHECK(collect("{ a; b }.", config).size() == 3);
    config.solve.limit = 0;
    CHECK(collect("{ a; b }.", config).size() == 16);
}

TEST_CASE("staged text round trips give the same models", "[pipeline][property]") {
    test::DelGenerator gen{81};
    auto grammar = test::grammar_for(Logic::Del);
    for (int i = 0; i < 60; ++i) {
        auto text = gen.program();
        auto n = i % 3;
        INFO(text << "n=" << n);
        auto direct = printed(collect(text, config_for(Logic::Del, n)));

        auto transformed = format_program(transform(parse_program(text), grammar));
        auto gp = ground(transform(parse_program(transformed), grammar));
        auto db = parse_reified(emit_reified_text(reify(gp)));
        MetaOptions options;
        options.horizon = n;
        auto meta = PropProgram::from_ground(build_meta_program(db, Logic::Del, options));
        std::vector<std::string> staged;
        for (auto const &model : solve(meta)) {
            staged.push_back(format_temporal(decode(meta, model, db, n, false)));
        }
        CHECK(staged == direct);
    }
}

TEST_CASE("pipeline errors carry their kind", "[pipeline]") {
    CHECK_THROWS_AS(collect("p :- q(", config_for(Logic::Tel, 0)), SyntaxError);
    CHECK_THROWS_AS(collect("wait(L) :- &not(green(L)).", config_for(Logic::Tel, 0)), SafetyError);
    CHECK_THROWS_AS(collect("p :- &next(&i(1,2),q).", config_for(Logic::Tel, 0)), TypeError);
}
