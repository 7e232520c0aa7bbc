// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include "support.hh"

#include <catch_amalgamated.hpp>

using namespace tmeta;

namespace {

auto random_expression(std::mt19937_64 &rng, int depth) -> std::string {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>{lo, hi}(rng); };
    static constexpr std::array<char const *, 6> leaves{"green(l1)", "p", "42", "#sup", "f(X,g(1))", "\"s\""};
    static constexpr std::array<char const *, 6> ops{"next", "eventually", "seq", "choice", "star", "i"};
    if (depth == 0 || pick(0, 3) == 0) {
        return pick(0, 4) == 0 ? "&step" : leaves[pick(0, leaves.size() - 1)];
    }
    std::string out = std::string{"&"} + ops[pick(0, ops.size() - 1)] + "(";
    auto arity = pick(1, 3);
    for (int i = 0; i < arity; ++i) {
        out += (i == 0 ? "" : ",") + random_expression(rng, depth - 1);
    }
    return out + ")";
}

} // namespace

TEST_CASE("rules are parsed into heads and bodies", "[ast]") {
    auto prg = parse_program("red(L) :- not green(L), light(L).");
    REQUIRE(prg.statements.size() == 1);
    auto const &rule = std::get<Rule>(prg.statements[0]);
    CHECK(rule.kind == HeadKind::Disjunction);
    REQUIRE(rule.head.size() == 1);
    CHECK(format_literal(rule.head[0].literal) == "red(L)");
    REQUIRE(rule.body.size() == 2);
    CHECK(rule.body[0].literal.sign == Sign::Negative);
    CHECK(format_term(rule.body[0].literal.atom()) == "green(L)");
    CHECK(rule.body[1].literal.sign == Sign::Positive);
    CHECK(format_term(rule.body[1].literal.atom()) == "light(L)");
}

TEST_CASE("empty input gives an empty program", "[ast]") {
    CHECK(parse_program("").statements.empty());
    CHECK(parse_program("  % only a comment\n").statements.empty());
}

TEST_CASE("theory expressions in heads", "[ast]") {
    auto prg = parse_program("&next(&eventually(green(L))) :- push(L).");
    auto const &rule = std::get<Rule>(prg.statements[0]);
    REQUIRE(rule.head[0].literal.is_theory());
    auto const &expr = rule.head[0].literal.theory();
    CHECK(expr.op == "next");
    REQUIRE(expr.arity() == 1);
    CHECK(expr.args[0].op == "eventually");
    CHECK(format_expression(expr) == "&next(&eventually(green(L)))");
}

TEST_CASE("expressions are formatted in surface syntax", "[ast]") {
    CHECK(format_expression(parse_expression("&next(&eventually(green(l1)))")) == "&next(&eventually(green(l1)))");
    CHECK(format_expression(parse_expression("&i(0, #sup)")) == "&i(0,#sup)");
    CHECK(format_expression(parse_expression("&star(&seq(&test(green(l1)), &step))")) ==
          "&star(&seq(&test(green(l1)),&step))");
}

TEST_CASE("syntax errors carry a location", "[ast]") {
    try {
        (void)parse_program("p :- q\nr.", "input.lp");
        FAIL("expected a syntax error");
    } catch (SyntaxError const &e) {
        CHECK(e.location().file == "input.lp");
        CHECK(e.location().line == 2);
    }
    CHECK_THROWS_AS(parse_program("p(."), SyntaxError);
    CHECK_THROWS_AS(parse_program("&next(p"), SyntaxError);
}

TEST_CASE("expression round trip on random expressions", "[ast][property]") {
    std::mt19937_64 rng{11};
    for (int i = 0; i < 300; ++i) {
        auto text = random_expression(rng, 4);
        if (text.front() != '&') {
            continue;
        }
        auto expr = parse_expression(text);
        auto printed = format_expression(expr);
        INFO(text);
        CHECK(parse_expression(printed) == expr);
        CHECK(format_expression(parse_expression(printed)) == printed);
    }
}

TEST_CASE("program round trip on random programs", "[ast][property]") {
    test::TelGenerator tel{3};
    test::DelGenerator del{4};
    for (int i = 0; i < 200; ++i) {
        auto text = i % 2 == 0 ? tel.program() : del.program();
        INFO(text);
        auto prg = parse_program(text);
        CHECK(parse_program(format_program(prg)) == prg);
    }
    auto directives = parse_program(
        "#const n = 3. #external p(X) : q(X). #show. #show green/1. #show s(L) : g(L). { a; b } :- c. :- a, b.");
    CHECK(parse_program(format_program(directives)) == directives);
}

TEST_CASE("token locations are monotone", "[ast][property]") {
    test::TelGenerator gen{5};
    for (int i = 0; i < 50; ++i) {
        auto tokens = detail::tokenize(gen.program() + gen.program());
        for (std::size_t k = 1; k < tokens.size(); ++k) {
            auto const &a = tokens[k - 1].loc;
            auto const &b = tokens[k].loc;
            CHECK(std::pair{a.line, a.column} <= std::pair{b.line, b.column});
            CHECK(tokens[k - 1].offset <= tokens[k].offset);
        }
    }
}
