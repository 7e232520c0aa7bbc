// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include "support.hh"

#include <catch_amalgamated.hpp>

using namespace tmeta;

namespace {

auto leaf(std::string_view text) -> TheoryExpression { return TheoryExpression::make_leaf(parse_term(text)); }

auto has_expression(TypeSpec const &spec, std::string_view op, std::size_t arity) -> bool {
    return std::any_of(spec.expressions.begin(), spec.expressions.end(),
                       [&](ExpressionSpec const &e) { return e.op == op && e.arity() == arity; });
}

} // namespace

TEST_CASE("the TEL grammar declares its operators", "[grammar]") {
    auto g = test::grammar_for(Logic::Tel);
    auto const &tel = g.type("tel");
    CHECK(tel.subtypes == std::vector<std::string>{"atom"});
    CHECK(has_expression(tel, "true", 0));
    CHECK(has_expression(tel, "not", 1));
    CHECK(has_expression(tel, "initial", 0));
    CHECK(has_expression(tel, "next", 1));
    CHECK(has_expression(tel, "eventually", 1));
    REQUIRE(tel.macros.size() == 1);
    CHECK(format_expression(tel.macros[0].pattern) == "&final");
}

TEST_CASE("the MEL grammar restricts intervals to arguments", "[grammar]") {
    auto g = test::grammar_for(Logic::Mel);
    CHECK(g.has_type("mel"));
    CHECK(g.type("interval").occurrence == Occurrence::ArgumentOnly);
    CHECK(g.type("ub").occurrence == Occurrence::ArgumentOnly);
    CHECK(g.is_subtype("supremum", "ub"));
    CHECK(g.is_subtype("number", "ub"));
}

TEST_CASE("cyclic subtypes are rejected", "[grammar]") {
    TheoryGrammar g;
    CHECK_THROWS_AS(g.add("#type tel { subtypes: tel. }"), TypeError);
    TheoryGrammar h;
    CHECK_THROWS_AS(h.add("#type a { subtypes: b. } #type b { subtypes: a. }"), TypeError);
}

TEST_CASE("atoms are typed as atoms and temporal formulas", "[grammar]") {
    auto g = test::grammar_for(Logic::Tel);
    auto typed = g.typecheck(leaf("green(l1)"), "tel");
    REQUIRE(typed.assigned_type);
    CHECK(*typed.assigned_type == "atom");
    CHECK(std::find(typed.memberships.begin(), typed.memberships.end(), "tel") != typed.memberships.end());
}

TEST_CASE("intervals accept numbers and the supremum", "[grammar]") {
    auto g = test::grammar_for(Logic::Mel);
    CHECK(g.typecheck(parse_expression("&i(0,#sup)"), "interval").assigned_type == "interval");
    CHECK(g.typecheck(parse_expression("&i(2,5)"), "interval").assigned_type == "interval");
    CHECK_THROWS_AS(g.typecheck(parse_expression("&i(#sup,5)"), "interval"), TypeError);
}

TEST_CASE("operators of another logic are rejected", "[grammar]") {
    auto g = test::grammar_for(Logic::Tel);
    CHECK_THROWS_AS(g.typecheck(parse_expression("&next(&i(0,5))"), "tel"), TypeError);
    CHECK_THROWS_AS(g.typecheck(parse_expression("&next(p,q)"), "tel"), TypeError);
}

TEST_CASE("macros expand where their type is expected", "[grammar]") {
    auto tel = test::grammar_for(Logic::Tel);
    CHECK(format_expression(tel.typecheck(parse_expression("&final"), "tel")) == "&not(&next(&true))");
    auto mel = test::grammar_for(Logic::Mel);
    CHECK(format_expression(mel.typecheck(parse_expression("&next(push(l1))"), "mel")) ==
          "&next(&i(0,#sup),push(l1))");
    auto del = test::grammar_for(Logic::Del);
    CHECK(format_expression(del.typecheck(leaf("green(L)"), "path")) == "&seq(&test(green(L)),&step)");
}

TEST_CASE("macro expansion is idempotent", "[grammar][property]") {
    auto del = test::grammar_for(Logic::Del);
    test::PathGenerator gen{9};
    for (int i = 0; i < 100; ++i) {
        auto expr = parse_expression("&eventually(" + gen.path(3) + ",&final)");
        auto once = del.expand_macros(expr);
        CHECK(del.expand_macros(once) == once);
    }
}

TEST_CASE("typechecking is deterministic", "[grammar][property]") {
    auto del = test::grammar_for(Logic::Del);
    test::PathGenerator gen{10};
    for (int i = 0; i < 50; ++i) {
        auto expr = parse_expression("&always(" + gen.path(3) + ",p)");
        auto a = del.typecheck(expr, "del");
        auto b = del.typecheck(expr, "del");
        CHECK(a == b);
        CHECK(a.assigned_type == b.assigned_type);
        CHECK(a.memberships == b.memberships);
    }
}

TEST_CASE("subtype membership is reflexive and transitive", "[grammar][property]") {
    auto g = test::grammar_for(Logic::Del);
    std::vector<std::string> types{"atom", "number", "tel", "del", "path"};
    for (auto const &a : types) {
        CHECK(g.is_subtype(a, a));
        for (auto const &b : types) {
            for (auto const &c : types) {
                if (g.is_subtype(a, b) && g.is_subtype(b, c)) {
                    CHECK(g.is_subtype(a, c));
                }
            }
        }
    }
    CHECK(g.is_subtype("atom", "del"));
    CHECK_FALSE(g.is_subtype("del", "tel"));
}

TEST_CASE("occurrence restrictions are diagnosed", "[grammar]") {
    auto mel = test::grammar_for(Logic::Mel);
    auto diags = mel.check_occurrence(parse_program("p :- &i(1,2)."));
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].message.find("argument") != std::string::npos);

    auto tel = test::grammar_for(Logic::Tel);
    CHECK(tel.check_occurrence(tel.typecheck_program(parse_program(test::read_program("telex.lp")))).empty());

    TheoryGrammar body_only;
    body_only.add(R"(#type tel {
        subtypes: atom.
        expressions: &initial.
        occurrence: body.
    })");
    auto head = body_only.check_occurrence(parse_program("&initial :- p."));
    REQUIRE(head.size() == 1);
    CHECK(head[0].message.find("head") != std::string::npos);
    CHECK(body_only.check_occurrence(parse_program("p :- &initial.")).empty());
}

TEST_CASE("macro redefinitions produce warnings", "[grammar]") {
    TheoryGrammar g;
    g.add(builtin_grammar("tel"));
    g.add("#type tel { macros: &final => &not(&next(&true)). }");
    CHECK_FALSE(g.warnings().empty());
}
