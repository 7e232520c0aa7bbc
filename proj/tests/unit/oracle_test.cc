// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include "support.hh"

#include <catch_amalgamated.hpp>

using namespace tmeta;

namespace {

using StepRelation = std::set<std::pair<int, int>>;

auto sym(std::string_view text) -> Symbol { return *parse_term(text).to_symbol(); }

auto formula(std::string const &text, Logic logic) -> oracle::Formula {
    auto expr = text.front() == '&' ? parse_expression(text) : TheoryExpression::make_leaf(parse_term(text));
    return oracle::to_formula(test::grammar_for(logic).typecheck(expr, std::string{to_string(logic)}));
}

auto path(std::string const &text) -> oracle::Path {
    auto expr = text.front() == '&' ? parse_expression(text) : TheoryExpression::make_leaf(parse_term(text));
    return oracle::to_path(test::grammar_for(Logic::Del).typecheck(expr, "path"));
}

auto random_trace(std::mt19937_64 &rng, int horizon) -> oracle::Trace {
    oracle::Trace out;
    for (int t = 0; t <= horizon; ++t) {
        auto &state = out.states.emplace_back();
        for (auto const *atom : {"p", "q"}) {
            if (std::uniform_int_distribution<int>{0, 1}(rng) == 1) {
                state.insert(sym(atom));
            }
        }
    }
    return out;
}

//! Reflexive and transitive closure (Warshall).
auto closure(StepRelation rel, int horizon) -> StepRelation {
    for (int t = 0; t <= horizon; ++t) {
        rel.emplace(t, t);
    }
    for (int k = 0; k <= horizon; ++k) {
        for (int i = 0; i <= horizon; ++i) {
            for (int j = 0; j <= horizon; ++j) {
                if (rel.contains({i, k}) && rel.contains({k, j})) {
                    rel.emplace(i, j);
                }
            }
        }
    }
    return rel;
}

} // namespace

TEST_CASE("linear-time operators on a fixed trace", "[oracle]") {
    oracle::Trace trace;
    trace.states = {{sym("p")}, {}, {sym("q")}};
    CHECK(oracle::eval_formula(trace, 0, formula("p", Logic::Tel)));
    CHECK_FALSE(oracle::eval_formula(trace, 1, formula("p", Logic::Tel)));
    CHECK(oracle::eval_formula(trace, 0, formula("&initial", Logic::Tel)));
    CHECK_FALSE(oracle::eval_formula(trace, 1, formula("&initial", Logic::Tel)));
    CHECK(oracle::eval_formula(trace, 2, formula("&final", Logic::Tel)));
    CHECK_FALSE(oracle::eval_formula(trace, 1, formula("&final", Logic::Tel)));
    CHECK(oracle::eval_formula(trace, 1, formula("&next(q)", Logic::Tel)));
    CHECK_FALSE(oracle::eval_formula(trace, 2, formula("&next(&true)", Logic::Tel)));
    CHECK(oracle::eval_formula(trace, 0, formula("&eventually(q)", Logic::Tel)));
    CHECK_FALSE(oracle::eval_formula(trace, 1, formula("&eventually(p)", Logic::Tel)));
    CHECK(oracle::eval_formula(trace, 1, formula("&not(p)", Logic::Tel)));
}

TEST_CASE("metric operators respect the timing function", "[oracle]") {
    oracle::Trace trace;
    trace.states = {{}, {sym("p")}, {sym("q")}};
    trace.tau = std::vector<int>{0, 2, 7};
    CHECK(oracle::eval_formula(trace, 0, formula("&next(&i(2,3),p)", Logic::Mel)));
    CHECK_FALSE(oracle::eval_formula(trace, 0, formula("&next(&i(0,2),p)", Logic::Mel)));
    CHECK(oracle::eval_formula(trace, 0, formula("&eventually(&i(5,#sup),q)", Logic::Mel)));
    CHECK_FALSE(oracle::eval_formula(trace, 0, formula("&eventually(&i(0,7),q)", Logic::Mel)));
    CHECK(oracle::eval_formula(trace, 1, formula("&eventually(&i(5,6),q)", Logic::Mel)));
}

TEST_CASE("path relations on a fixed trace", "[oracle]") {
    oracle::Trace trace;
    trace.states = {{sym("p")}, {sym("q")}, {sym("p")}};
    CHECK(oracle::eval_path(trace, path("&step")) == StepRelation{{0, 1}, {1, 2}});
    CHECK(oracle::eval_path(trace, path("&test(p)")) == StepRelation{{0, 0}, {2, 2}});
    CHECK(oracle::eval_path(trace, path("p")) == StepRelation{{0, 1}});
    CHECK(oracle::eval_path(trace, path("&seq(p,q)")) == StepRelation{{0, 2}});
    CHECK(oracle::eval_path(trace, path("&choice(p,q)")) == StepRelation{{0, 1}, {1, 2}});
    CHECK(oracle::eval_path(trace, path("&star(&step)")) ==
          StepRelation{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}});
}

TEST_CASE("star is the least reflexive and transitive closure", "[oracle][property]") {
    test::PathGenerator gen{71};
    std::mt19937_64 rng{72};
    for (int i = 0; i < 200; ++i) {
        auto text = gen.path(2);
        auto horizon = i % 4;
        auto trace = random_trace(rng, horizon);
        INFO(text);
        auto inner = oracle::eval_path(trace, path(text));
        CHECK(oracle::eval_path(trace, path("&star(" + text + ")")) == closure(inner, horizon));
    }
}

TEST_CASE("sequence composes relations", "[oracle][property]") {
    test::PathGenerator gen{73};
    std::mt19937_64 rng{74};
    for (int i = 0; i < 200; ++i) {
        auto a = gen.path(2);
        auto b = gen.path(2);
        auto trace = random_trace(rng, i % 4);
        auto ra = oracle::eval_path(trace, path(a));
        auto rb = oracle::eval_path(trace, path(b));
        StepRelation composed;
        for (auto [x, y] : ra) {
            for (auto [u, v] : rb) {
                if (y == u) {
                    composed.emplace(x, v);
                }
            }
        }
        CHECK(oracle::eval_path(trace, path("&seq(" + a + "," + b + ")")) == composed);
    }
}

TEST_CASE("eventually unfolds into the next state", "[oracle][property]") {
    std::mt19937_64 rng{75};
    auto ev = formula("&eventually(p)", Logic::Tel);
    auto p = formula("p", Logic::Tel);
    for (int i = 0; i < 200; ++i) {
        auto horizon = i % 5;
        auto trace = random_trace(rng, horizon);
        for (int t = 0; t <= horizon; ++t) {
            bool unfolded = oracle::eval_formula(trace, t, p) ||
                            (t < horizon && oracle::eval_formula(trace, t + 1, ev));
            CHECK(oracle::eval_formula(trace, t, ev) == unfolded);
        }
    }
}

TEST_CASE("boxes are dual to diamonds on total traces", "[oracle][property]") {
    test::PathGenerator gen{76};
    std::mt19937_64 rng{77};
    for (int i = 0; i < 200; ++i) {
        auto text = gen.path(2);
        auto horizon = i % 4;
        auto trace = random_trace(rng, horizon);
        auto box = formula("&always(" + text + ",p)", Logic::Del);
        auto diamond = formula("&eventually(" + text + ",&not(p))", Logic::Del);
        for (int t = 0; t <= horizon; ++t) {
            CHECK(oracle::eval_formula(trace, t, box) != oracle::eval_formula(trace, t, diamond));
        }
    }
}

TEST_CASE("temporal models of small programs", "[oracle]") {
    CHECK(test::oracle_traces("", Logic::Tel, 0).size() == 1);
    CHECK(test::oracle_traces("", Logic::Tel, 2).size() == 1);
    CHECK(test::oracle_traces("{ a }.", Logic::Tel, 1).size() == 4);
    CHECK(test::oracle_traces("a :- not a.", Logic::Tel, 1).empty());
    auto telex = test::oracle_traces(test::read_program("telex.lp"), Logic::Tel, 2);
    REQUIRE(telex.size() == 1);
    auto const &states = telex.begin()->states;
    CHECK(states[1].contains(sym("push(l1)")));
    CHECK(states[2].contains(sym("green(l1)")));
    CHECK_FALSE(states[2].contains(sym("red(l1)")));
    CHECK(test::oracle_traces(test::read_program("telex.lp"), Logic::Tel, 1).empty());
}
