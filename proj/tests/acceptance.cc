// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include "support.hh"

#include <tmeta/transform.hh>

#include <chrono>
#include <cstdio>
#include <functional>
#include <regex>

namespace {

using namespace tmeta;
using namespace tmeta::test;

//! Wall-clock limits in seconds.
constexpr double traffic_light_limit = 1.0;
constexpr double reify_limit = 1.0;
constexpr double oracle_suite_limit = 300.0;
constexpr double del_limit = 60.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

auto sym(std::string_view text) -> Symbol { return *parse_term(text).to_symbol(); }

auto state_set(std::initializer_list<char const *> atoms) -> std::vector<Symbol> {
    std::vector<Symbol> out;
    for (auto const *atom : atoms) {
        out.push_back(sym(atom));
    }
    std::sort(out.begin(), out.end());
    return out;
}

auto solve_shown(std::string const &text, Logic logic, int horizon) -> std::vector<TemporalModel> {
    PipelineConfig config;
    config.logic = logic;
    config.constants = {{"n", Symbol::number(horizon)}};
    std::vector<TemporalModel> out;
    (void)solve_temporal(parse_program(text), config, [&](TemporalModel const &model) { out.push_back(model); });
    return out;
}

auto traffic_light() -> Outcome {
    auto text = read_program("telex.lp");
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = true;
    for (int n : {0, 1}) {
        auto models = solve_shown(text, Logic::Tel, n);
        detail += "n=" + std::to_string(n) + ": " + std::to_string(models.size()) + " models; ";
        pass = pass && models.empty();
    }
    auto models = solve_shown(text, Logic::Tel, 2);
    detail += "n=2: " + std::to_string(models.size()) + " models";
    std::vector<std::vector<Symbol>> expected{state_set({"red(l1)"}), state_set({"red(l1)", "push(l1)"}),
                                              state_set({"green(l1)"})};
    if (models.size() != 1) {
        pass = false;
    } else {
        auto states = models.front().states;
        auto light = sym("light(l1)");
        for (auto &state : states) {
            std::erase(state, light);
        }
        if (states != expected) {
            pass = false;
            detail += " (unexpected trace)";
        }
    }
    auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    pass = pass && seconds < traffic_light_limit;
    return {pass, detail};
}

auto reify_golden() -> Outcome {
    auto start = std::chrono::steady_clock::now();
    constexpr char const *fixture = R"(
rule(disjunction(0),normal(0)).
atom_tuple(0). atom_tuple(0,3).
literal_tuple(0). literal_tuple(0,-2). literal_tuple(0,1).
output(light(l1),1). literal_tuple(1). literal_tuple(1,1).
output(green(l1),2). literal_tuple(2). literal_tuple(2,2).
output(red(l1),3). literal_tuple(3). literal_tuple(3,3).
)";
    auto expected = parse_reified(fixture);
    auto program = parse_program("#external light(l1). #external green(l1). red(l1) :- not green(l1), light(l1). #show.");
    auto db = reify(ground(transform(program, grammar_for(Logic::Tel))));
    auto externals = db.externals.size();
    // The fixture lists the rule and its symbol table only.
    db.externals.clear();
    auto facts = reified_facts(db).size();
    auto iso = isomorphic(db, expected);
    auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {iso && facts == 15 && externals == 2 && seconds < reify_limit,
            std::to_string(facts) + " facts besides " + std::to_string(externals) + " external/2 declarations, " +
                (iso ? "isomorphic" : "not isomorphic")};
}

auto normalize(std::string line) -> std::string {
    line = std::regex_replace(line, std::regex{R"(\s+)"}, " ");
    line = std::regex_replace(line, std::regex{R"(^ | $)"}, "");
    return line;
}

auto contains_line(std::string const &text, std::string const &line) -> bool {
    std::istringstream in{text};
    for (std::string cur; std::getline(in, cur);) {
        if (normalize(cur) == normalize(line)) {
            return true;
        }
    }
    return false;
}

auto transform_golden() -> Outcome {
    auto grammar = grammar_for(Logic::Tel);
    auto telex = format_program(transform(parse_program(read_program("telex.lp")), grammar));
    auto wait = format_program(transform(parse_program("wait(L) :- &eventually(green(L)), not green(L)."), grammar));
    bool push = contains_line(telex, "#external push(l1).");
    bool eventually = contains_line(wait, "#external &eventually(green(L)) : green(L).");
    return {push && eventually, std::string{"push external "} + (push ? "found" : "missing") + ", wait external " +
                                    (eventually ? "found" : "missing")};
}

auto oracle_equivalence() -> Outcome {
    constexpr int programs = 200;
    auto start = std::chrono::steady_clock::now();
    TelGenerator gen{20261018};
    int mismatches = 0;
    std::string first;
    std::size_t models = 0;
    for (int i = 0; i < programs; ++i) {
        auto text = gen.program();
        int n = i % 3;
        auto expected = oracle_traces(text, Logic::Tel, n);
        auto actual = meta_traces(text, Logic::Tel, n);
        models += expected.size();
        if (expected != actual) {
            ++mismatches;
            if (first.empty()) {
                first = " first: n=" + std::to_string(n) + " [" + text + "]";
            }
        }
    }
    auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {mismatches == 0 && seconds < oracle_suite_limit,
            std::to_string(programs) + " programs, " + std::to_string(models) + " oracle models, " +
                std::to_string(mismatches) + " discrepancies" + first};
}

auto metric() -> Outcome {
    constexpr int horizon = 3;
    constexpr int max_time = 20;
    constexpr int lower = 10;
    constexpr int upper = 15;
    auto models = meta_traces(read_program("melex.lp"), Logic::Mel, horizon, max_time);
    auto push = sym("push(l1)");
    auto green = sym("green(l1)");
    int violations = 0;
    for (auto const &trace : models) {
        auto const &tau = *trace.tau;
        for (int p = 0; p + 1 <= horizon; ++p) {
            if (!trace.states[p].contains(push)) {
                continue;
            }
            int anchor = p + 1;
            bool found = false;
            for (int j = anchor; j <= horizon; ++j) {
                auto diff = tau[j] - tau[anchor];
                found = found || (trace.states[j].contains(green) && lower <= diff && diff < upper);
            }
            violations += found ? 0 : 1;
        }
    }
    int scaled_mismatches = 0;
    std::size_t scaled_models = 0;
    auto scaled = read_program("melex.lp");
    scaled = std::regex_replace(scaled, std::regex{R"(&i\(10,15\))"}, "&i(2,4)");
    constexpr int scaled_max_time = 6;
    for (int n = 0; n <= 3; ++n) {
        auto expected = oracle_traces(scaled, Logic::Mel, n, scaled_max_time);
        auto actual = meta_traces(scaled, Logic::Mel, n, scaled_max_time);
        scaled_models += expected.size();
        scaled_mismatches += expected == actual ? 0 : 1;
    }
    return {!models.empty() && violations == 0 && scaled_mismatches == 0 && scaled_models > 0,
            std::to_string(models.size()) + " models at n=3, M=20, " + std::to_string(violations) +
                " window violations; scaled instance " + std::to_string(scaled_models) + " oracle models, " +
                std::to_string(scaled_mismatches) + " discrepancies"};
}

auto dynamic() -> Outcome {
    auto start = std::chrono::steady_clock::now();
    auto text = read_program("delex.lp");
    auto light = sym("light(l1)");
    auto green = sym("green(l1)");
    auto red = sym("red(l1)");
    std::regex alternation{"([gb][rb])*"};
    int mismatches = 0;
    std::string counts;
    for (int n = 0; n <= 4; ++n) {
        TraceSet expected;
        auto states = n + 1;
        for (int labels = 0; labels < (1 << (2 * states)); ++labels) {
            oracle::Trace trace;
            std::string word;
            for (int t = 0; t < states; ++t) {
                auto label = (labels >> (2 * t)) & 3;
                std::set<Symbol> state{light};
                if ((label & 1) != 0) {
                    state.insert(green);
                }
                if ((label & 2) != 0) {
                    state.insert(red);
                }
                trace.states.push_back(std::move(state));
                if (t < n) {
                    word += "egrb"[label];
                }
            }
            if (std::regex_match(word, alternation)) {
                expected.insert(std::move(trace));
            }
        }
        auto actual = meta_traces(text, Logic::Del, n);
        mismatches += expected == actual ? 0 : 1;
        counts += (n == 0 ? "" : "/") + std::to_string(actual.size());
    }
    auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {mismatches == 0 && seconds < del_limit,
            "models for n=0..4: " + counts + ", " + std::to_string(mismatches) + " horizons differ from the matcher"};
}

auto path_closure() -> Outcome {
    constexpr int paths = 50;
    constexpr int max_depth = 3;
    auto grammar = grammar_for(Logic::Del);
    PathGenerator gen{7};
    int closure_failures = 0;
    int mismatches = 0;
    std::string first;
    for (int i = 0; i < paths; ++i) {
        auto text = gen.path(max_depth);
        auto formula = grammar.typecheck(parse_expression("&eventually(" + text + ",z)"), "del");
        auto formula_sym = *formula.to_term().to_symbol();
        auto closed = fl_close({formula_sym});
        auto bound = 4 * PathGenerator::size(text) + 4;
        if (fl_close(closed) != closed || !closed.contains(formula_sym) || static_cast<int>(closed.size()) > bound) {
            ++closure_failures;
        }
        auto relation_path = oracle::to_path(formula.args[0]);
        auto program = "{p}. {q}. {z}. w :- &eventually(" + text + ",z).";
        auto z = sym("z");
        auto w = sym("w");
        for (int n = 0; n <= 2; ++n) {
            auto traces = meta_traces(program, Logic::Del, n);
            bool ok = traces.size() == (std::size_t{1} << (3 * (n + 1)));
            for (auto const &trace : traces) {
                auto relation = oracle::eval_path(trace, relation_path);
                for (int t = 0; t <= n; ++t) {
                    bool expected = std::any_of(relation.begin(), relation.end(), [&](auto const &edge) {
                        return edge.first == t && trace.states[edge.second].contains(z);
                    });
                    ok = ok && expected == trace.states[t].contains(w);
                }
            }
            if (!ok) {
                ++mismatches;
                if (first.empty()) {
                    first = " first: n=" + std::to_string(n) + " " + text;
                }
            }
        }
    }
    return {closure_failures == 0 && mismatches == 0,
            std::to_string(paths) + " paths, " + std::to_string(closure_failures) + " closure failures, " +
                std::to_string(mismatches) + " path relation discrepancies" + first};
}

auto solver_completeness() -> Outcome {
    constexpr int programs = 100;
    constexpr int max_atoms = 12;
    std::mt19937_64 rng{42};
    int mismatches = 0;
    std::size_t models = 0;
    for (int i = 0; i < programs; ++i) {
        auto prg = random_prop_program(rng, max_atoms);
        auto expected = brute_force_stable(prg);
        auto actual = solve(prg);
        std::sort(actual.begin(), actual.end());
        models += expected.size();
        mismatches += expected == actual ? 0 : 1;
    }
    return {mismatches == 0, std::to_string(programs) + " programs, " + std::to_string(models) + " stable models, " +
                                 std::to_string(mismatches) + " discrepancies"};
}

} // namespace

auto main() -> int {
    struct Criterion {
        char const *name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria{
        {"traffic light TEL traces", traffic_light},
        {"reification golden facts", reify_golden},
        {"transformation golden externals", transform_golden},
        {"TEL oracle equivalence", oracle_equivalence},
        {"MEL interval and timing", metric},
        {"DEL alternation", dynamic},
        {"path closure and relations", path_closure},
        {"solver against exhaustive enumeration", solver_completeness},
    };
    int failed = 0;
    int index = 0;
    for (auto const &criterion : criteria) {
        ++index;
        auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (std::exception const &e) {
            outcome = {false, std::string{"exception: "} + e.what()};
        }
        auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %d %s: %s (%.2fs)\n", outcome.pass ? "PASS" : "FAIL", index, criterion.name,
                    outcome.detail.c_str(), seconds);
        std::fflush(stdout);
        failed += outcome.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
