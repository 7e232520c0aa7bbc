// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <tmeta/oracle.hh>
#include <tmeta/pipeline.hh>
#include <tmeta/reify.hh>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace tmeta::test {

using TraceSet = std::set<oracle::Trace>;

inline auto read_program(std::string const &name) -> std::string {
    std::ifstream in{std::string{TMETA_PROGRAMS_DIR} + "/" + name};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline auto grammar_for(Logic logic) -> TheoryGrammar { return load_grammar(builtin_grammar(to_string(logic))); }

struct MetaRun {
    PropProgram prop;
    ReifiedDB db;
    std::vector<PModel> models;
};

inline auto run_meta_raw(std::string const &text, Logic logic, int horizon, std::optional<int> max_time = {})
    -> MetaRun {
    PipelineConfig config;
    config.logic = logic;
    config.constants = {{"n", Symbol::number(horizon)}};
    config.max_time = max_time;
    auto compiled = compile(parse_program(text), config);
    MetaOptions options;
    options.horizon = horizon;
    options.max_time = max_time;
    MetaRun out;
    out.prop = PropProgram::from_ground(build_meta_program(compiled.db, logic, options));
    out.db = compiled.db;
    out.models = solve(out.prop);
    return out;
}

//! Traces of the stable models of the meta program, over all atoms of the
//! object program.
inline auto meta_traces(std::string const &text, Logic logic, int horizon, std::optional<int> max_time = {})
    -> TraceSet {
    auto run = run_meta_raw(text, logic, horizon, max_time);
    TraceSet out;
    for (auto const &model : run.models) {
        oracle::Trace trace;
        for (auto const &state : decode_truth(run.prop, model, horizon)) {
            trace.states.emplace_back(state.begin(), state.end());
        }
        if (logic == Logic::Mel) {
            trace.tau = decode(run.prop, model, run.db, horizon, true).tau;
        }
        out.insert(std::move(trace));
    }
    return out;
}

inline auto oracle_traces(std::string const &text, Logic logic, int horizon, int max_time = 0) -> TraceSet {
    oracle::OracleOptions options;
    options.horizon = horizon;
    options.timed = logic == Logic::Mel;
    options.max_time = max_time;
    auto traces = oracle::temporal_models(parse_program(text), grammar_for(logic), options);
    return {traces.begin(), traces.end()};
}

inline auto format_trace(oracle::Trace const &trace) -> std::string {
    std::string out = "<";
    for (std::size_t t = 0; t < trace.states.size(); ++t) {
        out += t == 0 ? "{" : ", {";
        bool first = true;
        for (auto sym : trace.states[t]) {
            out += first ? "" : ",";
            out += sym.to_string();
            first = false;
        }
        out += "}";
        if (trace.tau) {
            out += "@" + std::to_string((*trace.tau)[t]);
        }
    }
    return out + ">";
}

// Random temporal programs over the atoms a, b, c.

class TelGenerator {
public:
    explicit TelGenerator(std::uint64_t seed) : rng_{seed} {}

    auto program() -> std::string {
        std::string out;
        auto rules = pick(1, 4);
        for (int i = 0; i < rules; ++i) {
            out += rule() + "\n";
        }
        return out;
    }

private:
    auto pick(int lo, int hi) -> int { return std::uniform_int_distribution<int>{lo, hi}(rng_); }
    auto atom() -> std::string { return std::string(1, static_cast<char>('a' + pick(0, 2))); }

    auto formula(int depth) -> std::string {
        switch (depth == 0 ? pick(0, 2) : pick(0, 6)) {
            case 0:
            case 1:
                return atom();
            case 2:
                return pick(0, 1) == 0 ? "&initial" : "&final";
            case 3:
                return "&next(" + formula(depth - 1) + ")";
            case 4:
                return "&eventually(" + formula(depth - 1) + ")";
            case 5:
                return "&not(" + formula(depth - 1) + ")";
            default:
                return "&true";
        }
    }

    auto body_literal() -> std::string {
        auto form = formula(2);
        if (form.front() != '&' && pick(0, 2) == 0) {
            return "not " + form;
        }
        if (form.front() == '&' && pick(0, 3) == 0) {
            return "not " + form;
        }
        return form;
    }

    auto head() -> std::string {
        switch (pick(0, 6)) {
            case 0:
                return "";
            case 1:
                return atom() + "; " + atom();
            case 2:
                return "{ " + atom() + " }";
            case 3:
                return "&next(" + atom() + ")";
            case 4:
                return "&eventually(" + atom() + ")";
            default:
                return atom();
        }
    }

    auto rule() -> std::string {
        auto hd = head();
        auto size = pick(hd.empty() ? 1 : 0, 2);
        std::string body;
        for (int i = 0; i < size; ++i) {
            body += (i == 0 ? "" : ", ") + body_literal();
        }
        if (body.empty()) {
            return hd + ".";
        }
        return hd + (hd.empty() ? ":- " : " :- ") + body + ".";
    }

    std::mt19937_64 rng_;
};

// Random path expressions over the atoms p and q.

class PathGenerator {
public:
    explicit PathGenerator(std::uint64_t seed) : rng_{seed} {}

    auto path(int depth) -> std::string {
        switch (depth == 0 ? pick(0, 2) : pick(0, 6)) {
            case 0:
                return "&step";
            case 1:
                return test(depth);
            case 2:
                return pick(0, 1) == 0 ? "p" : "q";
            case 3:
                return "&seq(" + path(depth - 1) + "," + path(depth - 1) + ")";
            case 4:
                return "&choice(" + path(depth - 1) + "," + path(depth - 1) + ")";
            default:
                return "&star(" + path(depth - 1) + ")";
        }
    }

    //! Number of operator nodes and leaves of a path text.
    static auto size(std::string const &text) -> int {
        return static_cast<int>(std::count(text.begin(), text.end(), '&') +
                                std::count_if(text.begin(), text.end(), [](char c) { return c == 'p' || c == 'q'; }));
    }

private:
    auto pick(int lo, int hi) -> int { return std::uniform_int_distribution<int>{lo, hi}(rng_); }

    auto test(int depth) -> std::string {
        switch (pick(0, depth > 0 ? 3 : 2)) {
            case 0:
                return "&test(p)";
            case 1:
                return "&test(&not(q))";
            case 2:
                return "&test(&true)";
            default:
                return "&test(&eventually(" + path(depth - 1) + ",q))";
        }
    }

    std::mt19937_64 rng_;
};

// Random dynamic programs over the atoms a and b.

class DelGenerator {
public:
    explicit DelGenerator(std::uint64_t seed) : rng_{seed} {}

    auto program() -> std::string {
        std::string out;
        auto rules = pick(1, 3);
        for (int i = 0; i < rules; ++i) {
            out += rule() + "\n";
        }
        return out;
    }

private:
    auto pick(int lo, int hi) -> int { return std::uniform_int_distribution<int>{lo, hi}(rng_); }
    auto atom() -> std::string { return pick(0, 1) == 0 ? "a" : "b"; }

    auto path(int depth) -> std::string {
        switch (depth == 0 ? pick(0, 2) : pick(0, 5)) {
            case 0:
                return "&step";
            case 1:
                return atom();
            case 2:
                return "&test(" + formula(0) + ")";
            case 3:
                return "&seq(" + path(depth - 1) + "," + path(depth - 1) + ")";
            case 4:
                return "&choice(" + path(depth - 1) + "," + path(depth - 1) + ")";
            default:
                return "&star(" + path(depth - 1) + ")";
        }
    }

    auto formula(int depth) -> std::string {
        switch (depth == 0 ? pick(0, 2) : pick(0, 4)) {
            case 0:
            case 1:
                return atom();
            case 2:
                return pick(0, 1) == 0 ? "&final" : "&not(" + atom() + ")";
            case 3:
                return "&eventually(" + path(1) + "," + formula(depth - 1) + ")";
            default:
                return "&always(" + path(1) + "," + formula(depth - 1) + ")";
        }
    }

    auto rule() -> std::string {
        std::string head;
        switch (pick(0, 5)) {
            case 0:
                break;
            case 1:
                head = "{ " + atom() + " }";
                break;
            case 2:
            case 3:
                head = pick(0, 1) == 0 ? "&eventually(" + path(1) + "," + atom() + ")"
                                       : "&always(" + path(1) + "," + atom() + ")";
                break;
            default:
                head = atom();
        }
        std::string body;
        auto size = pick(head.empty() ? 1 : 0, 2);
        for (int i = 0; i < size; ++i) {
            body += (i == 0 ? "" : ", ") + std::string{pick(0, 2) == 0 ? "not " : ""} + formula(2);
        }
        if (body.empty()) {
            return head + ".";
        }
        return head + (head.empty() ? ":- " : " :- ") + body + ".";
    }

    std::mt19937_64 rng_;
};

// Random propositional programs and a brute-force stable model enumerator.

inline auto random_prop_program(std::mt19937_64 &rng, int max_atoms) -> PropProgram {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>{lo, hi}(rng); };
    PropProgram prg;
    prg.atom_count = pick(1, max_atoms);
    auto rules = pick(1, 2 * prg.atom_count);
    for (int i = 0; i < rules; ++i) {
        PRule rule;
        auto kind = pick(0, 9);
        auto heads = kind < 5 ? 1 : kind < 7 ? 2 : kind < 9 ? pick(1, 3) : 0;
        rule.choice = kind >= 7 && kind < 9;
        for (int h = 0; h < heads; ++h) {
            rule.head.push_back(pick(0, prg.atom_count - 1));
        }
        auto body = pick(heads == 0 ? 1 : 0, 3);
        for (int b = 0; b < body; ++b) {
            rule.body.push_back({pick(0, prg.atom_count - 1), pick(0, 2) != 0});
        }
        prg.rules.push_back(std::move(rule));
    }
    return prg;
}

namespace detail {

inline auto in_mask(std::uint32_t mask, int atom) -> bool { return ((mask >> atom) & 1U) != 0; }

//! Model check of the reduct w.r.t. `reference` for the interpretation `mask`.
inline auto reduct_model(PropProgram const &prg, std::uint32_t reference, std::uint32_t mask) -> bool {
    for (auto const &rule : prg.rules) {
        bool applicable = true;
        for (auto lit : rule.body) {
            if (lit.positive ? !in_mask(mask, lit.atom) : in_mask(reference, lit.atom)) {
                applicable = false;
                break;
            }
        }
        if (!applicable) {
            continue;
        }
        if (rule.choice) {
            // h :- B+ for every head atom of the reference
            for (auto h : rule.head) {
                if (in_mask(reference, h) && !in_mask(mask, h)) {
                    return false;
                }
            }
            continue;
        }
        if (std::none_of(rule.head.begin(), rule.head.end(), [&](int h) { return in_mask(mask, h); })) {
            return false;
        }
    }
    return true;
}

} // namespace detail

//! Stable models by checking every interpretation: a model of the reduct
//! none of whose proper subsets is a model of the reduct.
inline auto brute_force_stable(PropProgram const &prg) -> std::vector<PModel> {
    std::vector<PModel> out;
    auto limit = std::uint32_t{1} << prg.atom_count;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        if (!detail::reduct_model(prg, mask, mask)) {
            continue;
        }
        bool minimal = true;
        for (std::uint32_t sub = (mask - 1) & mask; minimal && sub != mask; sub = (sub - 1) & mask) {
            if (detail::reduct_model(prg, mask, sub)) {
                minimal = false;
            }
            if (sub == 0) {
                break;
            }
        }
        if (minimal) {
            PModel model;
            for (int a = 0; a < prg.atom_count; ++a) {
                if (detail::in_mask(mask, a)) {
                    model.push_back(a);
                }
            }
            out.push_back(std::move(model));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline auto format_prop_program(PropProgram const &prg) -> std::string {
    std::string out;
    for (auto const &rule : prg.rules) {
        std::string head;
        for (auto h : rule.head) {
            head += (head.empty() ? "" : rule.choice ? "; " : " | ") + std::string{"x"} + std::to_string(h);
        }
        if (rule.choice) {
            head = "{" + head + "}";
        }
        std::string body;
        for (auto lit : rule.body) {
            body += (body.empty() ? "" : ", ") + std::string{lit.positive ? "" : "not "} + "x" + std::to_string(lit.atom);
        }
        out += head + (body.empty() ? "" : " :- " + body) + ".\n";
    }
    return out;
}

} // namespace tmeta::test
