// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <tmeta/meta.hh>
#include <tmeta/solver.hh>
#include <tmeta/transform.hh>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tmeta {

struct Source {
    std::string text;
    std::string name;
};

struct PipelineConfig {
    Logic logic = Logic::Tel;
    //! Additional grammar sources merged into the built-in grammar.
    std::vector<Source> grammars;
    //! `-c name=value` definitions; `n` also selects the horizon.
    std::vector<std::pair<std::string, Symbol>> constants;
    std::optional<int> max_time;
    SolveOptions solve;
};

//! Horizon selected by the constant `n` (0 if absent).
[[nodiscard]] auto horizon_of(PipelineConfig const &config) -> int;

//! Built-in grammar of the logic, extra grammar sources, and `#type`
//! blocks of the program, in this order.
[[nodiscard]] auto pipeline_grammar(PipelineConfig const &config, Program const &prg) -> TheoryGrammar;

//! Parses and concatenates the sources into one program.
[[nodiscard]] auto parse_sources(std::vector<Source> const &sources) -> Program;

struct Compiled {
    TheoryGrammar grammar;
    Program transformed;
    GroundProgram ground;
    ReifiedDB db;
};

[[nodiscard]] auto compile(Program const &prg, PipelineConfig const &config) -> Compiled;

//! A stable model of the meta program read back as a trace.
struct TemporalModel {
    //! Shown symbols per state, sorted.
    std::vector<std::vector<Symbol>> states;
    std::optional<std::vector<int>> tau;
};

//! Shown symbols come from `show_atom/2` and `show_term/2`: a symbol is
//! shown at step T if its condition tuple holds at T.
[[nodiscard]] auto decode(PropProgram const &meta, PModel const &model, ReifiedDB const &db, int horizon,
                          bool metric) -> TemporalModel;

//! All `true(o,T)` for non-theory symbols o, per state; used to compare
//! against the oracle independently of show directives.
[[nodiscard]] auto decode_truth(PropProgram const &meta, PModel const &model, int horizon)
    -> std::vector<std::vector<Symbol>>;

[[nodiscard]] auto format_temporal(TemporalModel const &model) -> std::string;
[[nodiscard]] auto format_flat(TemporalModel const &model) -> std::string;

struct SolveResult {
    std::size_t models = 0;
    SolveStats stats;
    std::size_t meta_rules = 0;
    std::size_t meta_atoms = 0;
};

//! Runs the whole pipeline, reporting each model as it is found.
auto solve_temporal(Program const &prg, PipelineConfig const &config,
                    std::function<void(TemporalModel const &)> const &on_model) -> SolveResult;

} // namespace tmeta
