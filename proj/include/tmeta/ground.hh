// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <tmeta/ast.hh>

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tmeta {

struct GroundLiteral {
    Symbol atom;
    bool positive = true;

    friend auto operator==(GroundLiteral const &a, GroundLiteral const &b) -> bool = default;
    friend auto operator<=>(GroundLiteral const &a, GroundLiteral const &b) = default;
};

//! A propositional rule; facts have a single head atom and an empty body,
//! integrity constraints an empty (non-choice) head.
struct GroundRule {
    bool choice = false;
    std::vector<Symbol> head;
    std::vector<GroundLiteral> body;

    friend auto operator==(GroundRule const &a, GroundRule const &b) -> bool = default;
    friend auto operator<=>(GroundRule const &a, GroundRule const &b) = default;
};

//! A ground `#show`: atoms are shown by name, terms under their condition.
struct GroundShow {
    Symbol term;
    bool atom = false;
    std::vector<GroundLiteral> condition;

    friend auto operator==(GroundShow const &a, GroundShow const &b) -> bool = default;
    friend auto operator<=>(GroundShow const &a, GroundShow const &b) = default;
};

struct GroundProgram {
    std::vector<GroundRule> rules;
    std::vector<Symbol> facts;
    std::vector<Symbol> externals;
    //! Every atom and theory expression of the program, ordered by symbol.
    std::vector<Symbol> atoms;
    //! Typed theory expressions keyed by their ground symbol.
    std::map<Symbol, TheoryExpression> expressions;
    std::vector<GroundShow> shows;
    bool show_all = true;
    //! Instances dropped because an arithmetic term was undefined.
    std::size_t dropped_instances = 0;
};

struct GroundOptions {
    //! Overrides for `#const` definitions (as given by `-c name=value`).
    std::vector<std::pair<std::string, Symbol>> constants;
    //! Maximal nesting depth of derived atoms.
    int depth_limit = 16;
    //! Apply fact and possible-atom simplifications.
    bool simplify = true;
};

//! Parses `name=value` as given on the command line.
[[nodiscard]] auto parse_constant(std::string_view text) -> std::pair<std::string, Symbol>;

//! Replaces constants by their definitions (`#const` directives, then overrides).
[[nodiscard]] auto substitute_constants(Program const &prg, std::vector<std::pair<std::string, Symbol>> const &overrides)
    -> Program;

//! Instantiates a (transformed) program.
//!
//! `facts` are added as additional facts; this avoids building rules for the
//! large fact bases produced by reification.
[[nodiscard]] auto ground(Program const &prg, GroundOptions const &options = {}, std::span<Symbol const> facts = {})
    -> GroundProgram;

//! Prints the ground rules in surface syntax (one rule per line).
[[nodiscard]] auto format_ground(GroundProgram const &gp) -> std::string;

} // namespace tmeta
