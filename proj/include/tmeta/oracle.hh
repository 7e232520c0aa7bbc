// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <tmeta/grammar.hh>

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

//! Brute-force reference semantics for temporal programs.
//!
//! Everything here is evaluated directly on traces in the logic of
//! temporal here-and-there; it does not rely on reification, the meta
//! encodings, or the stable-model solver.
namespace tmeta::oracle {

struct Trace {
    std::vector<std::set<Symbol>> states;
    //! Time points of the states (metric semantics only).
    std::optional<std::vector<int>> tau;

    [[nodiscard]] auto horizon() const -> int { return static_cast<int>(states.size()) - 1; }
    friend auto operator==(Trace const &a, Trace const &b) -> bool = default;
    friend auto operator<=>(Trace const &a, Trace const &b) = default;
};

struct Path;

//! Temporal formula over ground atoms.
struct Formula {
    enum class Kind {
        Atom,
        Top,
        Bottom,
        Not,
        And,
        Or,
        Implies,
        Initial,
        Next,
        Eventually,
        MetricNext,
        MetricEventually,
        Diamond,
        Box,
    };

    Kind kind = Kind::Top;
    Symbol atom;
    int lower = 0;
    //! Exclusive upper bound; empty for `#sup`.
    std::optional<int> upper;
    std::vector<Formula> args;
    std::shared_ptr<Path> path;
};

struct Path {
    enum class Kind { Step, Test, Seq, Choice, Star };

    Kind kind = Kind::Step;
    std::optional<Formula> test;
    std::vector<Path> args;
};

//! Reads a typed (macro-expanded) ground theory expression.
[[nodiscard]] auto to_formula(TheoryExpression const &expr) -> Formula;
[[nodiscard]] auto to_path(TheoryExpression const &expr) -> Path;

//! Satisfaction of a formula by a total trace at step t.
[[nodiscard]] auto eval_formula(Trace const &trace, int t, Formula const &formula) -> bool;
//! Pairs (i, j) of steps connected by the path in a total trace.
[[nodiscard]] auto eval_path(Trace const &trace, Path const &path) -> std::set<std::pair<int, int>>;

struct OracleOptions {
    int horizon = 0;
    //! Enumerate timing functions with values up to max_time.
    bool timed = false;
    int max_time = 0;
    //! Bound on the number of atom/state pairs (2^bound candidate traces).
    int max_bits = 24;
};

//! Temporal equilibrium models of length horizon + 1, in lexicographic
//! enumeration order of the timing function and the atom/state grid.
//!
//! The program is instantiated over the terms occurring in it; rules must
//! not use arithmetic, conditional literals, or constants definitions.
[[nodiscard]] auto temporal_models(Program const &prg, TheoryGrammar const &grammar, OracleOptions const &options)
    -> std::vector<Trace>;

} // namespace tmeta::oracle
