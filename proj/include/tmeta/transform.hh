// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <tmeta/grammar.hh>

#include <string>
#include <vector>

namespace tmeta {

//! Predicate names reserved for rules generated from `#show` directives.
inline constexpr char const *show_atom_predicate = "__show_atom";
inline constexpr char const *show_term_predicate = "__show_term";

struct SafetyReport {
    //! Safe atom occurrences of the body, in order of appearance.
    std::vector<Term> safe_atoms;
    std::vector<std::string> bound;
    std::vector<std::string> unbound;

    [[nodiscard]] auto safe() const -> bool { return unbound.empty(); }
};

//! Atoms of a typed expression reached only through arguments declared safe.
void collect_safe_atoms(TheoryExpression const &expr, TheoryGrammar const &grammar, std::vector<Term> &out);

[[nodiscard]] auto classify_safety(Rule const &rule, TheoryGrammar const &grammar) -> SafetyReport;

//! Adds `#external` directives protecting theory expressions in bodies and
//! atoms nested in head expressions from grounder simplifications.
//! Throws SafetyError for unsafe rules.
[[nodiscard]] auto inject_externals(Program const &prg, TheoryGrammar const &grammar) -> Program;

//! Replaces `#show` directives by internal rules over the reserved predicates.
//! A bare `#show.` is kept as a marker that disables the show-all default.
[[nodiscard]] auto rewrite_shows(Program const &prg) -> Program;

//! True if the program contains no show directives (so everything is shown).
[[nodiscard]] auto shows_all(Program const &prg) -> bool;

//! Type checking, occurrence checking, show rewriting, and external injection.
[[nodiscard]] auto transform(Program const &prg, TheoryGrammar const &grammar) -> Program;

} // namespace tmeta
