// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <tmeta/ground.hh>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tmeta {

using TupleId = std::uint32_t;
using AtomId = std::uint32_t;

struct ReifiedRule {
    bool choice = false;
    TupleId head = 0;
    TupleId body = 0;

    friend auto operator==(ReifiedRule const &a, ReifiedRule const &b) -> bool = default;
    friend auto operator<=>(ReifiedRule const &a, ReifiedRule const &b) = default;
};

//! Integer-identified fact database describing a ground program.
//!
//! Atom ids are positive; negative entries of a literal tuple denote default
//! negation. Theory expressions are stored as `&`-prefixed function symbols.
struct ReifiedDB {
    std::vector<ReifiedRule> rules;
    std::map<TupleId, std::vector<AtomId>> atom_tuples;
    std::map<TupleId, std::vector<std::int64_t>> literal_tuples;
    std::vector<std::pair<Symbol, TupleId>> outputs;
    //! Pairs of (type, expression).
    std::vector<std::pair<Symbol, Symbol>> formulas;
    std::vector<std::pair<AtomId, bool>> externals;
    std::vector<std::pair<Symbol, TupleId>> show_atoms;
    std::vector<std::pair<Symbol, TupleId>> show_terms;

    [[nodiscard]] auto empty() const -> bool;
    friend auto operator==(ReifiedDB const &a, ReifiedDB const &b) -> bool = default;
};

[[nodiscard]] auto reify(GroundProgram const &gp) -> ReifiedDB;

//! The database as facts, in emission order.
[[nodiscard]] auto reified_facts(ReifiedDB const &db) -> std::vector<Symbol>;
[[nodiscard]] auto emit_reified_text(ReifiedDB const &db) -> std::string;
[[nodiscard]] auto parse_reified(std::string_view text) -> ReifiedDB;
//! Checks referential integrity; throws ReifyError on dangling references.
void validate(ReifiedDB const &db);

//! True if the databases agree up to a renaming of atom and tuple ids.
[[nodiscard]] auto isomorphic(ReifiedDB const &a, ReifiedDB const &b) -> bool;

} // namespace tmeta
