// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <tmeta/reify.hh>

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tmeta {

enum class Logic { Tel, Mel, Del };

[[nodiscard]] auto parse_logic(std::string_view name) -> Logic;
[[nodiscard]] auto to_string(Logic logic) -> std::string_view;

//! Rule schemas making up a meta-encoding.
enum class Layer {
    //! One copy of the plain meta-encoding per time step.
    Core,
    //! Synchronizes `hold/2` on atom ids with `true/2` on symbols.
    Bridge,
    //! Propositional and linear-time operators for formulas of type `tel`.
    Tel,
    //! Timing function and metric operators for formulas of type `mel`.
    Mel,
    //! Path expressions, closure, and dynamic modalities of type `del`.
    Del,
};

struct MetaOptions {
    //! Index of the last state.
    int horizon = 0;
    //! Upper bound on the timing function; defaults to 4 * (horizon + 1).
    std::optional<int> max_time;
    //! Nesting limit for instantiated meta atoms.
    int depth_limit = 128;

    [[nodiscard]] auto effective_max_time() const -> int;
};

[[nodiscard]] auto layers(Logic logic) -> std::vector<Layer>;

//! The rule schemas of a layer in surface syntax. Schemas refer to the
//! constants `n` (horizon) and `m` (maximal time point).
[[nodiscard]] auto layer_text(Layer layer) -> std::string;

//! Instantiates the given layers against the reified facts.
[[nodiscard]] auto instantiate(ReifiedDB const &db, std::vector<Layer> const &layers, MetaOptions const &options)
    -> GroundProgram;

[[nodiscard]] auto build_timed_core(ReifiedDB const &db, int horizon) -> GroundProgram;
[[nodiscard]] auto build_meta_program(ReifiedDB const &db, Logic logic, MetaOptions const &options) -> GroundProgram;

//! Closes a set of dynamic formulas (`&eventually(P,F)`, `&always(P,F)`)
//! under path decomposition. Other formulas are kept unchanged.
[[nodiscard]] auto fl_close(std::set<Symbol> const &formulas) -> std::set<Symbol>;

//! Symbols of the `true/2`, `hold/2`, ... meta atoms.
namespace meta_atom {

[[nodiscard]] auto truth(Symbol formula, int step) -> Symbol;
[[nodiscard]] auto hold(AtomId atom, int step) -> Symbol;
[[nodiscard]] auto conjunction(TupleId tuple, int step) -> Symbol;
[[nodiscard]] auto tau(int step, int value) -> Symbol;

} // namespace meta_atom

} // namespace tmeta
